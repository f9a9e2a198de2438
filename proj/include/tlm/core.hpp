#pragma once

/// @file
/// Shared types, error hierarchy and small numerical helpers.

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tlm {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input (empty or all-zero polynomial, shape mismatch, bad config value).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at the spectral singularity theta = 0 with d > 0.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Cholesky breakdown; carries the 0-based scalar pivot that failed.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, long pivot)
      : Error(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
  long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

/// A rational matrix function violates condition (C) (pole or determinant
/// zero in the closed unit disk).
class ConditionCError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or inconsistent experiment configuration or symbol file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shortest round-trip decimal form, '.' separator regardless of locale.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Spectral norm of a small dense block. Closed forms for q <= 2.
inline double spectral_norm(const Eigen::Ref<const Mat>& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  if (a.rows() == 2 && a.cols() == 2) {
    // Largest eigenvalue of the 2x2 Hermitian matrix a^* a.
    const double p = std::norm(a(0, 0)) + std::norm(a(1, 0));
    const double r = std::norm(a(0, 1)) + std::norm(a(1, 1));
    const cd off = std::conj(a(0, 0)) * a(0, 1) + std::conj(a(1, 0)) * a(1, 1);
    const double half_tr = 0.5 * (p + r);
    const double disc = std::sqrt(0.25 * (p - r) * (p - r) + std::norm(off));
    return std::sqrt(std::max(0.0, half_tr + disc));
  }
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

/// Number of worker threads, capped by the TLM_THREADS environment variable.
inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TLM_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Runs fn(i) for i in [0, count), strided across workers. Callers write
/// results by index, so output does not depend on the schedule.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// floor(x * n) with protection against x*n landing a hair below an integer.
inline long floor_fraction(double x, long n) {
  return static_cast<long>(std::floor(x * static_cast<double>(n) + 1e-9));
}

}  // namespace tlm
