// Acceptance harness. `acceptance --criterion N` evaluates one criterion and
// prints a single PASS/FAIL line; without arguments all eight run in order.
// Tolerances are fixed here and nowhere else.

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tlm/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace tlm;

namespace {

// 1
constexpr double kKeySlack = 1e-6;
constexpr double kKeyCaseSeconds = 120.0;
// 2
constexpr double kReversalTol = 1e-7;
// 3
constexpr double kOmegaHermitianTol = 1e-14;
constexpr double kOmegaSlopeTol = 0.10;
constexpr double kTruncationSlopeTol = 0.05;
// 4
constexpr double kCRRelTol = 1e-12;
constexpr double kHeadSlopeTol = 0.15;
constexpr double kSupSlopeMax = 0.05;  // "no growth trend" over the top half of the grid
constexpr double kBound6SlopeTol = 0.15;
// 6
constexpr double kRho06SlopeTol = 0.07;
constexpr double kRho10SlopeTol = 0.10;
constexpr double kRatioR2Min = 0.95;
constexpr double kVsumSlopeTol = 0.10;
constexpr long kBaxterFitMinN = 256;  // upper half of {64..1024}
// 7
constexpr double kCoeffSlopeTol = 0.05;
constexpr double kDiffSlopeTol = 0.10;
constexpr double kBetaRatioLo = 0.9;
constexpr double kBetaRatioHi = 1.1;
// 8
constexpr double kAutocovTol = 1e-8;

const std::vector<long> kGrid512 = {64, 91, 128, 181, 256, 362, 512};
const std::vector<long> kGrid1024 = {64, 91, 128, 181, 256, 362, 512, 724, 1024};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "[x] ") << what << "; ";
  }
};

std::string f(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome criterion1() {
  Outcome o;
  struct Case {
    std::string name;
    ArfimaSymbol sym;
  };
  std::vector<Case> cases;
  for (double d : {0.15, 0.25, 0.35}) {
    cases.push_back({"farima(" + f(d) + ")", fixtures::farima(d)});
    cases.push_back({"diag2(" + f(d) + ")", fixtures::diag2(d)});
  }
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    long violations = 0;
    double excess = -1.0;
    for (long n : {4L, 8L, 16L, 32L}) {
      const KeyEqualityCheck k = key_equality_check(c.sym, n, kKeySlack);
      violations += k.violations;
      excess = std::max(excess, k.worst_excess);
    }
    const double secs = seconds_since(t0);
    o.require(violations == 0 && secs < kKeyCaseSeconds,
              c.name + " violations " + std::to_string(violations) + " worst excess " + f(excess) + " time " + f(secs) + "s");
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const std::vector<std::pair<std::string, ArfimaSymbol>> cases = {
      {"farima(0.25)", fixtures::farima(0.25)}, {"farima(0.45)", fixtures::farima(0.45)},
      {"diag2(0.3)", fixtures::diag2(0.3)},     {"twisted(0.25)", fixtures::twisted(0.25)},
      {"twisted(0.4)", fixtures::twisted(0.4)}};
  for (const auto& [name, sym] : cases) {
    AutocovSeq seq(sym);
    double worst = 0.0;
    for (long n : {1L, 2L, 8L, 16L, 32L, 64L}) worst = std::max(worst, time_reversal_discrepancy(seq, n));
    o.require(worst < kReversalTol, name + " max " + f(worst));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const double d = 0.25;
  const OmegaData r = omega_data(fixtures::farima(d), kGrid1024, 0.5);
  const double herm = *std::max_element(r.hermitian_defect.begin(), r.hermitian_defect.end());
  o.require(herm <= kOmegaHermitianTol, "omega Hermitian defect " + f(herm));
  o.require(std::abs(r.omega_fit.slope + d) <= kOmegaSlopeTol,
            "omega slope " + f(r.omega_fit.slope) + " (target " + f(-d) + " +-" + f(kOmegaSlopeTol) + ", r2 " + f(r.omega_fit.r2) + ")");
  o.require(std::abs(r.trunc_fit.slope) <= kTruncationSlopeTol,
            "truncation slope " + f(r.trunc_fit.slope) + " (target 0 +-" + f(kTruncationSlopeTol) + ", r2 " + f(r.trunc_fit.r2) + ")");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const double d = 0.25;
  const RatesData r = rates_data(fixtures::farima(d), kGrid512, 0.5);
  double asym = 0.0, gap = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < r.n_grid.size(); ++i) {
    asym = std::max(asym, r.delta_asymmetry[i]);
    gap = std::max(gap, r.cr_gap[i]);
    scale = std::max(scale, r.sup[i]);
  }
  o.require(asym == 0.0 && gap <= kCRRelTol * (1.0 + scale), "Delta symmetric " + f(asym) + ", max |C-R| " + f(gap));
  o.require(std::abs(r.head_fit.slope + 2.0 * d) <= kHeadSlopeTol,
            "head slope " + f(r.head_fit.slope) + " (target " + f(-2.0 * d) + " +-" + f(kHeadSlopeTol) + ")");
  std::string sups;
  for (double s : r.sup) sups += f(s) + " ";
  o.require(r.sup_fit_top.slope <= kSupSlopeMax,
            "sup C top-half slope " + f(r.sup_fit_top.slope) + " (max " + f(kSupSlopeMax) + "; sup by n: " + sups + ")");
  o.require(std::abs(r.bound6_fit.slope + d) <= kBound6SlopeTol,
            "partial-sum slope " + f(r.bound6_fit.slope) + " (target " + f(-d) + " +-" + f(kBound6SlopeTol) + ")");
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (long n : {16L, 32L}) {
    const DominationCheck c = tnbound_check(fixtures::farima(0.25), n);
    o.require(c.violations == 0, "n " + std::to_string(n) + " violations " + std::to_string(c.violations) + " min ratio " +
                                     f(c.min_ratio) + " K1 " + f(c.constants.K1) + " K2 " + f(c.constants.K2));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const double d = 0.25;
  const auto sym = fixtures::farima(d);
  BaxterOptions opt;
  opt.fit_min_n = kBaxterFitMinN;
  const BaxterResult r06 = baxter_error(sym, OutputSeq::a_rho(0.6, 1), kGrid1024, opt);
  const BaxterResult r075 = baxter_error(sym, OutputSeq::a_rho(0.75, 1), kGrid1024, opt);
  const BaxterResult r10 = baxter_error(sym, OutputSeq::a_rho(1.0, 1), kGrid1024, opt);
  o.require(std::abs(r06.fit.slope - (-0.10)) <= kRho06SlopeTol,
            "rho 0.6 slope " + f(r06.fit.slope) + " (target -0.1 +-" + f(kRho06SlopeTol) + "; full grid " + f(r06.fit_full.slope) + ")");
  o.require(std::abs(r10.fit.slope - (-0.25)) <= kRho10SlopeTol,
            "rho 1.0 slope " + f(r10.fit.slope) + " (target -0.25 +-" + f(kRho10SlopeTol) + "; full grid " + f(r10.fit_full.slope) + ")");
  o.require(r075.log_ratio.r2 >= kRatioR2Min, "rho 0.75 ratio-vs-log r2 " + f(r075.log_ratio.r2));
  const PredictorReport p = predictor_convergence(sym, kGrid1024);
  o.require(std::abs(p.vsum_fit.slope + d) <= kVsumSlopeTol,
            "predictor sum slope " + f(p.vsum_fit.slope) + " (target " + f(-d) + " +-" + f(kVsumSlopeTol) + ")");
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (const auto& [name, sym] : std::vector<std::pair<std::string, ArfimaSymbol>>{
           {"farima(0.25)", fixtures::farima(0.25)},
           {"arfima_ar(0.25)", fixtures::arfima_ar(0.25)},
           {"twisted(0.25)", fixtures::twisted(0.25)}}) {
    const double d = sym.d();
    const DecayFits fits = decay_fits(sym);
    o.require(std::abs(fits.a.slope + 1.0 + d) <= kCoeffSlopeTol, name + " a " + f(fits.a.slope));
    o.require(std::abs(fits.a_tilde.slope + 1.0 + d) <= kCoeffSlopeTol, name + " a~ " + f(fits.a_tilde.slope));
    o.require(std::abs(fits.A_tilde.slope + d) <= kCoeffSlopeTol, name + " A~ " + f(fits.A_tilde.slope));
    o.require(std::abs(fits.beta.slope + 1.0) <= kCoeffSlopeTol, name + " beta " + f(fits.beta.slope));
    o.require(std::abs(fits.a_tilde_diff.slope + 2.0 + d) <= kDiffSlopeTol, name + " a~ diff " + f(fits.a_tilde_diff.slope));
    if (fits.has_beta_ratio)
      o.require(fits.beta_ratio_min >= kBetaRatioLo && fits.beta_ratio_max <= kBetaRatioHi,
                name + " beta ratio [" + f(fits.beta_ratio_min) + ", " + f(fits.beta_ratio_max) + "]");
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  for (double d : {0.1, 0.25, 0.4}) {
    const auto quad = oracles::quadrature_gamma(fixtures::farima(d), 512);
    AutocovSeq seq(fixtures::farima(d));
    double worst = 0.0, worst_seq = 0.0;
    for (long k = 0; k <= 512; ++k) {
      const double cf = gamma_fractional_closed_form(d, k);
      worst = std::max(worst, std::abs(quad[k](0, 0) - cf));
      worst_seq = std::max(worst_seq, std::abs(seq.gamma(k)(0, 0) - cf));
    }
    o.require(worst < kAutocovTol && worst_seq < kAutocovTol,
              "d " + f(d) + " quadrature " + f(worst) + " table " + f(worst_seq));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (which.empty())
    for (int i = 1; i <= 8; ++i) which.push_back(i);
  bool all = true;
  for (int c : which) {
    if (c < 1 || c > 8) {
      std::cerr << "criterion must be 1..8\n";
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    all = all && o.pass;
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << " (" << f(seconds_since(t0)) << "s) "
              << o.detail.str() << std::endl;
  }
  return all ? 0 : 1;
}
