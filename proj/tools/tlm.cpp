// tlm: experiment runner. Exit codes: 0 all checks pass, 1 a check failed,
// 2 configuration or symbol error.

#include "tlm/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void print_report(const tlm::ExperimentReport& rep) {
  for (const auto& c : rep.checks) {
    std::cout << tlm::Check::status_name(c.status) << "  " << c.name << "  value=" << tlm::format_double(c.value);
    if (std::isfinite(c.target)) std::cout << " target=" << tlm::format_double(c.target);
    if (std::isfinite(c.tol)) std::cout << " tol=" << tlm::format_double(c.tol);
    if (std::isfinite(c.r2)) std::cout << " r2=" << tlm::format_double(c.r2);
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  for (const auto& f : rep.files) std::cout << "wrote " << f << "\n";
  std::cout << rep.experiment << ": " << (rep.passed() ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-section and inverse approximation experiments for long-memory block Toeplitz systems"};
  app.require_subcommand(1);

  std::string config_path, symbol_path, out_dir;
  std::vector<long> n_grid;
  std::vector<double> rho;
  std::optional<double> d, delta, kappa, slope_tol;
  long fit_min_n = -1;
  std::optional<std::uint64_t> seed;

  for (const auto& name : tlm::ExperimentConfig::experiments()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--symbol", symbol_path, "JSON symbol file (default: scalar FARIMA)");
    sub->add_option("--n-grid", n_grid, "matrix sizes, strictly increasing")->delimiter(',');
    sub->add_option("--d", d, "memory parameter (overrides the symbol file)");
    sub->add_option("--delta", delta, "corner fraction in (0, 1/2]");
    sub->add_option("--rho", rho, "A_rho exponents for baxter")->delimiter(',');
    sub->add_option("--kappa", kappa, "kappa for the B-class prediction");
    sub->add_option("--slope-tol", slope_tol, "slope tolerance");
    sub->add_option("--fit-min-n", fit_min_n, "fit only n >= this value");
    sub->add_option("--seed", seed, "seed for randomized fixtures");
    sub->add_option("--out", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  tlm::ExperimentReport rep;
  try {
    tlm::ExperimentConfig cfg;
    if (!config_path.empty()) cfg.merge_json(tlm::read_json_file(config_path));
    cfg.experiment = app.get_subcommands().front()->get_name();
    if (!symbol_path.empty()) cfg.symbol_path = symbol_path;
    if (!n_grid.empty()) cfg.n_grid = n_grid;
    if (!rho.empty()) cfg.rho = rho;
    if (d) cfg.d = d;
    if (delta) cfg.delta = *delta;
    if (kappa) cfg.kappa = kappa;
    if (slope_tol) cfg.slope_tol = slope_tol;
    if (fit_min_n >= 0) cfg.fit_min_n = fit_min_n;
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
    (void)cfg.symbol();
    rep = tlm::run_experiment(cfg);
  } catch (const tlm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  print_report(rep);
  return rep.passed() ? 0 : 1;
}
