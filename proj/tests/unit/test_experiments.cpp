#include "fixtures.hpp"
#include "tlm/experiments.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace tlm;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tlm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(TLM_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(SymbolIo, RoundTripNonCommuting) {
  const auto s = fixtures::twisted(0.3);
  const auto back = symbol_from_json(symbol_to_json(s));
  EXPECT_EQ(back.q(), 2);
  EXPECT_DOUBLE_EQ(back.d(), 0.3);
  for (double th : {0.3, 1.7, -2.2}) {
    const cd z = std::polar(1.0, th);
    EXPECT_LT(spectral_norm(back.g().eval(z) - s.g().eval(z)), 1e-15);
    EXPECT_LT(spectral_norm(back.g_sharp().eval(z) - s.g_sharp().eval(z)), 1e-15);
  }
}

TEST(SymbolIo, ComplexPairsAndDefaultDenominator) {
  const json j = json::parse(R"({"q": 1, "d": 0.2, "g": [[{"num": [1, [0, 0.5]]}]]})");
  const auto s = symbol_from_json(j);
  EXPECT_EQ(s.g().entry(0, 0).num[1], cd(0.0, 0.5));
  EXPECT_EQ(s.g().entry(0, 0).den.size(), 1u);
}

TEST(SymbolIo, StructuralErrors) {
  EXPECT_THROW(symbol_from_json(json::parse(R"({"d": 0.2, "g": []})")), ConfigError);
  EXPECT_THROW(symbol_from_json(json::parse(R"({"q": 2, "d": 0.2, "g": [[{"num": [1]}]]})")), ConfigError);
  EXPECT_THROW(symbol_from_json(json::parse(R"({"q": 1, "d": 0.2, "g": [[{"num": ["x"]}]]})")), ConfigError);
  EXPECT_THROW(symbol_from_json(json::parse(R"({"q": 1, "d": 0.2, "g": [[{"den": [1]}]]})")), ConfigError);
  const fs::path dir = scratch_dir("broken");
  std::ofstream(dir / "bad.json") << "{ \"q\": 1, \"d\": ";
  EXPECT_THROW(load_symbol((dir / "bad.json").string()), ConfigError);
  EXPECT_THROW(load_symbol((dir / "missing.json").string()), ConfigError);
}

TEST(SymbolIo, ShippedSymbolsLoad) {
  for (const char* name : {"farima", "diag2", "twisted", "ar1", "white2"})
    EXPECT_NO_THROW(load_symbol(std::string(TLM_DATA_DIR) + "/symbols/" + name + ".json")) << name;
}

TEST(ReportIo, CsvQuotingAndNumbers) {
  CsvTable t({"a", "b,c", "d"});
  t.add({std::string("x\"y"), 0.1, 7L});
  t.add({std::string("line\nbreak"), 1e-300, -3L});
  EXPECT_EQ(t.str(), "a,\"b,c\",d\r\n\"x\"\"y\",0.1,7\r\n\"line\nbreak\",1e-300,-3\r\n");
  EXPECT_THROW(t.add({1L}), InvalidInput);
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ReportIo, AtomicWriteLeavesNoTemporary) {
  const fs::path dir = scratch_dir("atomic");
  write_file_atomic(dir / "sub" / "f.csv", "x\r\n");
  EXPECT_EQ(slurp(dir / "sub" / "f.csv"), "x\r\n");
  EXPECT_FALSE(fs::exists(dir / "sub" / "f.csv.tmp"));
}

TEST(Config, Validation) {
  ExperimentConfig c;
  c.experiment = "rates";
  EXPECT_NO_THROW(c.validate());
  c.n_grid = {64, 64};
  EXPECT_THROW(c.validate(), ConfigError);
  c.n_grid = {64, 128};
  c.delta = 0.6;
  EXPECT_THROW(c.validate(), ConfigError);
  c.delta = 0.5;
  c.slope_tol = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.slope_tol.reset();
  c.experiment = "plot";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, SlopeToleranceByGridReach) {
  ExperimentConfig c;
  EXPECT_DOUBLE_EQ(c.effective_slope_tol(), 0.15);
  c.n_grid = {64, 1024};
  EXPECT_DOUBLE_EQ(c.effective_slope_tol(), 0.10);
}

TEST(Config, MergeJson) {
  ExperimentConfig c;
  c.merge_json(json::parse(R"({"n_grid": [16, 32], "delta": 0.25, "rho": 1.2, "seed": 9})"));
  EXPECT_EQ(c.n_grid, (std::vector<long>{16, 32}));
  EXPECT_DOUBLE_EQ(c.delta, 0.25);
  EXPECT_EQ(c.rho, (std::vector<double>{1.2}));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_THROW(c.merge_json(json::parse(R"({"delta": "wide"})")), ConfigError);
}

TEST(Experiments, RatesRefusesShortMemory) {
  ExperimentConfig c;
  c.experiment = "rates";
  c.d = 0.0;
  c.out_dir = scratch_dir("rates0").string();
  EXPECT_THROW(run_rates(c), ConfigError);
}

TEST(Experiments, OmegaCompareWhiteNoiseIsZero) {
  ExperimentConfig c;
  c.experiment = "omega-compare";
  c.symbol_path = std::string(TLM_DATA_DIR) + "/symbols/white2.json";
  c.n_grid = {8, 16};
  c.out_dir = scratch_dir("omega_white").string();
  const auto rep = run_omega_compare(c);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.checks[1].value, 0.0);
}

TEST(Experiments, VerifyPassesAndWritesReports) {
  ExperimentConfig c;
  c.experiment = "verify";
  c.out_dir = scratch_dir("verify").string();
  const auto rep = run_verify(c);
  EXPECT_TRUE(rep.passed());
  const json j = json::parse(slurp(fs::path(c.out_dir) / "verify.json"));
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(Experiments, OutputIsDeterministic) {
  ExperimentConfig c;
  c.experiment = "predictor";
  c.n_grid = {16, 23, 32};
  c.out_dir = scratch_dir("det1").string();
  run_predictor(c);
  const std::string first = slurp(fs::path(c.out_dir) / "predictor.csv");
  const std::string first_json = slurp(fs::path(c.out_dir) / "predictor.json");
  c.out_dir = scratch_dir("det2").string();
  run_predictor(c);
  EXPECT_EQ(first, slurp(fs::path(c.out_dir) / "predictor.csv"));
  EXPECT_EQ(first_json, slurp(fs::path(c.out_dir) / "predictor.json"));
}

TEST(Experiments, BaxterRejectsRhoOutsideClass) {
  ExperimentConfig c;
  c.experiment = "baxter";
  c.rho = {0.4};
  c.n_grid = {16, 32};
  c.out_dir = scratch_dir("bax").string();
  EXPECT_THROW(run_baxter(c), ConfigError);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("cli");
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_EQ(run_cli("verify --out " + (dir / "o").string()), 0);
  EXPECT_EQ(run_cli("verify --symbol " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("rates --delta 0.9"), 2);
  EXPECT_EQ(run_cli("rates --d 0"), 2);
  EXPECT_EQ(run_cli("nonsense"), 2);
  EXPECT_EQ(run_cli("predictor --n-grid 16,32 --slope-tol 1e-9 --out " + (dir / "o").string()), 1);
}
