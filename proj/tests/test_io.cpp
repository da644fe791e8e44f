#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "helpers.hpp"
#include "kothe/experiment.hpp"
#include "kothe/io.hpp"

using namespace kothe;
using kothe::testing::mu;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path config(const std::string& name) { return std::filesystem::path(KOTHE_CONFIG_DIR) / name; }

RunOutcome run_config(const std::string& name, RunOptions opt = {}) {
  const auto p = config(name);
  return run_experiment_text(slurp(p), p.string(), opt);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

const char* kWeightConfig = R"({
  "schema_version": 1,
  "task": "weight",
  "operator": {
    "matrix": [[1], [1]],
    "domain": {"kind": "B", "dim": 1, "inner": {"p": 2}},
    "codomain": {"kind": "C", "space": {"type": "lp", "p": 1}, "measure": [1, 1]}
  },
  "weight": {"r": 2, "constant": 2}
})";

}  // namespace

TEST(Json, SpaceRoundTrip) {
  const auto m1 = mu({1, 2}), m2 = mu({1, 0.5});
  const auto flat = mu({1, 2, 0.5, 1});
  const std::vector<std::pair<SpaceDescriptor, DiscreteMeasure>> spaces{
      {SpaceDescriptor::lp(0.5), flat},
      {SpaceDescriptor::lp(kInf), flat},
      {SpaceDescriptor::mixed(1, kInf, m1, m2), product_measure(m1, m2)},
      {SpaceDescriptor::lorentz(3, 2), flat},
      {SpaceDescriptor::orlicz(YoungFunction::power_log(2)), flat},
      {SpaceDescriptor::power(SpaceDescriptor::lorentz(2, 4), 0.5), flat},
      {dual_space(SpaceDescriptor::lp(3)), flat},
  };
  Rng rng(90);
  for (const auto& [s, m] : spaces) {
    const io::json j = io::to_json(s);
    const auto back = io::space_from_json(io::json::parse(j.dump()));
    EXPECT_EQ(back.name(), s.name());
    for (int k = 0; k < 5; ++k) {
      const Vec x = random_signed(rng, m.size());
      EXPECT_EQ(norm(back, x, m), norm(s, x, m)) << s.name();
    }
  }
}

TEST(Json, InfinityIsAString) {
  EXPECT_EQ(io::number(kInf).dump(), "\"inf\"");
  EXPECT_EQ(io::number(-kInf).dump(), "\"-inf\"");
  EXPECT_EQ(io::to_json(SpaceDescriptor::lp(kInf))["p"], "inf");
}

TEST(Json, CertificateRoundTripVerifies) {
  const auto op = kothe::testing::r_to_l1();
  const auto cert = solve_weight_pair(op, 2.0, 2.0);
  const auto doc = io::parse_document(io::to_json(cert).dump(2), "cert.json");
  const auto back = io::read_weight_certificate(io::Node(doc));
  EXPECT_EQ(back.omega2, cert.omega2);
  EXPECT_EQ(back.r, cert.r);
  EXPECT_EQ(back.constant, cert.constant);
  EXPECT_EQ(back.codomain_concavity.value, cert.codomain_concavity.value);
  EXPECT_TRUE(verify_weight_certificate(back, op).passed());
}

TEST(Config, ErrorsCarryTheLine) {
  std::string text = kWeightConfig;
  text.replace(text.find("\"p\": 1"), 6, "\"p\": -1");
  const auto out = run_experiment_text(text, "bad.json");
  EXPECT_EQ(out.exit_code, 2);
  EXPECT_EQ(out.message.rfind("bad.json:7: /operator/codomain/space", 0), 0u) << out.message;
}

TEST(Config, UnknownFieldRejectedAtItsKey) {
  std::string text = kWeightConfig;
  text.replace(text.find("\"constant\": 2"), 13, "\"constant\": 2,\n    \"tolerence\": 1e-6");
  const auto out = run_experiment_text(text, "bad.json");
  EXPECT_EQ(out.exit_code, 2);
  EXPECT_NE(out.message.find("bad.json:10:"), std::string::npos) << out.message;
  EXPECT_NE(out.message.find("tolerence"), std::string::npos);
}

TEST(Config, InvalidJsonReportsLine) {
  std::string text = kWeightConfig;
  text.replace(text.find("\"weight\": {"), 8, "weight");
  const auto out = run_experiment_text(text, "bad.json");
  EXPECT_EQ(out.exit_code, 2);
  EXPECT_EQ(out.message.rfind("bad.json:9:", 0), 0u) << out.message;
}

TEST(Config, SubcommandMustMatchTask) {
  RunOptions opt;
  opt.task = "pietsch";
  EXPECT_EQ(run_experiment_text(kWeightConfig, "w.json", opt).exit_code, 2);
  opt.task = "weight";
  EXPECT_EQ(run_experiment_text(kWeightConfig, "w.json", opt).exit_code, 0);
}

TEST(Config, SchemaVersionChecked) {
  std::string text = kWeightConfig;
  text.replace(text.find("\"schema_version\": 1"), 19, "\"schema_version\": 7");
  EXPECT_EQ(run_experiment_text(text, "v.json").exit_code, 2);
}

TEST(Experiments, ShippedConfigsExitCodes) {
  const std::map<std::string, int> expected{
      {"weight_r_to_l1.json", 0},      {"weight_constant_too_small.json", 1}, {"norm_table.json", 0},
      {"constants.json", 0},           {"pietsch_identity.json", 0},          {"pietsch_estimate.json", 0},
      {"minimax_l1_pair.json", 0},     {"vv_weight.json", 0},                 {"verify_r_to_l1.json", 0},
      {"verify_halved_weight.json", 1},
  };
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(KOTHE_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto it = expected.find(entry.path().filename().string());
    ASSERT_NE(it, expected.end()) << "no expectation for " << entry.path();
    ++seen;
    const auto out = run_config(it->first);
    EXPECT_EQ(out.exit_code, it->second) << it->first << ": " << out.message;
  }
  EXPECT_EQ(seen, expected.size());
}

TEST(Experiments, ReportsAreDeterministic) {
  for (const char* name : {"weight_r_to_l1.json", "constants.json", "pietsch_estimate.json", "minimax_l1_pair.json"}) {
    const auto a = run_config(name), b = run_config(name);
    EXPECT_EQ(report_text(a), report_text(b)) << name;
  }
}

TEST(Experiments, SeedOverride) {
  RunOptions opt;
  opt.seed = 123;
  const auto out = run_config("weight_r_to_l1.json", opt);
  EXPECT_EQ(out.report["seed"].get<std::uint64_t>(), 123u);
  EXPECT_NE(summary_text(out).find(",123,"), std::string::npos);
}

TEST(Experiments, CsvRowsMatchReportSummaries) {
  const auto out = run_config("weight_r_to_l1.json");
  std::vector<io::json> rows;
  for (const auto& r : out.report["results"])
    for (const auto& s : r["summary"]) rows.push_back(s);
  std::stringstream csv(summary_text(out));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "task,space,r,value,residual,status,seed,wall_ms");
  std::size_t k = 0;
  for (; std::getline(csv, line); ++k) {
    ASSERT_LT(k, rows.size());
    const auto f = split(line);
    ASSERT_EQ(f.size(), 8u);
    EXPECT_EQ(f[0], rows[k]["task"].get<std::string>());
    EXPECT_EQ(f[1], rows[k]["space"].get<std::string>());
    EXPECT_EQ(f[2], rows[k]["r"].dump());
    EXPECT_EQ(f[3], rows[k]["value"].dump());
    EXPECT_EQ(f[4], rows[k]["residual"].dump());
    EXPECT_EQ(f[5], rows[k]["status"].get<std::string>());
    EXPECT_EQ(f[6], std::to_string(out.report["seed"].get<std::uint64_t>()));
  }
  EXPECT_EQ(k, rows.size());
  EXPECT_EQ(k, 3u);  // weight, verify, factorization
}

TEST(Experiments, VerifyReadsReportFromDisk) {
  const auto dir = std::filesystem::temp_directory_path() / "kothe_io_test";
  std::filesystem::remove_all(dir);
  RunOptions opt;
  opt.out_dir = dir.string();
  opt.quiet = true;
  const auto w = run_experiment(config("weight_r_to_l1.json").string(), opt);
  ASSERT_EQ(w.exit_code, 0);
  ASSERT_TRUE(std::filesystem::exists(w.report_path));
  ASSERT_TRUE(std::filesystem::exists(w.summary_path));
  const std::string verify = R"({
    "schema_version": 1,
    "task": "verify",
    "operator": {
      "matrix": [[1], [1]],
      "domain": {"kind": "B", "dim": 1, "inner": {"p": 2}},
      "codomain": {"kind": "C", "space": {"type": "lp", "p": 1}, "measure": [1, 1]}
    },
    "certificate_file": ")" + w.report_path.filename().string() + R"("
  })";
  const auto cfg = dir / "verify.json";
  std::ofstream(cfg) << verify;
  opt.out_dir = (dir / "v").string();
  EXPECT_EQ(run_experiment(cfg.string(), opt).exit_code, 0);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, MissingFileIsConfigError) {
  const auto out = run_experiment("/nonexistent/config.json");
  EXPECT_EQ(out.exit_code, 2);
}
