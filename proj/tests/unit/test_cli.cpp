#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "critball/cli/commands.hpp"

using namespace critball;
using namespace critball::cli;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
    dir_ = fs::temp_directory_path() / ("critball_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name)) << content;
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  int run_cmd(const std::string& cmd, Options o) {
    out_.str("");
    err_.str("");
    return run(cmd, o, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

Options with_config(const std::string& cfg) {
  Options o;
  o.config = cfg;
  return o;
}

}  // namespace

// ------------------------------------------------------------------ config

TEST(Config, RoundTripDefaults) {
  const io::RunConfig c;
  EXPECT_EQ(io::parse_config(io::emit(c)), c);
}

TEST(Config, RoundTripTablesAndOverrides) {
  io::RunConfig c;
  c.R = 2.0;
  c.a.kind = io::CoefficientSpec::Kind::table;
  c.a.r = {0.0, 0.5, 1.0, 1.5, 2.0};
  c.a.values = {-0.5, -0.4, -0.3, -0.2, -0.1};
  c.V = io::CoefficientSpec::constant(-2.0);
  c.eps_ladder = {0.1, 0.05};
  c.probes = {0.5, 1.0};
  c.verify.values["rate"] = 0.05;
  c.bubbletest.a_values = {io::CoefficientSpec::constant(-1.0)};
  c.output.records = "out/r.jsonl";
  io::apply_override(c, "shoot=1e-9");
  io::apply_override(c, "alpha=0.1");
  EXPECT_EQ(c.tolerances.shoot, 1e-9);
  EXPECT_EQ(c.verify.values.at("alpha"), 0.1);
  EXPECT_EQ(io::parse_config(io::emit(c)), c);
}

TEST(Config, IncreasingLadderNamesFieldAndLine) {
  const std::string text = "{\n  \"domain\": {\"R\": 1},\n  \"eps_ladder\": [0.01, 0.02]\n}\n";
  try {
    io::parse_config(text, "cfg.json");
    FAIL() << "accepted an increasing ladder";
  } catch (const io::ConfigError& e) {
    EXPECT_EQ(e.field(), "eps_ladder");
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("cfg.json:3"), std::string::npos);
  }
}

TEST(Config, RejectsBadDocuments) {
  auto field_of = [](const std::string& text) {
    try {
      io::parse_config(text);
    } catch (const io::ConfigError& e) {
      return e.field();
    }
    return std::string("(accepted)");
  };
  EXPECT_EQ(field_of(R"({"domian": {"R": 1}})"), "domian");
  EXPECT_EQ(field_of(R"({"domain": {"R": -1}})"), "domain.R");
  EXPECT_EQ(field_of(R"({"a": "subcritical"})"), "a");
  EXPECT_EQ(field_of(R"({"V": "critical"})"), "V");
  EXPECT_EQ(field_of(R"({"a": {"table": {"r": [0, 0.5, 0.4, 1], "values": [1, 1, 1, 1]}}})"), "a.table");
  EXPECT_EQ(field_of(R"({"a": {"table": {"r": [0, 0.2, 0.4, 0.6], "values": [1, 1, 1, 1]}}})"), "a.table.r");
  EXPECT_EQ(field_of(R"({"eps_ladder": [0.1, -0.1]})"), "eps_ladder");
  EXPECT_EQ(field_of(R"({"tolerances": {"ode": 0.1}})"), "tolerances.ode");
  EXPECT_EQ(field_of(R"({"probes": [0.5, 1.5]})"), "probes");
  EXPECT_EQ(field_of(R"({"verify": {"speed": 1}})"), "verify.speed");
  EXPECT_EQ(field_of(R"({"lmax": 1.5})"), "lmax");
  EXPECT_EQ(field_of("{\"a\": 1,,}"), "(document)");
  io::RunConfig c;
  EXPECT_THROW(io::apply_override(c, "nonsense=1"), io::ConfigError);
  EXPECT_THROW(io::apply_override(c, "rate"), io::ConfigError);
  EXPECT_THROW(io::apply_override(c, "rate=abc"), io::ConfigError);
}

TEST(Config, HashCoversOnlyRecordInputs) {
  io::RunConfig a, b;
  b.eps_ladder = {0.1, 0.05, 0.02};
  b.output.records = "elsewhere.jsonl";
  b.verify.values["rate"] = 0.5;
  EXPECT_EQ(io::config_hash(a), io::config_hash(b));
  b.tolerances.ode = 1e-11;
  EXPECT_NE(io::config_hash(a), io::config_hash(b));
  io::RunConfig c;
  c.V = io::CoefficientSpec::constant(-2.0);
  EXPECT_NE(io::config_hash(a), io::config_hash(c));
}

TEST(Provenance, DigestAndTimestamp) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  EXPECT_EQ(io::timestamp(), "1970-01-01T00:00:00Z");
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  EXPECT_EQ(io::timestamp(), "2023-11-14T22:13:20Z");
}

TEST(Records, RoundTrip) {
  asympt::SweepRecord r;
  r.eps = 0.01;
  r.lambda = 1543.7588331234567;
  r.alpha = 1.0010997;
  r.sobolev_quotient = 5.4779;
  const auto l = io::parse_line(io::ok_line(r, "h"));
  ASSERT_TRUE(l.ok);
  EXPECT_EQ(l.record->lambda, r.lambda);
  EXPECT_EQ(l.record->alpha, r.alpha);
  EXPECT_EQ(l.config_hash, "h");
  const auto f = io::parse_line(io::failure_line(0.5, RegimeError("outside"), "h"));
  EXPECT_FALSE(f.ok);
  EXPECT_EQ(f.error_kind, "RegimeError");
}

TEST(Table, CsvMirrorsText) {
  Table t{{"a", "b"}, {}};
  t.add({"x,y", "1"});
  EXPECT_EQ(t.csv(), "a,b\n\"x,y\",1\n");
  EXPECT_NE(t.text().find("x,y"), std::string::npos);
}

// ------------------------------------------------------------------ commands

TEST_F(Cli, GreensCriticalAndQv) {
  const auto cfg = write("c.json", R"({"domain": {"R": 1}, "a": "critical", "V": -1})");
  auto o = with_config(cfg);
  o.format = "json";
  o.out = path("greens");
  ASSERT_EQ(run_cmd("greens", o), 0) << err_.str();
  const auto j = io::json::parse(slurp(path("greens.json")));
  EXPECT_NEAR(j["a_star"].get<double>(), -pi * pi / 4, 1e-10);
  EXPECT_NEAR(j["qv"].get<double>(), -2 * pi, 1e-8);
  EXPECT_NEAR(j["phi_a0"].get<double>(), 0.0, 1e-10);
  EXPECT_TRUE(j["criticality"]["nondegeneracy"].get<bool>());
  EXPECT_TRUE(fs::exists(path("greens.csv")));
  EXPECT_EQ(run_cmd("critical", o), 0);
  EXPECT_NEAR(io::json::parse(out_.str())["a_star"].get<double>(), -2.4674011002723395, 1e-12);
  EXPECT_EQ(run_cmd("qv", o), 0);
  EXPECT_NEAR(io::json::parse(out_.str())["qv"].get<double>(), -6.283185307179586, 1e-8);
}

TEST_F(Cli, ValidationExitCodes) {
  const auto bad = write("bad.json", "{\n\"eps_ladder\": [0.01, 0.02]\n}");
  EXPECT_EQ(run_cmd("sweep", with_config(bad)), exit_validation);
  EXPECT_NE(err_.str().find("eps_ladder"), std::string::npos);
  EXPECT_NE(err_.str().find(":2"), std::string::npos);
  EXPECT_EQ(run_cmd("solve", Options{}), exit_validation);
  EXPECT_EQ(run_cmd("nonsense", Options{}), exit_validation);
  Options o;
  o.overrides = {"bogus=1"};
  EXPECT_EQ(run_cmd("critical", o), exit_validation);
}

TEST_F(Cli, SolveSingleRung) {
  Options o;
  o.eps = 0.02;
  o.format = "json";
  ASSERT_EQ(run_cmd("solve", o), 0) << err_.str();
  const auto j = io::json::parse(out_.str());
  EXPECT_NEAR(j["record"]["M"].get<double>(), 27.775627, 1e-5);
}

TEST_F(Cli, SweepIsDeterministicAndResumable) {
  Options o;
  o.out = path("r1.jsonl");
  ASSERT_EQ(run_cmd("sweep", o), 0) << err_.str();
  const auto first = slurp(path("r1.jsonl"));

  // Four records with increasing lambda.
  const auto f = io::read_records(path("r1.jsonl"));
  ASSERT_EQ(f.lines.size(), 4u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_GT(f.lines[i].record->lambda, f.lines[i - 1].record->lambda);

  ASSERT_EQ(run_cmd("sweep", o), 0);
  EXPECT_EQ(slurp(path("r1.jsonl")), first);

  // Interrupted: two complete lines and a partial third.
  std::istringstream in(first);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  write("r2.jsonl", l1 + "\n" + l2 + "\n" + l3.substr(0, l3.size() / 2));
  o.out = path("r2.jsonl");
  o.resume = true;
  ASSERT_EQ(run_cmd("sweep", o), 0);
  EXPECT_EQ(slurp(path("r2.jsonl")), first);
  EXPECT_NE(err_.str().find("malformed line 3"), std::string::npos);

  o.out = path("r3.jsonl");
  o.resume = false;
  o.workers = 3;
  ASSERT_EQ(run_cmd("sweep", o), 0);
  EXPECT_EQ(slurp(path("r3.jsonl")), first);
}

TEST_F(Cli, VerifyCanonicalAndInsufficientData) {
  Options o;
  o.out = path("r.jsonl");
  ASSERT_EQ(run_cmd("sweep", o), 0);
  Options v;
  v.records = path("r.jsonl");
  v.out = path("rep");
  EXPECT_EQ(run_cmd("verify", v), exit_ok) << out_.str();
  const auto j = io::json::parse(slurp(path("rep.json")));
  EXPECT_TRUE(j["rate"]["pass"].get<bool>());
  EXPECT_NEAR(j["rate"]["value"].get<double>(), pi * pi * pi / 2, 0.02 * pi * pi * pi / 2);
  EXPECT_EQ(j["records"].size(), 4u);
  // CSV mirrors the text table: same number of rows.
  const auto csv = slurp(path("rep.csv")), txt = slurp(path("rep.txt"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n') + 1, std::count(txt.begin(), txt.end(), '\n'));

  std::istringstream in(slurp(path("r.jsonl")));
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  v.records = write("two.jsonl", l1 + "\n" + l2 + "\n");
  EXPECT_EQ(run_cmd("verify", v), exit_verification);
  EXPECT_NE(err_.str().find("insufficient data"), std::string::npos);

  // Records of another config are refused.
  v.overrides = {"shoot=1e-9"};
  v.records = path("r.jsonl");
  EXPECT_EQ(run_cmd("verify", v), exit_validation);

  Options r;
  r.records = path("r.jsonl");
  EXPECT_EQ(run_cmd("report", r), exit_ok);
  EXPECT_NE(out_.str().find("eps*lambda"), std::string::npos);
}

TEST_F(Cli, VanishingPotentialReportsInfiniteRate) {
  const auto cfg = write("v0.json", R"({"V": 0, "eps_ladder": [0.04, 0.02, 0.01]})");
  io::RunConfig c = io::load_config(cfg);
  const auto hash = io::config_hash(c);
  std::string lines;
  for (double eps : c.eps_ladder) {
    asympt::SweepRecord r;
    r.eps = eps;
    r.lambda = 20.0 / (eps * eps);  // eps*lambda grows without bound
    r.eps_lambda = eps * r.lambda;
    r.alpha = 1.0;
    lines += io::ok_line(r, hash) + "\n";
  }
  auto o = with_config(cfg);
  o.records = write("v0.jsonl", lines);
  o.out = path("rep");
  run_cmd("verify", o);
  const auto j = io::json::parse(slurp(path("rep.json")));
  EXPECT_TRUE(j["rate"]["infinite"].get<bool>());
  EXPECT_EQ(j["rate"]["target"].get<std::string>(), "inf");
  EXPECT_TRUE(j["rate"]["pass"].get<bool>());
  EXPECT_NE(out_.str().find("inf"), std::string::npos);
}

TEST_F(Cli, FailedRungsAreRecorded) {
  // a = 0 is subcritical: every rung is outside the existence regime.
  const auto cfg = write("sub.json", R"({"a": 0, "eps_ladder": [0.04, 0.02]})");
  auto o = with_config(cfg);
  o.out = path("r.jsonl");
  EXPECT_EQ(run_cmd("sweep", o), exit_numerical);
  const auto f = io::read_records(path("r.jsonl"));
  ASSERT_EQ(f.lines.size(), 2u);
  for (const auto& l : f.lines) {
    EXPECT_FALSE(l.ok);
    EXPECT_EQ(l.error_kind, "RegimeError");
  }
}

TEST_F(Cli, BubbleTestSmallLadder) {
  const auto cfg = write("bt.json", R"({"bubbletest": {"points": 5, "a_values": ["critical"]}})");
  auto o = with_config(cfg);
  o.out = path("bt");
  EXPECT_EQ(run_cmd("bubbletest", o), exit_ok) << out_.str();
  const auto j = io::json::parse(slurp(path("bt.json")));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["b3"][0]["fits"].size(), 5u);
  const auto txt = slurp(path("bt.txt"));
  EXPECT_NE(txt.find("int t^4/(1+t^2)^3"), std::string::npos);
  EXPECT_NE(txt.find("lambda^2 int U^4 (dlU)^2"), std::string::npos);
}
