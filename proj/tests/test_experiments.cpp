#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "coherelab/experiments.hpp"
#include "coherelab/qstate.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace coherelab;
using nlohmann::json;

namespace {

struct Run {
  ExitCode code;
  std::string out;
  std::string err;
};

Run run(const ExperimentConfig& c) {
  std::ostringstream out, err;
  const ExitCode code = run_experiment(c, out, err);
  return {code, out.str(), err.str()};
}

ExperimentConfig config(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  return c;
}

std::string temp_path(const std::string& name) { return "coherelab_test_" + name; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

int shell(const std::string& args) {
  const std::string cmd = std::string(COHERELAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("seed resolution") {
  CHECK(resolve_seed(std::uint64_t{9}, "5") == 9);
  CHECK(resolve_seed(std::nullopt, "5") == 5);
  CHECK(resolve_seed(std::nullopt, nullptr) == kDefaultSeed);
  CHECK(resolve_seed(std::nullopt, "") == kDefaultSeed);
  CHECK_THROWS_AS(resolve_seed(std::nullopt, "abc"), Error);
}

TEST_CASE("dimension lists") {
  CHECK(parse_dims("2,3,4,5") == std::vector<int>{2, 3, 4, 5});
  CHECK(parse_dims("2-5") == std::vector<int>{2, 3, 4, 5});
  CHECK(parse_dims("2,7-8") == std::vector<int>{2, 7, 8});
  CHECK_THROWS_AS(parse_dims("2,,3"), Error);
  CHECK_THROWS_AS(parse_dims("5-2"), Error);
}

TEST_CASE("sweep output is deterministic and ordered") {
  ExperimentConfig c = config("sweep");
  c.dims = {2};
  c.samples = 1;
  const Run a = run(c);
  const Run b = run(c);
  CHECK(a.code == ExitCode::Pass);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 2);

  c.dims = {2, 3, 4, 5};
  c.samples = 50;
  c.workers = 1;
  const Run serial = run(c);
  c.workers = 3;
  const Run parallel = run(c);
  CHECK(serial.out == parallel.out);
  CHECK(std::count(serial.out.begin(), serial.out.end(), '\n') == 201);

  std::istringstream lines(serial.out);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line.rfind("2,0,", 0) == 0);

  c.seed = 43;
  CHECK(run(c).out != serial.out);
}

TEST_CASE("sweep rows lie on the linear-entropy tradeoff line") {
  ExperimentConfig c = config("sweep");
  c.samples = 200;
  c.format = "json";
  const Run r = run(c);
  REQUIRE(r.code == ExitCode::Pass);
  const json rows = json::parse(r.out);
  CHECK(rows.size() == 800);
  for (const auto& row : rows) {
    const double d = row.at("dim").get<double>();
    const double x = row.at("M_l").get<double>();
    const double m = row.at("max_l2").get<double>();
    CHECK(std::abs(x + m * m * d / (d - 1.0) - 1.0) < 1e-10);
  }
}

TEST_CASE("usage errors exit with 2 and a JSON error") {
  ExperimentConfig c = config("sweep");
  c.dims = {17};
  Run r = run(c);
  CHECK(r.code == ExitCode::UsageError);
  CHECK(json::parse(r.err).at("error") == "UsageError");

  c = config("sweep");
  c.samples = 0;
  CHECK(run(c).code == ExitCode::UsageError);
  c = config("verify");
  c.format = "csv";
  CHECK(run(c).code == ExitCode::UsageError);
  c = config("plot");
  CHECK(run(c).code == ExitCode::UsageError);
  c = config("maximize");
  c.dims = {3};
  c.budget = 100;
  CHECK(run(c).code == ExitCode::UsageError);
}

TEST_CASE("verify reports an invalid injected state") {
  const std::string path = temp_path("bad_state.json");
  write_file(path, R"({"dim": 2, "re": [[0.5, 0.0], [0.0, 0.4]], "im": [[0, 0], [0, 0]]})");
  ExperimentConfig c = config("verify");
  c.state_path = path;
  c.samples = 5;
  const Run r = run(c);
  CHECK(r.code != ExitCode::Pass);
  CHECK(r.code == ExitCode::UsageError);
  CHECK(json::parse(r.err).at("error") == "TraceFarFromOne");
  CHECK(r.out.empty());

  c.state_path = temp_path("missing.json");
  CHECK(run(c).code == ExitCode::UsageError);
  std::remove(path.c_str());
}

TEST_CASE("verify passes and its verdict does not depend on the seed") {
  ExperimentConfig c = config("verify");
  c.samples = 40;
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    c.seed = seed;
    const Run r = run(c);
    CHECK(r.code == ExitCode::Pass);
    const json j = json::parse(r.out);
    CHECK(j.at("pass") == true);
    for (const char* suite : {"residuals", "inequalities", "durr_triality", "continuity"}) {
      CHECK(j.at("suites").at(suite).at("pass") == true);
    }
  }
}

TEST_CASE("average command") {
  ExperimentConfig c = config("average");
  c.dims = {3};
  c.samples = 10000;
  Run r = run(c);
  CHECK(r.code == ExitCode::Pass);
  json j = json::parse(r.out);
  const json q = j.at("results").at(0).at("quantities");
  for (const char* key : {"rms_l2", "avg_r", "avg_sk"}) CHECK(std::abs(q.at(key).at("z").get<double>()) <= 4.0);

  c.samples = 20000;
  const json q2 = json::parse(run(c).out).at("results").at(0).at("quantities");
  for (const char* key : {"rms_l2", "avg_r", "avg_sk"}) {
    const double ratio = q.at(key).at("std_error").get<double>() / q2.at(key).at("std_error").get<double>();
    CHECK(ratio > 1.2);
    CHECK(ratio < 1.7);
  }

  const std::string path = temp_path("mixed.json");
  write_file(path, R"({"dim": 2, "re": [[0.5, 0.0], [0.0, 0.5]]})");
  c.state_path = path;
  c.samples = 1000;
  r = run(c);
  CHECK(r.code == ExitCode::Pass);
  j = json::parse(r.out);
  for (const char* key : {"rms_l2", "avg_r", "avg_sk"}) {
    CHECK(std::abs(j.at("results").at(0).at("quantities").at(key).at("estimate").get<double>()) < 1e-12);
  }
  std::remove(path.c_str());
}

TEST_CASE("maximize command") {
  ExperimentConfig c = config("maximize");
  c.dims = {2, 3, 4};
  const Run r = run(c);
  CHECK(r.code == ExitCode::Pass);
  const json j = json::parse(r.out);
  for (const auto& row : j.at("results")) {
    for (const char* kind : {"l2", "relative_entropy", "skew_information"}) {
      const json& k = row.at("kinds").at(kind);
      CHECK(std::abs(k.at("gap").get<double>()) < 1e-6);
      CHECK(k.at("witness_gap").get<double>() < 1e-10);
    }
    const json& l1 = row.at("kinds").at("l1");
    CHECK(l1.at("lower_bound").get<double>() <= l1.at("cap").get<double>() + 1e-9);
  }
}

TEST_CASE("state command") {
  ExperimentConfig c = config("state");
  c.dims = {4};
  c.samples = 2;
  c.seed = 7;
  const Run a = run(c);
  CHECK(a.code == ExitCode::Pass);
  CHECK(a.out == run(c).out);
  const json states = json::parse(a.out);
  REQUIRE(states.size() == 2);
  for (const auto& s : states) {
    const std::vector<double> spec = s.at("spectrum").get<std::vector<double>>();
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      sum += spec[i];
      if (i > 0) CHECK(spec[i - 1] >= spec[i]);
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (const char* key : {"residual_t1_rms", "residual_t1_max", "residual_t2_avg", "residual_t2_max",
                            "residual_t3_avg", "residual_t3_max"}) {
      CHECK(std::abs(s.at("report").at(key).get<double>()) < 1e-10);
    }
  }
}

TEST_CASE("output file and IO errors") {
  const std::string path = temp_path("sweep.csv");
  ExperimentConfig c = config("sweep");
  c.dims = {2};
  c.samples = 3;
  c.out = path;
  CHECK(run(c).code == ExitCode::Pass);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header.rfind("dim,sample,", 0) == 0);
  std::remove(path.c_str());

  c.out = "/nonexistent-dir/out.csv";
  const Run r = run(c);
  CHECK(r.code == ExitCode::UsageError);
  CHECK(json::parse(r.err).at("error") == "IoError");
}

TEST_CASE("command-line exit codes") {
  CHECK(shell("sweep --dims 2 --samples 2") == 0);
  CHECK(shell("sweep --dims 1") == 2);
  CHECK(shell("sweep --bogus") == 2);
  CHECK(shell("") == 2);
  CHECK(shell("state --format csv") == 2);
  CHECK(shell("sweep --samples notanumber") == 2);
  CHECK(shell("verify --samples 3 --state /nonexistent.json") == 2);
}

TEST_CASE("environment seed fallback") {
  const std::string a = temp_path("env_a.json");
  const std::string b = temp_path("env_b.json");
  const std::string cli = COHERELAB_CLI_PATH;
  CHECK(std::system(("COHERELAB_SEED=5 " + cli + " state --dims 2 --out " + a).c_str()) == 0);
  CHECK(std::system((cli + " state --dims 2 --seed 5 --out " + b).c_str()) == 0);
  std::ifstream fa(a), fb(b);
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(!sa.empty());
  CHECK(sa == sb);
  CHECK(std::system(("COHERELAB_SEED=x " + cli + " state --dims 2 > /dev/null 2>&1").c_str()) != 0);
  std::remove(a.c_str());
  std::remove(b.c_str());
}
