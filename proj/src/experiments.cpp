#include "coherelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "coherelab/closedforms.hpp"
#include "coherelab/measures.hpp"
#include "coherelab/qstate.hpp"
#include "coherelab/serialize.hpp"
#include "coherelab/verify.hpp"

namespace coherelab {

namespace {

// Stream indices below 100 are the per-dimension state streams.
constexpr std::uint64_t kInequalityStream = 100;
constexpr std::uint64_t kContinuityStream = 200;
constexpr std::uint64_t kAverageStream = 300;
constexpr std::uint64_t kMaximizeStream = 400;

constexpr long kContinuitySpectra = 100;
constexpr long kBasesPerState = 10;
constexpr double kAverageZLimit = 4.0;
constexpr double kExactTolerance = 1e-10;
constexpr double kAttainTolerance = 1e-6;
constexpr double kExceedTolerance = 1e-9;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs body(i) for i in [0, n) on `workers` threads. Results must be written
/// by index; the first failing index (lowest) is rethrown.
template <class Body>
void parallel_for(long n, int workers, Body&& body) {
  if (workers <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n));
  std::atomic<long> next{0};
  auto run = [&] {
    for (long i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        failures[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<long>(workers, n));
  pool.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

RngStream state_stream(std::uint64_t seed, int d, long sample) {
  return RngStream(seed, static_cast<std::uint64_t>(d)).substream(static_cast<std::uint64_t>(sample));
}

DensityMatrix load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open state file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("state file: ") + e.what());
  }
  return density_from_json(j);
}

long samples_or(const ExperimentConfig& c, long fallback) { return c.samples.value_or(fallback); }

long budget_for(const ExperimentConfig& c, int d) { return c.budget.value_or(5000L * d * d); }

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---------------------------------------------------------------------------

struct Outcome {
  bool pass = true;
};

Outcome cmd_sweep(const ExperimentConfig& c, std::ostream& out) {
  const long n = samples_or(c, 10000);
  const ResidualTolerances tol = c.tolerance ? ResidualTolerances::uniform(*c.tolerance) : ResidualTolerances{};
  const long per_dim = n;
  const long total = per_dim * static_cast<long>(c.dims.size());
  std::vector<TradeoffReport> reports(static_cast<std::size_t>(total));
  parallel_for(total, c.workers, [&](long i) {
    const int d = c.dims[static_cast<std::size_t>(i / per_dim)];
    RngStream rng = state_stream(c.seed, d, i % per_dim);
    reports[static_cast<std::size_t>(i)] = tradeoff_report(random_qudit_state(d, rng));
  });

  Outcome outcome;
  for (const auto& r : reports) outcome.pass = outcome.pass && tol.accepts(r);

  if (c.format.value_or("csv") == "csv") {
    out << sweep_csv_header() << '\n';
    for (long i = 0; i < total; ++i) out << sweep_csv_row(i % per_dim, reports[static_cast<std::size_t>(i)]) << '\n';
  } else {
    Json rows = Json::array();
    for (long i = 0; i < total; ++i) {
      Json row = to_json(reports[static_cast<std::size_t>(i)]);
      row["sample"] = i % per_dim;
      rows.push_back(std::move(row));
    }
    out << rows.dump(2) << '\n';
  }
  return outcome;
}

Outcome cmd_verify(const ExperimentConfig& c, std::ostream& out) {
  const long n = samples_or(c, 1000);
  const ResidualTolerances tol = c.tolerance ? ResidualTolerances::uniform(*c.tolerance) : ResidualTolerances{};
  const double violation_tol = c.tolerance.value_or(kExactTolerance);

  std::vector<TradeoffReport> reports;
  if (c.state_path) reports.push_back(tradeoff_report(load_state(*c.state_path)));

  // Residual suite.
  const long per_dim = n;
  const long total = per_dim * static_cast<long>(c.dims.size());
  const std::size_t offset = reports.size();
  reports.resize(offset + static_cast<std::size_t>(total));
  parallel_for(total, c.workers, [&](long i) {
    const int d = c.dims[static_cast<std::size_t>(i / per_dim)];
    RngStream rng = state_stream(c.seed, d, i % per_dim);
    reports[offset + static_cast<std::size_t>(i)] = tradeoff_report(random_qudit_state(d, rng));
  });
  long residual_failures = 0;
  std::array<double, 6> worst{};
  for (const auto& r : reports) {
    if (!tol.accepts(r)) ++residual_failures;
    const auto res = r.residuals();
    for (std::size_t k = 0; k < res.size(); ++k) worst[k] = std::max(worst[k], std::abs(res[k]));
  }
  const bool residuals_pass = residual_failures == 0;

  // Inequality and triality suites, one sweep per dimension.
  std::vector<TradeoffSweepSummary> sweeps(c.dims.size());
  SweepOptions opts;
  opts.violation_tolerance = violation_tol;
  parallel_for(static_cast<long>(c.dims.size()), c.workers, [&](long i) {
    const int d = c.dims[static_cast<std::size_t>(i)];
    sweeps[static_cast<std::size_t>(i)] =
        inequality_sweep(d, n, kBasesPerState, RngStream(c.seed, kInequalityStream + static_cast<std::uint64_t>(d)),
                         opts);
  });
  bool inequalities_pass = true;
  long triality_violations = 0;
  double triality_worst = 0.0;
  Json per_dim_json = Json::array();
  for (const auto& s : sweeps) {
    for (const auto& [name, count] : s.violations) {
      if (name == "durr_triality") {
        triality_violations += count;
        triality_worst = std::max(triality_worst, s.worst_margin.at(name));
      } else if (count != 0) {
        inequalities_pass = false;
      }
    }
    per_dim_json.push_back(to_json(s));
  }
  const bool triality_pass = triality_violations == 0;

  // Subentropy continuity.
  const int d_lo = *std::min_element(c.dims.begin(), c.dims.end());
  const int d_hi = *std::max_element(c.dims.begin(), c.dims.end());
  const ContinuityReport cont =
      subentropy_continuity_check(kContinuitySpectra, d_lo, d_hi, RngStream(c.seed, kContinuityStream));
  const bool continuity_pass = cont.non_monotone == 0;

  Outcome outcome;
  outcome.pass = residuals_pass && inequalities_pass && triality_pass && continuity_pass;

  Json summary{
      {"command", "verify"},
      {"seed", c.seed},
      {"dims", c.dims},
      {"samples", n},
      {"suites",
       {{"residuals",
         {{"pass", residuals_pass},
          {"states", reports.size()},
          {"failures", residual_failures},
          {"worst_abs",
           {{"t1_rms", worst[0]},
            {"t1_max", worst[1]},
            {"t2_avg", worst[2]},
            {"t2_max", worst[3]},
            {"t3_avg", worst[4]},
            {"t3_max", worst[5]}}}}},
        {"inequalities", {{"pass", inequalities_pass}, {"bases_per_state", kBasesPerState}, {"per_dim", per_dim_json}}},
        {"durr_triality", {{"pass", triality_pass}, {"violations", triality_violations}, {"worst", triality_worst}}},
        {"continuity",
         {{"pass", continuity_pass},
          {"n_spectra", cont.n_spectra},
          {"non_monotone", cont.non_monotone},
          {"worst_final_gap", cont.worst_final_gap}}}}},
      {"pass", outcome.pass}};
  out << summary.dump(2) << '\n';
  return outcome;
}

Json compare_estimate(double closed_form, const EstimateWithError& est, bool& pass) {
  const double diff = est.mean - closed_form;
  const double z = est.std_error > 0.0 ? diff / est.std_error
                                       : (std::abs(diff) <= kExactTolerance ? 0.0 : std::copysign(INFINITY, diff));
  const bool ok = std::abs(z) <= kAverageZLimit || std::abs(diff) <= kExactTolerance;
  pass = pass && ok;
  return Json{{"closed_form", closed_form},
              {"estimate", est.mean},
              {"std_error", est.std_error},
              {"n_samples", est.n_samples},
              {"z", nullable(z)},
              {"pass", ok}};
}

Outcome cmd_average(const ExperimentConfig& c, std::ostream& out) {
  const long n = samples_or(c, 10000);
  std::vector<DensityMatrix> states;
  if (c.state_path) {
    states.push_back(load_state(*c.state_path));
  } else {
    for (int d : c.dims) {
      RngStream rng = state_stream(c.seed, d, 0);
      states.push_back(random_qudit_state(d, rng));
    }
  }

  Outcome outcome;
  Json results = Json::array();
  for (const auto& rho : states) {
    const int d = rho.dim();
    const RngStream base(c.seed, kAverageStream + static_cast<std::uint64_t>(d));
    RngStream r0 = base.substream(0);
    RngStream r1 = base.substream(1);
    RngStream r2 = base.substream(2);
    const TradeoffReport rep = tradeoff_report(rho);
    bool pass = true;
    Json q{{"rms_l2", compare_estimate(rep.rms_avg_l2, estimate_rms_average_l2(rho, n, r0), pass)},
           {"avg_r", compare_estimate(rep.avg_r, estimate_average(rho, CoherenceKind::relative_entropy(), n, r1), pass)},
           {"avg_sk",
            compare_estimate(rep.avg_sk, estimate_average(rho, CoherenceKind::skew_information(), n, r2), pass)}};
    outcome.pass = outcome.pass && pass;
    results.push_back(Json{{"dim", d}, {"quantities", std::move(q)}, {"pass", pass}});
  }
  Json summary{{"command", "average"}, {"seed", c.seed}, {"samples", n}, {"results", results}, {"pass", outcome.pass}};
  out << summary.dump(2) << '\n';
  return outcome;
}

Outcome cmd_maximize(const ExperimentConfig& c, std::ostream& out) {
  const long n = samples_or(c, 1);
  struct Job {
    int d;
    long sample;
  };
  std::vector<Job> jobs;
  for (int d : c.dims) {
    for (long s = 0; s < n; ++s) jobs.push_back({d, s});
  }
  std::vector<Json> rows(jobs.size());
  std::vector<char> passes(jobs.size(), 1);

  parallel_for(static_cast<long>(jobs.size()), c.workers, [&](long i) {
    const auto [d, s] = jobs[static_cast<std::size_t>(i)];
    RngStream state_rng = state_stream(c.seed, d, s);
    const DensityMatrix rho = random_qudit_state(d, state_rng);
    RngStream opt_rng = RngStream(c.seed, kMaximizeStream + static_cast<std::uint64_t>(d)).substream(
        static_cast<std::uint64_t>(s));
    const TradeoffReport rep = tradeoff_report(rho);
    const MeasurementBasis witness = maximizing_basis(rho);
    const long budget = budget_for(c, d);
    bool pass = true;
    Json kinds = Json::object();

    const std::pair<CoherenceKind, double> targets[] = {{CoherenceKind::lp_norm(2.0), rep.max_l2},
                                                        {CoherenceKind::relative_entropy(), rep.max_r},
                                                        {CoherenceKind::skew_information(), rep.max_sk}};
    for (const auto& [kind, closed] : targets) {
      const double at_witness = coherence(rho, witness, kind);
      const OptimizationResult opt = maximize_coherence(rho, kind, budget, c.restarts, opt_rng);
      const double witness_gap = std::abs(at_witness - closed);
      const double gap = closed - opt.best_value;
      const bool ok = witness_gap <= kExactTolerance && gap <= kAttainTolerance && gap >= -kExceedTolerance;
      pass = pass && ok;
      kinds[kind.name()] = Json{{"closed_form", closed},  {"witness_value", at_witness}, {"witness_gap", witness_gap},
                                {"best_value", opt.best_value}, {"gap", gap},          {"evaluations", opt.evaluations},
                                {"converged", opt.converged},   {"pass", ok}};
    }

    const OptimizationResult l1 = maximize_coherence(rho, CoherenceKind::lp_norm(1.0), budget, c.restarts, opt_rng);
    const double cap = std::sqrt(static_cast<double>(d) * (d - 1.0)) * rep.max_l2;
    const bool l1_ok = l1.best_value <= cap + kExceedTolerance;
    pass = pass && l1_ok;
    kinds["l1"] = Json{{"lower_bound", l1.best_value},
                       {"cap", cap},
                       {"evaluations", l1.evaluations},
                       {"converged", l1.converged},
                       {"pass", l1_ok}};

    passes[static_cast<std::size_t>(i)] = pass ? 1 : 0;
    rows[static_cast<std::size_t>(i)] = Json{{"dim", d}, {"sample", s}, {"kinds", std::move(kinds)}, {"pass", pass}};
  });

  Outcome outcome;
  for (char p : passes) outcome.pass = outcome.pass && p != 0;
  Json summary{{"command", "maximize"}, {"seed", c.seed},    {"samples", n},
               {"restarts", c.restarts}, {"results", rows}, {"pass", outcome.pass}};
  out << summary.dump(2) << '\n';
  return outcome;
}

Outcome cmd_state(const ExperimentConfig& c, std::ostream& out) {
  const long n = samples_or(c, 1);
  const long total = n * static_cast<long>(c.dims.size());
  std::vector<Json> items(static_cast<std::size_t>(total));
  std::vector<char> passes(static_cast<std::size_t>(total), 1);
  const ResidualTolerances tol = c.tolerance ? ResidualTolerances::uniform(*c.tolerance) : ResidualTolerances{};
  parallel_for(total, c.workers, [&](long i) {
    const int d = c.dims[static_cast<std::size_t>(i / n)];
    RngStream rng = state_stream(c.seed, d, i % n);
    const DensityMatrix rho = random_qudit_state(d, rng);
    const TradeoffReport rep = tradeoff_report(rho);
    passes[static_cast<std::size_t>(i)] = tol.accepts(rep) ? 1 : 0;
    items[static_cast<std::size_t>(i)] = Json{{"dim", d},
                                              {"sample", i % n},
                                              {"state", matrix_to_json(rho.matrix())},
                                              {"spectrum", Spectrum::of(rho).values()},
                                              {"report", to_json(rep)}};
  });
  Outcome outcome;
  for (char p : passes) outcome.pass = outcome.pass && p != 0;
  out << Json(items).dump(2) << '\n';
  return outcome;
}

void check_config(const ExperimentConfig& c) {
  static const char* commands[] = {"sweep", "verify", "average", "maximize", "state"};
  if (std::find_if(std::begin(commands), std::end(commands), [&](const char* k) { return c.command == k; }) ==
      std::end(commands)) {
    throw UsageError("unknown command '" + c.command + "'");
  }
  if (c.dims.empty()) throw UsageError("--dims must name at least one dimension");
  for (int d : c.dims) {
    if (d < 2 || d > 16) throw UsageError("dimension " + std::to_string(d) + " outside [2, 16]");
  }
  if (c.samples && *c.samples < 1) throw UsageError("--samples must be >= 1");
  if (c.format && *c.format != "csv" && *c.format != "json") throw UsageError("--format must be csv or json");
  if (c.format && *c.format == "csv" && c.command != "sweep") {
    throw UsageError("only sweep writes CSV; use --format json");
  }
  if (c.tolerance && !(*c.tolerance > 0.0 && std::isfinite(*c.tolerance))) {
    throw UsageError("--tolerance must be a positive finite number");
  }
  if (c.restarts < 1) throw UsageError("--restarts must be >= 1");
  if (c.workers < 1) throw UsageError("--workers must be >= 1");
  if (c.budget) {
    for (int d : c.dims) {
      if (*c.budget < 100L * d * d) throw UsageError("--budget must be at least 100 d^2 for every dimension");
    }
  }
  if (c.command == "average" && c.samples && *c.samples < 100) throw UsageError("average needs --samples >= 100");
  if (c.state_path && c.command != "average" && c.command != "verify") {
    throw UsageError("--state applies to average and verify only");
  }
}

ExitCode exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EigensolverFailure:
    case ErrorKind::DegenerateDraw:
      return ExitCode::NumericalFailure;
    default:
      return ExitCode::UsageError;
  }
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const char* env_value) {
  if (flag) return *flag;
  if (env_value == nullptr || *env_value == '\0') return kDefaultSeed;
  const std::string_view text(env_value);
  std::uint64_t seed = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::InvalidArgument, std::string(kSeedEnvVar) + " is not an unsigned integer");
  }
  return seed;
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  auto parse_int = [&](std::string_view tok) {
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw Error(ErrorKind::InvalidArgument, "bad dimension list '" + text + "'");
    }
    return v;
  };
  std::string_view rest(text);
  while (true) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const std::size_t dash = item.find('-');
    if (dash == std::string_view::npos) {
      dims.push_back(parse_int(item));
    } else {
      const int lo = parse_int(item.substr(0, dash));
      const int hi = parse_int(item.substr(dash + 1));
      if (hi < lo) throw Error(ErrorKind::InvalidArgument, "empty dimension range in '" + text + "'");
      for (int d = lo; d <= hi; ++d) dims.push_back(d);
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return dims;
}

ExitCode run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    check_config(config);
    // Output is buffered so a failing run never leaves a partial file behind.
    std::ostringstream buffer;
    Outcome outcome;
    if (config.command == "sweep") outcome = cmd_sweep(config, buffer);
    else if (config.command == "verify") outcome = cmd_verify(config, buffer);
    else if (config.command == "average") outcome = cmd_average(config, buffer);
    else if (config.command == "maximize") outcome = cmd_maximize(config, buffer);
    else outcome = cmd_state(config, buffer);
    if (config.out.empty()) {
      out << buffer.str();
      out.flush();
    } else {
      std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
      if (!file) throw IoError("cannot open output '" + config.out + "'");
      file << buffer.str();
      file.flush();
      if (!file) throw IoError("write to '" + config.out + "' failed");
    }
    return outcome.pass ? ExitCode::Pass : ExitCode::CheckFailure;
  } catch (const UsageError& e) {
    report_error(err, "UsageError", e.what());
    return ExitCode::UsageError;
  } catch (const IoError& e) {
    report_error(err, "IoError", e.what());
    return ExitCode::UsageError;
  } catch (const Error& e) {
    report_error(err, to_string(e.kind()), e.what());
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what());
    return ExitCode::NumericalFailure;
  }
}

}  // namespace coherelab
