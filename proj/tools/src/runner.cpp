// Copyright 2026 The clockrobust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clockrobust/tools/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Core>
#include <json.hpp>
#include <openssl/opensslv.h>

#include "clockrobust/estimator.hpp"
#include "clockrobust/montecarlo.hpp"
#include "clockrobust/parallel.hpp"
#include "clockrobust/version.hpp"
#include "clockrobust/tools/io.hpp"

namespace clockrobust::tools {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// JSON has no NaN; absent values become null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// Collects artifacts for one output directory and writes the manifest last.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }

  void write(const std::string& relative, const std::string& content) {
    write_text_file(root_ / relative, content);
    files_.push_back(relative);
  }

  void write_json(const std::string& relative, const Json& j) { write(relative, j.dump(2) + "\n"); }

  void record_timing(const std::string& stage, double seconds, int iterations) {
    Json t;
    t["seconds"] = seconds;
    t["iterations"] = iterations;
    t["seconds_per_iteration"] =
        iterations > 0 ? Json(seconds / iterations) : Json(nullptr);
    timing_[stage] = std::move(t);
  }

  Json& extra() { return extra_; }
  const std::vector<std::string>& files() const { return files_; }

  void write_manifest(const ExperimentConfig& config, const std::string& command,
                      const RunOutcome& outcome) {
    Json m;
    m["tool"] = "clockrobust";
    m["command"] = command;
    m["status"] = outcome.status;
    m["exit_code"] = outcome.exit_code;
    if (!outcome.reason.empty()) m["reason"] = outcome.reason;
    m["config_sha256"] = sha256_hex(serialize_config(config));
    Json seeds;
    seeds["initial_guess"] = config.schedule.init.seed;
    seeds["training_noise"] = config.noise.model.seed;
    seeds["test"] = config.run.test.seed;
    m["seeds"] = std::move(seeds);
    Json versions;
    versions["clockrobust"] = kVersion;
    versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
    versions["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    versions["openssl"] = OPENSSL_VERSION_TEXT;
    versions["compiler"] = __VERSION__;
    m["versions"] = std::move(versions);
    m["threads"] = thread_count();
    for (const auto& item : extra_.items()) m[item.key()] = item.value();
    m["timing"] = timing_;
    Json files = Json::array();
    for (const auto& f : files_) {
      Json e;
      e["path"] = f;
      e["sha256"] = sha256_file(root_ / f);
      e["bytes"] = std::filesystem::file_size(root_ / f);
      files.push_back(std::move(e));
    }
    m["files"] = std::move(files);
    write_text_file(root_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
  Json timing_ = Json::object();
  Json extra_ = Json::object();
};

// Everything derived once from a validated config.
struct Context {
  const ExperimentConfig& config;
  QuantumSystem system;
  CMatrix target;
  ClockNoiseModel noise;
  SecondMomentModel moments;
  EstimatorOptions estimator;
  PhaseMode mode;
  std::ostream& log;

  Context(const ExperimentConfig& c, std::ostream& l)
      : config(c),
        system(build_system(c)),
        target(build_target(c)),
        noise(build_noise(c)),
        moments(second_moments(noise, system)),
        estimator(build_estimator_options(c)),
        mode(c.target.phase_mode),
        log(l) {}

  TestReport test(const ControlSchedule& s, std::size_t samples) const {
    return test_average_error(system, s, target, noise, samples, config.run.test.seed, mode);
  }

  OptimizerOptions options(OptimizerOptions o) const {
    o.phase_mode = mode;
    o.estimator = estimator;
    if (o.test_every > 0) {
      const std::size_t k = config.run.test.every_samples;
      o.tester = [this, k](const ControlSchedule& s) { return test(s, k).mean; };
    }
    return o;
  }
};

struct StageResult {
  OptimizationResult result;
  bool ok = true;
  std::string reason;
};

bool acceptable(const std::string& algorithm, const OptimizationTrace& trace) {
  if (algorithm == "grape") return trace.converged;
  if (algorithm == "homotopic") {
    return trace.status != "restoration_failed" && trace.status != "initial_grape_failed";
  }
  return trace.status != "diverged";
}

StageResult make_stage(OptimizationResult result, const std::string& algorithm) {
  const bool ok = acceptable(algorithm, result.trace);
  std::string reason = ok ? std::string() : algorithm + ": " + result.trace.status;
  return StageResult{std::move(result), ok, std::move(reason)};
}

StageResult run_grape(const Context& ctx, const ControlSchedule& init) {
  const OptimizerOptions o = ctx.options(ctx.config.run.grape);
  if (o.beta > 0.0) {
    // Weighted-penalty mode: a stationary point of J0 + beta J_N is the goal,
    // so the J0 target does not apply.
    return StageResult{composite_minimize(ctx.system, init, ctx.target, ctx.moments, o), true, {}};
  }
  return make_stage(grape_minimize(ctx.system, init, ctx.target, o), "grape");
}

StageResult run_homotopic(const Context& ctx, const ControlSchedule& start) {
  return make_stage(homotopic_refine(ctx.system, start, ctx.target, ctx.moments,
                                     ctx.options(ctx.config.run.homotopic)),
                    "homotopic");
}

StageResult run_bgrape(const Context& ctx, const ControlSchedule& start) {
  return make_stage(
      bgrape_optimize(ctx.system, start, ctx.target, ctx.noise, ctx.options(ctx.config.run.bgrape)),
      "bgrape");
}

Json estimate_json(const Context& ctx, const ControlSchedule& s) {
  const RobustnessReport rep = estimate_jn(ctx.system, s, ctx.moments, ctx.estimator);
  Json j;
  j["j0"] = gate_error_j0(propagate_ideal(ctx.system, s).final(), ctx.target, ctx.mode);
  j["jn_total"] = rep.jn_total;
  j["jn_latency"] = rep.jn_latency;
  j["jn_jitter"] = rep.jn_jitter;
  j["include_turn_on"] = ctx.estimator.include_turn_on;
  Json ctau = Json::array();
  for (Eigen::Index a = 0; a < ctx.moments.ctau.rows(); ++a) {
    Json row = Json::array();
    for (Eigen::Index b = 0; b < ctx.moments.ctau.cols(); ++b) row.push_back(ctx.moments.ctau(a, b));
    ctau.push_back(std::move(row));
  }
  j["ctau"] = std::move(ctau);
  j["mu0sq"] = ctx.moments.mu0sq;
  Json smooth = Json::array();
  const RVector sm = smoothness_metric(s);
  for (Eigen::Index k = 0; k < sm.size(); ++k) smooth.push_back(sm(k));
  j["smoothness"] = std::move(smooth);
  j["smoothness_total"] = sm.sum();
  return j;
}

Json test_json(const TestReport& rep, std::uint64_t seed) {
  Json j;
  j["sample_count"] = rep.sample_count;
  j["seed"] = seed;
  j["mean"] = rep.mean;
  j["stddev"] = rep.stddev;
  j["standard_error"] = rep.standard_error();
  j["min"] = rep.min;
  j["max"] = rep.max;
  j["log10_skewness"] = number_or_null(log_error_skewness(rep));
  return j;
}

SweepSurface run_sweep(const Context& ctx, const ControlSchedule& s) {
  const SweepConfig& w = ctx.config.run.sweep;
  const ClockNoiseModel& n = ctx.noise;
  return latency_sweep(ctx.system, s, ctx.target, linspace(w.tau1.lo, w.tau1.hi, w.tau1.points),
                       linspace(w.tau2.lo, w.tau2.hi, w.tau2.points), ctx.mode, n.shift_turn_on,
                       n.pre_turn_on);
}

Json sweep_json(const SweepSurface& sw, double threshold) {
  Json j;
  j["points"] = sw.tau1.size() * sw.tau2.size();
  j["threshold"] = threshold;
  j["fraction_below"] = sw.fraction_below(threshold);
  j["min_error"] = sw.min_error;
  j["argmin_tau1"] = sw.argmin_tau1;
  j["argmin_tau2"] = sw.argmin_tau2;
  return j;
}

// Evaluation artifacts for one control, under `prefix` (e.g. "" or "lj/homotopic/").
// Fills the tested/swept fields of `summary` when given.
void write_evaluation(const Context& ctx, ArtifactSet& out, const std::string& prefix,
                      const ControlSchedule& s, bool test, bool sweep,
                      ControlSummary* summary = nullptr) {
  out.write(prefix + "schedule.csv", schedule_csv(s));
  out.write(prefix + "smoothness.csv", smoothness_csv(smoothness_metric(s)));
  const Json est = estimate_json(ctx, s);
  out.write_json(prefix + "estimate.json", est);
  if (summary) {
    summary->final_j0 = est["j0"].get<double>();
    summary->jn = est["jn_total"].get<double>();
    summary->smoothness = est["smoothness_total"].get<double>();
  }
  if (test) {
    const auto start = Clock::now();
    const TestReport rep = ctx.test(s, ctx.config.run.test.samples);
    out.record_timing(prefix + "test", seconds_since(start), 0);
    out.write_json(prefix + "test_report.json", test_json(rep, ctx.config.run.test.seed));
    out.write(prefix + "histogram.csv",
              histogram_csv(error_histogram(rep, ctx.config.run.test.histogram_bins)));
    ctx.log << "  " << prefix << "tested mean error " << rep.mean << " (+/- "
            << rep.standard_error() << ", K=" << rep.sample_count << ")\n";
    if (summary) {
      summary->tested_mean = rep.mean;
      summary->tested_stderr = rep.standard_error();
      summary->log_skewness = log_error_skewness(rep);
    }
  }
  if (sweep) {
    const SweepSurface sw = run_sweep(ctx, s);
    out.write(prefix + "sweep.csv", sweep_csv(sw));
    out.write_json(prefix + "sweep_report.json", sweep_json(sw, ctx.config.run.sweep.threshold));
    if (summary) {
      summary->sweep_fraction = sw.fraction_below(ctx.config.run.sweep.threshold);
      summary->argmin_tau1 = sw.argmin_tau1;
      summary->argmin_tau2 = sw.argmin_tau2;
    }
  }
}

void fill_trace_summary(ControlSummary& s, const OptimizationTrace& trace) {
  s.iterations = trace.records.empty() ? 0 : trace.records.back().iteration;
  s.plateau_iteration = plateau_iteration(trace);
  s.gradient_evaluations = trace.gradient_evaluations;
  s.status = trace.status;
}

RunOutcome finish(ArtifactSet& out, const ExperimentConfig& config, const std::string& command,
                  bool ok, const std::string& reason) {
  RunOutcome outcome;
  if (!ok) {
    outcome.exit_code = kExitNotConverged;
    outcome.status = "not_converged";
    outcome.reason = reason;
  }
  out.write_manifest(config, command, outcome);
  outcome.files = out.files();
  outcome.files.push_back("manifest.json");
  return outcome;
}

RunOutcome run_optimizer(const Context& ctx, ArtifactSet& out) {
  const ExperimentConfig& c = ctx.config;
  const Algorithm algo = c.run.algorithm;
  const ControlSchedule init = build_initial_schedule(c);
  const bool needs_grape =
      algo == Algorithm::grape || algo == Algorithm::homotopic ||
      (algo == Algorithm::bgrape && c.run.bgrape_init == BgrapeInit::warm);

  ControlSchedule current = init;
  bool ok = true;
  std::string reason;
  if (needs_grape) {
    const auto start = Clock::now();
    StageResult g = run_grape(ctx, init);
    out.record_timing("grape", seconds_since(start),
                      g.result.trace.records.empty() ? 0 : g.result.trace.records.back().iteration);
    ctx.log << "grape: " << g.result.trace.status << " after "
            << g.result.trace.records.size() << " iterations\n";
    out.write(algo == Algorithm::grape ? "trace.csv" : "grape_trace.csv", trace_csv(g.result.trace));
    current = g.result.schedule;
    if (!g.ok) {
      ok = false;
      reason = g.reason;
    }
  }
  if (ok && algo != Algorithm::grape) {
    const auto start = Clock::now();
    StageResult r = algo == Algorithm::homotopic ? run_homotopic(ctx, current)
                                                 : run_bgrape(ctx, current);
    const std::string name = to_string(algo);
    out.record_timing(name, seconds_since(start),
                      r.result.trace.records.empty() ? 0 : r.result.trace.records.back().iteration);
    ctx.log << name << ": " << r.result.trace.status << " after " << r.result.trace.records.size()
            << " iterations\n";
    out.write("trace.csv", trace_csv(r.result.trace));
    current = r.result.schedule;
    if (!r.ok) {
      ok = false;
      reason = r.reason;
    }
  }
  out.extra()["initialization"] =
      algo == Algorithm::bgrape && c.run.bgrape_init == BgrapeInit::random ? "random" : "grape_warm_start";
  write_evaluation(ctx, out, "", current, c.run.test.enabled, c.run.sweep.enabled);
  return finish(out, c, to_string(algo), ok, reason);
}

RunOutcome run_analysis(const Context& ctx, ArtifactSet& out) {
  const ExperimentConfig& c = ctx.config;
  const ControlSchedule s = build_initial_schedule(c);
  switch (c.run.algorithm) {
    case Algorithm::estimate:
      out.write_json("estimate.json", estimate_json(ctx, s));
      out.write("smoothness.csv", smoothness_csv(smoothness_metric(s)));
      break;
    case Algorithm::test: {
      const auto start = Clock::now();
      const TestReport rep = ctx.test(s, c.run.test.samples);
      out.record_timing("test", seconds_since(start), 0);
      out.write_json("test_report.json", test_json(rep, c.run.test.seed));
      out.write("histogram.csv", histogram_csv(error_histogram(rep, c.run.test.histogram_bins)));
      ctx.log << "tested mean error " << rep.mean << " (+/- " << rep.standard_error() << ")\n";
      break;
    }
    case Algorithm::sweep: {
      const SweepSurface sw = run_sweep(ctx, s);
      out.write("sweep.csv", sweep_csv(sw));
      out.write_json("sweep_report.json", sweep_json(sw, c.run.sweep.threshold));
      break;
    }
    default:
      break;
  }
  return finish(out, c, to_string(c.run.algorithm), true, {});
}

// Maps exceptions to exit codes; `body` does the work.
RunOutcome guarded(const std::function<RunOutcome()>& body, std::ostream& log) {
  RunOutcome outcome;
  try {
    return body();
  } catch (const ConfigError& e) {
    outcome = {kExitConfig, "config_error", e.what(), {}};
  } catch (const IoError& e) {
    outcome = {kExitIo, "io_error", e.what(), {}};
  } catch (const std::filesystem::filesystem_error& e) {
    outcome = {kExitIo, "io_error", e.what(), {}};
  } catch (const std::invalid_argument& e) {
    outcome = {kExitConfig, "config_error", e.what(), {}};
  } catch (const std::exception& e) {
    outcome = {kExitInternal, "internal_error", e.what(), {}};
  }
  log << outcome.status << ": " << outcome.reason << "\n";
  return outcome;
}

std::string summary_csv(const std::vector<ControlSummary>& rows) {
  std::string out =
      "setting,algorithm,final_j0,jn,tested_mean,tested_stderr,smoothness,sweep_fraction,"
      "argmin_tau1,argmin_tau2,log_skewness,iterations,plateau_iteration,gradient_evaluations,"
      "status\n";
  for (const auto& r : rows) {
    out += r.setting + "," + r.algorithm + "," + format_double(r.final_j0) + "," +
           format_double(r.jn) + "," + format_double(r.tested_mean) + "," +
           format_double(r.tested_stderr) + "," + format_double(r.smoothness) + "," +
           format_double(r.sweep_fraction) + "," + format_double(r.argmin_tau1) + "," +
           format_double(r.argmin_tau2) + "," + format_double(r.log_skewness) + "," +
           std::to_string(r.iterations) + "," + std::to_string(r.plateau_iteration) + "," +
           std::to_string(r.gradient_evaluations) + "," + r.status + "\n";
  }
  return out;
}

const ControlSummary* find_row(const std::vector<ControlSummary>& rows, const std::string& setting,
                               const std::string& algorithm) {
  for (const auto& r : rows) {
    if (r.setting == setting && r.algorithm == algorithm) return &r;
  }
  return nullptr;
}

}  // namespace

int plateau_iteration(const OptimizationTrace& trace, double tolerance) {
  bool tested = false;
  for (const auto& r : trace.records) tested = tested || std::isfinite(r.tested_error);
  auto value = [tested](const TraceRecord& r) { return tested ? r.tested_error : r.objective; };
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    if (std::isfinite(value(r))) best = std::min(best, value(r));
  }
  for (const auto& r : trace.records) {
    if (std::isfinite(value(r)) && value(r) <= (1.0 + tolerance) * best) return r.iteration;
  }
  return 0;
}

RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                          std::ostream& log) {
  return guarded(
      [&]() {
        validate_config(config);
        const Context ctx(config, log);
        ArtifactSet out(out_dir);
        out.write("config.cfg", serialize_config(config));
        switch (config.run.algorithm) {
          case Algorithm::grape:
          case Algorithm::homotopic:
          case Algorithm::bgrape:
            return run_optimizer(ctx, out);
          default:
            return run_analysis(ctx, out);
        }
      },
      log);
}

RunOutcome replicate_paper(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                           std::ostream& log, std::vector<ControlSummary>* summaries) {
  return guarded(
      [&]() {
        validate_config(config);
        if (!config.noise.present) {
          throw ConfigError("noise: replicate needs a noise section", "noise");
        }
        for (const auto& [opts, field] :
             {std::pair{&config.run.homotopic, "run.homotopic.test_every"},
              std::pair{&config.run.bgrape, "run.bgrape.test_every"}}) {
          if (opts->test_every <= 0) {
            throw ConfigError(std::string(field) +
                                  ": replicate needs periodic testing (> 0) for the learning curves",
                              field);
          }
        }
        ArtifactSet out(out_dir);
        out.write("config.cfg", serialize_config(config));

        // Stage 1 is noise-independent and shared by both settings.
        const Context base(config, log);
        const auto start = Clock::now();
        StageResult grape = run_grape(base, build_initial_schedule(config));
        out.record_timing("grape", seconds_since(start),
                          grape.result.trace.records.empty()
                              ? 0
                              : grape.result.trace.records.back().iteration);
        out.write("grape_trace.csv", trace_csv(grape.result.trace));
        log << "grape: " << grape.result.trace.status << "\n";
        bool ok = grape.ok;
        std::string reason = grape.reason;

        std::vector<ControlSummary> rows;
        const std::pair<const char*, bool> settings[] = {{"latency_jitter", true},
                                                         {"latency_only", false}};
        for (const auto& [setting, jitter] : settings) {
          ExperimentConfig sc = config;
          if (!jitter) sc.noise.model.jitter_half_width = 0.0;
          const Context ctx(sc, log);
          const std::string dir = std::string(setting) + "/";
          log << "[" << setting << "]\n";

          ControlSummary g;
          g.setting = setting;
          g.algorithm = "grape";
          fill_trace_summary(g, grape.result.trace);
          write_evaluation(ctx, out, dir + "grape/", grape.result.schedule, true, true, &g);
          rows.push_back(g);

          for (const char* algo : {"homotopic", "bgrape"}) {
            const auto t0 = Clock::now();
            StageResult r = std::string(algo) == "homotopic"
                                ? run_homotopic(ctx, grape.result.schedule)
                                : run_bgrape(ctx, grape.result.schedule);
            out.record_timing(dir + algo, seconds_since(t0),
                              r.result.trace.records.empty()
                                  ? 0
                                  : r.result.trace.records.back().iteration);
            log << "  " << algo << ": " << r.result.trace.status << " after "
                << r.result.trace.records.size() << " iterations\n";
            out.write(dir + algo + "/trace.csv", trace_csv(r.result.trace));
            ControlSummary s;
            s.setting = setting;
            s.algorithm = algo;
            fill_trace_summary(s, r.result.trace);
            write_evaluation(ctx, out, dir + algo + "/", r.result.schedule, true, true, &s);
            rows.push_back(s);
            if (!r.ok && ok) {
              ok = false;
              reason = std::string(setting) + ": " + r.reason;
            }
          }
        }

        out.write("summary.csv", summary_csv(rows));
        Json summary;
        summary["initialization"] = "grape_warm_start";
        Json table = Json::array();
        for (const auto& r : rows) {
          Json j;
          j["setting"] = r.setting;
          j["algorithm"] = r.algorithm;
          j["final_j0"] = r.final_j0;
          j["jn"] = r.jn;
          j["tested_mean"] = r.tested_mean;
          j["tested_stderr"] = r.tested_stderr;
          j["smoothness"] = r.smoothness;
          j["sweep_fraction"] = r.sweep_fraction;
          j["argmin"] = Json::array({r.argmin_tau1, r.argmin_tau2});
          j["log_skewness"] = number_or_null(r.log_skewness);
          j["iterations"] = r.iterations;
          j["plateau_iteration"] = r.plateau_iteration;
          j["gradient_evaluations"] = r.gradient_evaluations;
          j["status"] = r.status;
          table.push_back(std::move(j));
        }
        summary["controls"] = std::move(table);
        const auto* hl = find_row(rows, "latency_jitter", "homotopic");
        const auto* bl = find_row(rows, "latency_jitter", "bgrape");
        const auto* bo = find_row(rows, "latency_only", "bgrape");
        const auto* ho = find_row(rows, "latency_only", "homotopic");
        Json claims;
        claims["homotopic_plateaus_first"] = hl->plateau_iteration < bl->plateau_iteration;
        claims["bgrape_at_least_as_robust"] = bl->tested_mean <= hl->tested_mean;
        claims["jitter_training_smoother_homotopic"] = hl->smoothness < ho->smoothness;
        claims["jitter_training_smoother_bgrape"] = bl->smoothness < bo->smoothness;
        summary["claims"] = std::move(claims);
        out.write_json("summary.json", summary);
        out.extra()["initialization"] = "grape_warm_start";
        if (summaries) *summaries = rows;
        return finish(out, config, "replicate", ok, reason);
      },
      log);
}

int run_command(const std::string& subcommand, const std::filesystem::path& config_path,
                const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed,
                std::ostream& log, std::ostream& err) {
  RunOutcome outcome = guarded(
      [&]() {
        ExperimentConfig config = load_config(config_path);
        if (seed) apply_seed(config, *seed);
        if (subcommand == "replicate") return replicate_paper(config, out_dir, log);
        const auto algo = parse_algorithm(subcommand);
        if (!algo) throw ConfigError("unknown subcommand " + subcommand);
        config.run.algorithm = *algo;
        return run_experiment(config, out_dir, log);
      },
      log);
  if (outcome.exit_code != kExitOk) {
    Json j;
    j["status"] = outcome.status;
    j["exit_code"] = outcome.exit_code;
    j["reason"] = outcome.reason;
    err << j.dump() << "\n";
  }
  return outcome.exit_code;
}

}  // namespace clockrobust::tools
