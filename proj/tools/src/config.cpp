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

#include "clockrobust/tools/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "clockrobust/operator_expr.hpp"
#include "clockrobust/presets.hpp"
#include "clockrobust/random.hpp"
#include "clockrobust/tools/io.hpp"

namespace clockrobust::tools {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- enum names

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<Algorithm> kAlgorithms[] = {
    {Algorithm::grape, "grape"},       {Algorithm::homotopic, "homotopic"},
    {Algorithm::bgrape, "bgrape"},     {Algorithm::estimate, "estimate"},
    {Algorithm::test, "test"},         {Algorithm::sweep, "sweep"},
};
constexpr EnumName<PhaseMode> kPhaseModes[] = {
    {PhaseMode::plain, "plain"}, {PhaseMode::phase_invariant, "phase_invariant"}};
constexpr EnumName<InitKind> kInitKinds[] = {{InitKind::random_uniform, "random_uniform"},
                                             {InitKind::constant, "constant"},
                                             {InitKind::csv, "csv"}};
constexpr EnumName<JitterSharing> kSharing[] = {{JitterSharing::per_channel, "per_channel"},
                                                {JitterSharing::per_control, "per_control"}};
constexpr EnumName<PreTurnOn> kPreTurnOn[] = {{PreTurnOn::zero, "zero"},
                                              {PreTurnOn::hold_first, "hold_first"}};
constexpr EnumName<TurnOnMode> kTurnOn[] = {{TurnOnMode::automatic, "auto"},
                                            {TurnOnMode::include, "include"},
                                            {TurnOnMode::exclude, "exclude"}};
constexpr EnumName<BgrapeInit> kBgrapeInit[] = {{BgrapeInit::warm, "warm"},
                                                {BgrapeInit::random, "random"}};
constexpr EnumName<LearningRateSchedule> kLrSchedules[] = {
    {LearningRateSchedule::constant, "constant"},
    {LearningRateSchedule::inverse_sqrt, "inverse_sqrt"}};

template <typename E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const EnumName<E> (&table)[N], const std::string& name) {
  for (const auto& e : table) {
    if (name == e.name) return e.value;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string choices(const EnumName<E> (&table)[N]) {
  std::string out;
  for (const auto& e : table) {
    if (!out.empty()) out += ", ";
    out += e.name;
  }
  return out;
}

// ------------------------------------------------------------------ reading

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Wraps one JSON object, records which keys were read, and rejects unknown
// keys so that typos do not silently fall back to defaults.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }
  ~Section() = default;
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  [[noreturn]] static void fail(const std::string& field, const std::string& msg) {
    throw ConfigError((field.empty() ? std::string("config") : field) + ": " + msg, field);
  }

  const std::string& path() const { return path_; }
  std::string field(const std::string& key) const { return join(path_, key); }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(field(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(field(key), "expected a finite number");
    return d;
  }

  long long integer(const std::string& key, long long fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(field(key), "expected an integer");
    return v->get<long long>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<long long>() >= 0) {
      return static_cast<std::uint64_t>(v->get<long long>());
    }
    fail(field(key), "expected a non-negative integer seed");
  }

  bool boolean(const std::string& key, bool fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(field(key), "expected a string");
    return v->get<std::string>();
  }

  template <typename E, std::size_t N>
  E choice(const std::string& key, const EnumName<E> (&table)[N], E fallback) {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(field(key), "expected one of: " + choices(table));
    const auto e = value_of(table, v->get<std::string>());
    if (!e) {
      fail(field(key), "unknown value \"" + v->get<std::string>() + "\"; expected one of: " +
                           choices(table));
    }
    return *e;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) fail(field(item.key()), "unknown key");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

int checked_int(long long v, const std::string& field, long long lo) {
  if (v < lo || v > std::numeric_limits<int>::max()) {
    Section::fail(field, "must be an integer >= " + std::to_string(lo));
  }
  return static_cast<int>(v);
}

int line_of_offset(const std::string& text, std::size_t offset, int* column) {
  int line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  if (column) *column = static_cast<int>(offset - line_start) + 1;
  return line;
}

void read_optimizer(Section& s, OptimizerOptions& o, bool line_search, bool homotopic,
                    bool stochastic) {
  o.max_iters = checked_int(s.integer("max_iters", o.max_iters), s.field("max_iters"), 0);
  o.learning_rate = s.number("learning_rate", o.learning_rate);
  if (line_search) {
    o.shrink = s.number("shrink", o.shrink);
    o.max_backtracks =
        checked_int(s.integer("max_backtracks", o.max_backtracks), s.field("max_backtracks"), 1);
    o.armijo = s.number("armijo", o.armijo);
  }
  o.j0_target = s.number("j0_target", o.j0_target);
  o.test_every = checked_int(s.integer("test_every", o.test_every), s.field("test_every"), 0);
  if (!stochastic) o.beta = s.number("beta", o.beta);
  if (homotopic) {
    o.j0_ceiling = s.number("j0_ceiling", o.j0_ceiling);
    o.j0_excursion_limit = s.number("j0_excursion_limit", o.j0_excursion_limit);
    o.restore_max_iters = checked_int(s.integer("restore_max_iters", o.restore_max_iters),
                                      s.field("restore_max_iters"), 0);
    o.stall_window =
        checked_int(s.integer("stall_window", o.stall_window), s.field("stall_window"), 1);
    o.stall_tolerance = s.number("stall_tolerance", o.stall_tolerance);
  }
  if (stochastic) {
    o.batch_size = checked_int(s.integer("batch_size", o.batch_size), s.field("batch_size"), 1);
    o.lr_schedule = s.choice("lr_schedule", kLrSchedules, o.lr_schedule);
    o.max_halvings =
        checked_int(s.integer("max_halvings", o.max_halvings), s.field("max_halvings"), 0);
    o.sample_pool =
        checked_int(s.integer("sample_pool", o.sample_pool), s.field("sample_pool"), 0);
    o.stall_window =
        checked_int(s.integer("guard_window", o.stall_window), s.field("guard_window"), 1);
  }
}

Json write_optimizer(const OptimizerOptions& o, bool line_search, bool homotopic,
                     bool stochastic) {
  Json j;
  j["max_iters"] = o.max_iters;
  j["learning_rate"] = o.learning_rate;
  if (line_search) {
    j["shrink"] = o.shrink;
    j["max_backtracks"] = o.max_backtracks;
    j["armijo"] = o.armijo;
  }
  j["j0_target"] = o.j0_target;
  j["test_every"] = o.test_every;
  if (!stochastic) j["beta"] = o.beta;
  if (homotopic) {
    j["j0_ceiling"] = o.j0_ceiling;
    j["j0_excursion_limit"] = o.j0_excursion_limit;
    j["restore_max_iters"] = o.restore_max_iters;
    j["stall_window"] = o.stall_window;
    j["stall_tolerance"] = o.stall_tolerance;
  }
  if (stochastic) {
    j["batch_size"] = o.batch_size;
    j["lr_schedule"] = name_of(kLrSchedules, o.lr_schedule);
    j["max_halvings"] = o.max_halvings;
    j["sample_pool"] = o.sample_pool;
    j["guard_window"] = o.stall_window;
  }
  return j;
}

CMatrix read_matrix(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) Section::fail(field, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      Section::fail(rf, "expected a row of " + std::to_string(n) + " entries");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      const std::string ef = rf + "[" + std::to_string(c) + "]";
      if (e.is_number()) {
        m(r, c) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        Section::fail(ef, "expected a number or a [re, im] pair");
      }
    }
  }
  return m;
}

Json write_matrix(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void read_axis(Section& parent, const std::string& key, GridAxis& axis) {
  const Json* v = parent.find(key);
  if (!v) return;
  Section s(*v, parent.field(key));
  axis.lo = s.number("lo", axis.lo);
  axis.hi = s.number("hi", axis.hi);
  axis.points = checked_int(s.integer("points", axis.points), s.field("points"), 1);
  s.finish();
}

Json write_axis(const GridAxis& a) {
  Json j;
  j["lo"] = a.lo;
  j["hi"] = a.hi;
  j["points"] = a.points;
  return j;
}

ExperimentConfig from_json(const Json& root, const std::filesystem::path& base_dir) {
  ExperimentConfig c = paper_config();
  c.base_dir = base_dir;
  Section top(root, "");

  if (const Json* v = top.find("system")) {
    Section s(*v, "system");
    c.system.qubits = checked_int(s.integer("qubits", c.system.qubits), s.field("qubits"), 1);
    c.system.drift = s.string("drift", c.system.drift);
    if (const Json* ctrl = s.find("controls")) {
      if (!ctrl->is_array()) Section::fail(s.field("controls"), "expected an array");
      c.system.controls.clear();
      for (std::size_t i = 0; i < ctrl->size(); ++i) {
        Section cs((*ctrl)[i], s.field("controls") + "[" + std::to_string(i) + "]");
        ControlSpec spec;
        spec.expr = cs.string("expr", "");
        if (!cs.has("expr")) Section::fail(cs.field("expr"), "missing");
        spec.channel = checked_int(cs.integer("channel", 0), cs.field("channel"), 0);
        cs.finish();
        c.system.controls.push_back(std::move(spec));
      }
    }
    s.finish();
  }

  if (const Json* v = top.find("target")) {
    Section s(*v, "target");
    if (s.has("matrix") && s.has("gate")) {
      Section::fail("target", "give either gate or matrix, not both");
    }
    if (const Json* m = s.find("matrix")) {
      if (!m->is_null()) {
        c.target.matrix = read_matrix(*m, s.field("matrix"));
        c.target.gate.clear();
      }
    }
    c.target.gate = s.string("gate", c.target.matrix ? std::string() : c.target.gate);
    c.target.global_phase = s.number("global_phase", c.target.global_phase);
    c.target.phase_mode = s.choice("phase_mode", kPhaseModes, c.target.phase_mode);
    s.finish();
  }

  if (const Json* v = top.find("schedule")) {
    Section s(*v, "schedule");
    c.schedule.sample_period = s.number("sample_period", c.schedule.sample_period);
    c.schedule.slices = checked_int(s.integer("slices", c.schedule.slices), s.field("slices"), 1);
    if (const Json* b = s.find("amplitude_bound")) {
      if (b->is_null()) {
        c.schedule.amplitude_bound.reset();
      } else if (b->is_number()) {
        c.schedule.amplitude_bound = b->get<double>();
      } else {
        Section::fail(s.field("amplitude_bound"), "expected a number or null");
      }
    }
    if (const Json* i = s.find("init")) {
      Section is(*i, s.field("init"));
      InitConfig& init = c.schedule.init;
      init.kind = is.choice("kind", kInitKinds, init.kind);
      init.half_width = is.number("half_width", init.half_width);
      init.value = is.number("value", init.value);
      init.path = is.string("path", init.path);
      init.seed = is.seed("seed", init.seed);
      is.finish();
    }
    s.finish();
  }

  if (const Json* v = top.find("noise"); v && !v->is_null()) {
    Section s(*v, "noise");
    c.noise.present = true;
    ClockNoiseModel& m = c.noise.model;
    if (const Json* lat = s.find("latency")) {
      if (!lat->is_array()) Section::fail(s.field("latency"), "expected an array of {lo, hi}");
      m.channel_latency.clear();
      for (std::size_t i = 0; i < lat->size(); ++i) {
        Section ls((*lat)[i], s.field("latency") + "[" + std::to_string(i) + "]");
        UniformRange r;
        r.lo = ls.number("lo", 0.0);
        r.hi = ls.number("hi", 0.0);
        ls.finish();
        m.channel_latency.push_back(r);
      }
    }
    m.jitter_half_width = s.number("jitter_half_width", m.jitter_half_width);
    m.jitter_sharing = s.choice("jitter_sharing", kSharing, m.jitter_sharing);
    m.shift_turn_on = s.boolean("shift_turn_on", m.shift_turn_on);
    m.pre_turn_on = s.choice("pre_turn_on", kPreTurnOn, m.pre_turn_on);
    m.seed = s.seed("seed", m.seed);
    c.noise.scale = s.number("scale", c.noise.scale);
    s.finish();
  } else {
    c.noise.present = false;
    c.noise.model = ClockNoiseModel::noiseless(0);
    c.noise.scale = 1.0;
  }

  if (const Json* v = top.find("run")) {
    Section s(*v, "run");
    RunConfig& r = c.run;
    r.algorithm = s.choice("algorithm", kAlgorithms, r.algorithm);
    r.turn_on = s.choice("estimator_turn_on", kTurnOn, r.turn_on);
    if (const Json* g = s.find("grape")) {
      Section gs(*g, s.field("grape"));
      read_optimizer(gs, r.grape, true, false, false);
      gs.finish();
    }
    if (const Json* h = s.find("homotopic")) {
      Section hs(*h, s.field("homotopic"));
      read_optimizer(hs, r.homotopic, true, true, false);
      hs.finish();
    }
    if (const Json* b = s.find("bgrape")) {
      Section bs(*b, s.field("bgrape"));
      read_optimizer(bs, r.bgrape, false, false, true);
      r.bgrape_init = bs.choice("init", kBgrapeInit, r.bgrape_init);
      bs.finish();
    }
    if (const Json* t = s.find("test")) {
      Section ts(*t, s.field("test"));
      r.test.enabled = ts.boolean("enabled", r.test.enabled);
      r.test.samples = static_cast<std::size_t>(
          checked_int(ts.integer("samples", static_cast<long long>(r.test.samples)),
                      ts.field("samples"), 1));
      r.test.seed = ts.seed("seed", r.test.seed);
      r.test.histogram_bins =
          checked_int(ts.integer("histogram_bins", r.test.histogram_bins),
                      ts.field("histogram_bins"), 1);
      r.test.every_samples = static_cast<std::size_t>(
          checked_int(ts.integer("every_samples", static_cast<long long>(r.test.every_samples)),
                      ts.field("every_samples"), 1));
      ts.finish();
    }
    if (const Json* w = s.find("sweep")) {
      Section ws(*w, s.field("sweep"));
      r.sweep.enabled = ws.boolean("enabled", r.sweep.enabled);
      read_axis(ws, "tau1", r.sweep.tau1);
      read_axis(ws, "tau2", r.sweep.tau2);
      r.sweep.threshold = ws.number("threshold", r.sweep.threshold);
      ws.finish();
    }
    s.finish();
  }
  top.finish();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json root;
  Json sys;
  sys["qubits"] = c.system.qubits;
  sys["drift"] = c.system.drift;
  Json controls = Json::array();
  for (const auto& spec : c.system.controls) {
    Json cj;
    cj["expr"] = spec.expr;
    cj["channel"] = spec.channel;
    controls.push_back(std::move(cj));
  }
  sys["controls"] = std::move(controls);
  root["system"] = std::move(sys);

  Json tgt;
  if (c.target.matrix) {
    tgt["matrix"] = write_matrix(*c.target.matrix);
  } else {
    tgt["gate"] = c.target.gate;
  }
  tgt["global_phase"] = c.target.global_phase;
  tgt["phase_mode"] = name_of(kPhaseModes, c.target.phase_mode);
  root["target"] = std::move(tgt);

  Json sch;
  sch["sample_period"] = c.schedule.sample_period;
  sch["slices"] = c.schedule.slices;
  sch["amplitude_bound"] =
      c.schedule.amplitude_bound ? Json(*c.schedule.amplitude_bound) : Json(nullptr);
  Json init;
  init["kind"] = name_of(kInitKinds, c.schedule.init.kind);
  init["half_width"] = c.schedule.init.half_width;
  init["value"] = c.schedule.init.value;
  init["path"] = c.schedule.init.path;
  init["seed"] = c.schedule.init.seed;
  sch["init"] = std::move(init);
  root["schedule"] = std::move(sch);

  if (c.noise.present) {
    const ClockNoiseModel& m = c.noise.model;
    Json noise;
    Json lat = Json::array();
    for (const auto& r : m.channel_latency) {
      Json lj;
      lj["lo"] = r.lo;
      lj["hi"] = r.hi;
      lat.push_back(std::move(lj));
    }
    noise["latency"] = std::move(lat);
    noise["jitter_half_width"] = m.jitter_half_width;
    noise["jitter_sharing"] = name_of(kSharing, m.jitter_sharing);
    noise["shift_turn_on"] = m.shift_turn_on;
    noise["pre_turn_on"] = name_of(kPreTurnOn, m.pre_turn_on);
    noise["seed"] = m.seed;
    noise["scale"] = c.noise.scale;
    root["noise"] = std::move(noise);
  } else {
    root["noise"] = nullptr;
  }

  const RunConfig& r = c.run;
  Json run;
  run["algorithm"] = to_string(r.algorithm);
  run["estimator_turn_on"] = name_of(kTurnOn, r.turn_on);
  run["grape"] = write_optimizer(r.grape, true, false, false);
  run["homotopic"] = write_optimizer(r.homotopic, true, true, false);
  Json bg = write_optimizer(r.bgrape, false, false, true);
  bg["init"] = name_of(kBgrapeInit, r.bgrape_init);
  run["bgrape"] = std::move(bg);
  Json test;
  test["enabled"] = r.test.enabled;
  test["samples"] = r.test.samples;
  test["seed"] = r.test.seed;
  test["histogram_bins"] = r.test.histogram_bins;
  test["every_samples"] = r.test.every_samples;
  run["test"] = std::move(test);
  Json sweep;
  sweep["enabled"] = r.sweep.enabled;
  sweep["tau1"] = write_axis(r.sweep.tau1);
  sweep["tau2"] = write_axis(r.sweep.tau2);
  sweep["threshold"] = r.sweep.threshold;
  run["sweep"] = std::move(sweep);
  root["run"] = std::move(run);
  return root;
}

void check_optimizer(const OptimizerOptions& o, const std::string& field) {
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field + ": " + e.what(), field);
  }
}

}  // namespace

OptimizerOptions default_grape_options() {
  OptimizerOptions o;
  o.max_iters = 5000;
  o.learning_rate = 0.05;
  return o;
}

OptimizerOptions default_homotopic_options() {
  OptimizerOptions o;
  o.max_iters = 1000;
  o.learning_rate = 0.05;
  o.j0_excursion_limit = 1e-3;
  return o;
}

OptimizerOptions default_bgrape_options() {
  OptimizerOptions o;
  o.max_iters = 40000;
  o.learning_rate = 0.005;
  o.batch_size = 5;
  return o;
}

ExperimentConfig paper_config() {
  ExperimentConfig c;
  c.system.qubits = 2;
  c.system.drift = "0.06283185307179587 * Z Z";
  c.system.controls = {{"(SP + SM) I", 0}, {"i(SP - SM) I", 0}, {"I (SP + SM)", 1},
                       {"I i(SP - SM)", 1}};
  c.target.gate = "CNOT";
  c.target.global_phase = 0.7853981633974483;
  c.target.phase_mode = PhaseMode::plain;
  c.schedule.sample_period = 1.0;
  c.schedule.slices = 50;
  c.schedule.init.kind = InitKind::random_uniform;
  c.schedule.init.half_width = 0.12566370614359174;
  c.schedule.init.seed = 1;
  c.noise.present = true;
  c.noise.model.channel_latency = {UniformRange{0.0, 0.4}, UniformRange{0.0, 0.4}};
  c.noise.model.jitter_half_width = 0.05;
  c.noise.model.seed = 7;
  c.run.grape = default_grape_options();
  c.run.homotopic = default_homotopic_options();
  c.run.bgrape = default_bgrape_options();
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    int column = 0;
    const int line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1, &column);
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": syntax error: " << e.what();
    throw ConfigError(os.str(), {}, line);
  }
  ExperimentConfig c = from_json(root, base_dir);
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.field(), e.line());
  }
}

std::string serialize_config(const ExperimentConfig& config) {
  return to_json(config).dump(2) + "\n";
}

void validate_config(const ExperimentConfig& c) {
  const auto fail = [](const std::string& field, const std::string& msg) {
    Section::fail(field, msg);
  };
  if (c.system.controls.empty()) fail("system.controls", "at least one control is required");
  auto check_expr = [&](const std::string& expr, const std::string& field) {
    try {
      const int q = operator_qubit_count(expr);
      if (q != c.system.qubits) {
        fail(field, "acts on " + std::to_string(q) + " qubit(s), system.qubits is " +
                        std::to_string(c.system.qubits));
      }
    } catch (const OperatorExprError& e) {
      fail(field, std::string(e.what()) + " (at offset " + std::to_string(e.position()) + ")");
    }
  };
  if (c.system.drift.empty()) {
    fail("system.drift", "missing (use \"0 * I...\" for no drift)");
  }
  check_expr(c.system.drift, "system.drift");
  for (std::size_t i = 0; i < c.system.controls.size(); ++i) {
    check_expr(c.system.controls[i].expr, "system.controls[" + std::to_string(i) + "].expr");
  }
  try {
    (void)build_system(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail("system", e.what());
  }

  try {
    const CMatrix t = build_target(c);
    if (unitarity_defect(t) > 1e-9) fail("target", "target is not unitary");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail("target", e.what());
  }

  if (!(c.schedule.sample_period > 0.0)) fail("schedule.sample_period", "must be > 0");
  if (c.schedule.amplitude_bound && !(*c.schedule.amplitude_bound > 0.0)) {
    fail("schedule.amplitude_bound", "must be > 0 or null");
  }
  if (c.schedule.init.kind == InitKind::random_uniform && !(c.schedule.init.half_width >= 0.0)) {
    fail("schedule.init.half_width", "must be >= 0");
  }
  if (c.schedule.init.kind == InitKind::csv && c.schedule.init.path.empty()) {
    fail("schedule.init.path", "required when kind is csv");
  }

  if (c.noise.present) {
    if (!(c.noise.scale >= 0.0)) fail("noise.scale", "must be >= 0");
    const int channels = build_system(c).num_channels();
    if (c.noise.model.num_channels() != channels) {
      fail("noise.latency", "expected one entry per channel (" + std::to_string(channels) + ")");
    }
    try {
      build_noise(c).validate(c.schedule.sample_period);
    } catch (const std::invalid_argument& e) {
      fail("noise", e.what());
    }
  }

  check_optimizer(c.run.grape, "run.grape");
  check_optimizer(c.run.homotopic, "run.homotopic");
  check_optimizer(c.run.bgrape, "run.bgrape");

  const SweepConfig& s = c.run.sweep;
  for (const auto& [axis, name] : {std::pair{&s.tau1, "run.sweep.tau1"},
                                   std::pair{&s.tau2, "run.sweep.tau2"}}) {
    if (!(axis->lo >= 0.0 && axis->hi >= axis->lo && axis->hi < c.schedule.sample_period)) {
      fail(name, "grid must satisfy 0 <= lo <= hi < sample_period");
    }
  }
  if (!(s.threshold > 0.0)) fail("run.sweep.threshold", "must be > 0");
}

void apply_seed(ExperimentConfig& config, std::uint64_t seed) {
  config.schedule.init.seed = derive_seed(seed, 1);
  config.noise.model.seed = derive_seed(seed, 2);
}

std::string to_string(Algorithm a) { return name_of(kAlgorithms, a); }

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  return value_of(kAlgorithms, name);
}

QuantumSystem build_system(const ExperimentConfig& c) {
  std::vector<CMatrix> controls;
  std::vector<int> channels;
  for (const auto& spec : c.system.controls) {
    controls.push_back(build_operator(spec.expr));
    channels.push_back(spec.channel);
  }
  return QuantumSystem(build_operator(c.system.drift), std::move(controls), std::move(channels));
}

CMatrix build_target(const ExperimentConfig& c) {
  CMatrix gate;
  if (c.target.matrix) {
    gate = *c.target.matrix;
  } else {
    const auto named = named_gate(c.target.gate);
    if (!named) Section::fail("target.gate", "unknown gate \"" + c.target.gate + "\"");
    gate = *named;
  }
  const auto dim = static_cast<Eigen::Index>(1) << c.system.qubits;
  if (gate.rows() != dim) {
    Section::fail("target", "dimension " + std::to_string(gate.rows()) + " does not match " +
                                std::to_string(c.system.qubits) + " qubit(s)");
  }
  return std::polar(1.0, c.target.global_phase) * gate;
}

ClockNoiseModel build_noise(const ExperimentConfig& c) {
  if (!c.noise.present) return ClockNoiseModel::noiseless(build_system(c).num_channels());
  return c.noise.model.scaled(c.noise.scale);
}

ControlSchedule build_initial_schedule(const ExperimentConfig& c) {
  const int m = static_cast<int>(c.system.controls.size());
  const InitConfig& init = c.schedule.init;
  switch (init.kind) {
    case InitKind::constant: {
      RMatrix u = RMatrix::Constant(m, c.schedule.slices, init.value);
      return ControlSchedule(c.schedule.sample_period, std::move(u), c.schedule.amplitude_bound);
    }
    case InitKind::csv: {
      const std::filesystem::path p = c.base_dir.empty() ? std::filesystem::path(init.path)
                                                          : c.base_dir / init.path;
      RMatrix u = read_schedule_csv(p);
      if (u.rows() != m || u.cols() != c.schedule.slices) {
        Section::fail("schedule.init.path", "schedule file shape does not match controls x slices");
      }
      return ControlSchedule(c.schedule.sample_period, std::move(u), c.schedule.amplitude_bound);
    }
    case InitKind::random_uniform:
    default: {
      const ControlSchedule s = presets::random_schedule(m, c.schedule.slices,
                                                         c.schedule.sample_period,
                                                         init.half_width, init.seed);
      return ControlSchedule(c.schedule.sample_period, s.amplitudes(), c.schedule.amplitude_bound);
    }
  }
}

EstimatorOptions build_estimator_options(const ExperimentConfig& c) {
  EstimatorOptions o;
  switch (c.run.turn_on) {
    case TurnOnMode::include:
      o.include_turn_on = true;
      break;
    case TurnOnMode::exclude:
      o.include_turn_on = false;
      break;
    case TurnOnMode::automatic:
      o.include_turn_on = c.noise.present && c.noise.model.shift_turn_on &&
                          c.noise.model.pre_turn_on == PreTurnOn::zero;
      break;
  }
  return o;
}

}  // namespace clockrobust::tools
