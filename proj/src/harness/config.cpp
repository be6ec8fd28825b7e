#include "semilab/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "semilab/core/errors.hpp"

namespace semilab::harness {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Flow: return "flow";
    case ExperimentKind::Quasimode: return "quasimode";
    case ExperimentKind::Pairings: return "pairings";
    case ExperimentKind::Observability: return "observability";
    case ExperimentKind::Gaarding: return "gaarding";
    case ExperimentKind::Suite: return "suite";
  }
  return "unknown";
}

std::optional<ExperimentKind> kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::Flow, ExperimentKind::Quasimode, ExperimentKind::Pairings,
                 ExperimentKind::Observability, ExperimentKind::Gaarding, ExperimentKind::Suite})
    if (name == to_string(k)) return k;
  if (name == "full-suite") return ExperimentKind::Suite;
  return std::nullopt;
}

std::string closest_key(const std::string& key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = 4;
  for (const auto& c : candidates) {
    std::vector<std::size_t> prev(c.size() + 1), cur(c.size() + 1);
    for (std::size_t j = 0; j <= c.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= key.size(); ++i) {
      cur[0] = i;
      for (std::size_t j = 1; j <= c.size(); ++j)
        cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (key[i - 1] == c[j - 1] ? 0 : 1)});
      std::swap(prev, cur);
    }
    if (prev[c.size()] < best_d) best_d = prev[c.size()], best = c;
  }
  return best;
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object that remembers which keys were consumed.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) {
    allowed_.push_back(key);
    return obj_.contains(key);
  }
  const json& raw(const std::string& key) { return obj_.at(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    return v.get<double>();
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key) || obj_.at(key).is_null()) return std::nullopt;
    return number(key, 0.0);
  }
  long long integer(const std::string& key, long long def) {
    if (!has(key)) return def;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    return v.get<long long>();
  }
  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def) {
    if (!has(key)) return def;
    const auto& v = obj_.at(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (std::find(allowed_.begin(), allowed_.end(), key) != allowed_.end()) continue;
      const auto hint = closest_key(key, allowed_);
      throw ConfigError(join(path_, key),
                        "unknown key '" + key + "'" + (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string> allowed_;
};

// Declares every key of a section up front so an unknown key is reported against the
// full list even when the document omits the rest.
void declare(Reader& r, std::initializer_list<const char*> keys) {
  for (const char* k : keys) r.has(k);
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

void check_h_list(const std::vector<double>& h, const std::string& path, std::size_t min_size, bool geometric) {
  require(h.size() >= min_size, path, "needs at least " + std::to_string(min_size) + " values");
  for (std::size_t i = 0; i < h.size(); ++i) {
    require(h[i] > 0.0 && h[i] < 1.0, path, "values must lie in (0, 1)");
    if (i > 0) require(h[i] < h[i - 1], path, "must be strictly decreasing");
  }
  if (geometric && h.size() >= 2) {
    const double ratio = h[1] / h[0];
    for (std::size_t i = 2; i < h.size(); ++i)
      require(std::abs(h[i] / h[i - 1] - ratio) <= 1e-6 * ratio, path, "must be geometrically spaced");
  }
}

bool power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

core::PotentialModel parse_potential(const json& j, const std::string& path) {
  Reader r(j, path);
  declare(r, {"preset", "modes", "short_range", "energy"});
  const double energy = r.number("energy", 0.0);
  const bool preset = r.has("preset"), modes = r.has("modes");
  require(preset != modes, path, "give exactly one of 'preset' or 'modes'");
  std::optional<core::ShortRange> sr;
  if (r.has("short_range")) {
    Reader s(r.raw("short_range"), r.path("short_range"));
    core::ShortRange v;
    v.amplitude = s.number("amplitude", 0.0);
    v.decay_exponent = s.number("decay_exponent", 2.0);
    v.radial_scale = s.number("radial_scale", 1.0);
    s.finish();
    require(v.decay_exponent > 1.0, s.path("decay_exponent"), "must exceed 1");
    require(v.radial_scale > 0.0, s.path("radial_scale"), "must be positive");
    sr = v;
  }
  std::vector<core::FourierMode> list;
  if (preset) {
    const auto name = r.string("preset", "");
    if (name == "cosine")
      list = {{1, 1.0, 0.0}};
    else if (name == "degenerate-quartic")
      list = {{0, 1.5, 0.0}, {1, -2.0, 0.0}, {2, 0.5, 0.0}};
    else if (name == "one-minus-cosine")
      list = {{0, 1.0, 0.0}, {1, -1.0, 0.0}};
    else if (name == "zero")
      list = {};
    else {
      const auto hint = closest_key(name, {"cosine", "degenerate-quartic", "one-minus-cosine", "zero"});
      throw ConfigError(r.path("preset"),
                        "unknown preset '" + name + "'" + (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
    }
  } else {
    const auto& arr = r.raw("modes");
    require(arr.is_array(), r.path("modes"), "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader m(arr[i], r.path("modes") + "[" + std::to_string(i) + "]");
      core::FourierMode fm;
      fm.m = static_cast<int>(m.integer("m", -1));
      fm.cos_coeff = m.number("cos", 0.0);
      fm.sin_coeff = m.number("sin", 0.0);
      m.finish();
      require(fm.m >= 0, m.path("m"), "mode must be a nonnegative integer");
      list.push_back(fm);
    }
  }
  r.finish();
  try {
    return core::PotentialModel(list, sr, energy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  Reader top(doc, "");
  declare(top, {"schema_version", "kind", "potential", "seed", "threads", "tol", "flow", "quasimode", "pairings",
                "observability", "gaarding"});
  cfg.schema_version = static_cast<int>(top.integer("schema_version", kSchemaVersion));
  require(cfg.schema_version == kSchemaVersion, "schema_version",
          "unsupported schema version " + std::to_string(cfg.schema_version) + " (expected " +
              std::to_string(kSchemaVersion) + ")");
  if (top.has("kind")) {
    const auto name = top.string("kind", "");
    cfg.kind = kind_from_string(name);
    if (!cfg.kind) {
      const auto hint =
          closest_key(name, {"flow", "quasimode", "pairings", "observability", "gaarding", "suite", "full-suite"});
      throw ConfigError("kind", "unknown experiment kind '" + name + "'" +
                                    (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
    }
  }
  if (top.has("potential")) {
    cfg.potential_record = doc.at("potential");
    cfg.model = parse_potential(doc.at("potential"), "potential");
  } else {
    cfg.potential_record = {{"preset", "degenerate-quartic"}};
  }
  const long long seed = top.integer("seed", 1);
  require(seed >= 0, "seed", "must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  const long long threads = top.integer("threads", 1);
  require(threads >= 1 && threads <= 256, "threads", "must lie in [1, 256]");
  cfg.threads = static_cast<unsigned>(threads);
  cfg.tol = top.number("tol", 0.1);
  require(cfg.tol > 0.0, "tol", "must be positive");

  if (top.has("flow")) {
    Reader r(doc.at("flow"), "flow");
    declare(r, {"tol", "t_end", "output_samples", "initial_conditions", "random_count"});
    auto& f = cfg.flow;
    f.tol = r.number("tol", f.tol);
    f.t_end = r.number("t_end", f.t_end);
    f.output_samples = static_cast<int>(r.integer("output_samples", f.output_samples));
    f.random_count = static_cast<int>(r.integer("random_count", f.random_count));
    if (r.has("initial_conditions")) {
      const auto& arr = r.raw("initial_conditions");
      require(arr.is_array(), r.path("initial_conditions"), "expected an array of [rho, theta, eta]");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto p = r.path("initial_conditions") + "[" + std::to_string(i) + "]";
        require(arr[i].is_array() && arr[i].size() == 3, p, "expected [rho, theta, eta]");
        for (const auto& x : arr[i]) require(x.is_number(), p, "expected numbers");
        f.initial_conditions.push_back({arr[i][0].get<double>(), arr[i][1].get<double>(), arr[i][2].get<double>()});
      }
    }
    r.finish();
    require(f.tol > 0.0, "flow.tol", "must be positive");
    require(f.t_end != 0.0 && std::isfinite(f.t_end), "flow.t_end", "must be finite and nonzero");
    require(f.output_samples >= 2, "flow.output_samples", "must be at least 2");
    require(f.random_count >= 0, "flow.random_count", "must be nonnegative");
  }
  if (top.has("quasimode")) {
    Reader r(doc.at("quasimode"), "quasimode");
    declare(r, {"case", "k", "epsilon", "theta0", "energy", "h_list", "export_field"});
    auto& q = cfg.quasimode;
    q.case_id = static_cast<int>(r.integer("case", q.case_id));
    if (r.has("k")) q.k = static_cast<int>(r.integer("k", 0));
    q.epsilon = r.number("epsilon", q.epsilon);
    q.theta0 = r.number("theta0", q.theta0);
    q.energy = r.optional_number("energy");
    q.h_list = r.numbers("h_list", q.h_list);
    q.export_field = r.boolean("export_field", q.export_field);
    r.finish();
  }
  require(cfg.quasimode.case_id == 1 || cfg.quasimode.case_id == 2, "quasimode.case", "must be 1 or 2");
  require(!cfg.quasimode.k || *cfg.quasimode.k >= 0, "quasimode.k", "must be nonnegative");
  require(cfg.quasimode.epsilon > 0.0, "quasimode.epsilon", "must be positive");
  require(cfg.quasimode.case_id == 1 || cfg.quasimode.energy.has_value(), "quasimode.energy",
          "case 2 needs an energy above max V");
  check_h_list(cfg.quasimode.h_list, "quasimode.h_list", 4, true);

  if (top.has("pairings")) {
    Reader r(doc.at("pairings"), "pairings");
    declare(r, {"h_list", "cutoff", "delta", "max_spacing", "box_factor", "stride"});
    auto& p = cfg.pairings;
    p.h_list = r.numbers("h_list", p.h_list);
    p.cutoff = r.string("cutoff", p.cutoff);
    p.delta = r.number("delta", p.delta);
    p.max_spacing = r.number("max_spacing", p.max_spacing);
    p.box_factor = r.number("box_factor", p.box_factor);
    p.stride = static_cast<int>(r.integer("stride", p.stride));
    r.finish();
  }
  check_h_list(cfg.pairings.h_list, "pairings.h_list", 4, true);
  require(cfg.pairings.cutoff == "j-step" || cfg.pairings.cutoff == "J-log", "pairings.cutoff",
          "must be 'j-step' or 'J-log'");
  require(cfg.pairings.delta > 0.0 && cfg.pairings.delta <= 1.0, "pairings.delta", "must lie in (0, 1]");
  require(cfg.pairings.max_spacing > 0.0, "pairings.max_spacing", "must be positive");
  require(cfg.pairings.box_factor > 1.0, "pairings.box_factor", "must exceed 1");
  require(cfg.pairings.stride >= 1, "pairings.stride", "must be at least 1");

  if (top.has("observability")) {
    Reader r(doc.at("observability"), "observability");
    declare(r, {"h_list", "C", "exponent", "R", "T", "dt", "half_width", "points"});
    auto& o = cfg.observability;
    o.h_list = r.numbers("h_list", o.h_list);
    o.C = r.number("C", o.C);
    o.exponent = r.optional_number("exponent");
    o.R = r.number("R", o.R);
    o.T = r.number("T", o.T);
    o.dt = r.number("dt", o.dt);
    o.half_width = r.number("half_width", o.half_width);
    o.points = static_cast<int>(r.integer("points", o.points));
    r.finish();
  }
  {
    const auto& o = cfg.observability;
    check_h_list(o.h_list, "observability.h_list", 1, false);
    require(o.C > 0.0, "observability.C", "must be positive");
    require(o.T > 0.0, "observability.T", "must be positive");
    require(o.dt > 0.0, "observability.dt", "must be positive");
    const double n = o.T / o.dt;
    require(std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n), "observability.dt", "T/dt must be an integer");
    require(o.half_width > 0.0, "observability.half_width", "must be positive");
    require(power_of_two(o.points) && o.points >= 16, "observability.points", "must be a power of two >= 16");
  }
  if (top.has("gaarding")) {
    Reader r(doc.at("gaarding"), "gaarding");
    declare(r, {"h_list", "points", "trials", "rho", "theta", "w", "radius"});
    auto& g = cfg.gaarding;
    g.h_list = r.numbers("h_list", g.h_list);
    g.points = static_cast<int>(r.integer("points", g.points));
    g.trials = static_cast<int>(r.integer("trials", g.trials));
    g.rho = r.number("rho", g.rho);
    g.theta = r.number("theta", g.theta);
    g.w = r.number("w", g.w);
    g.radius = r.number("radius", g.radius);
    r.finish();
  }
  check_h_list(cfg.gaarding.h_list, "gaarding.h_list", 2, false);
  require(power_of_two(cfg.gaarding.points) && cfg.gaarding.points >= 8 && cfg.gaarding.points <= 32,
          "gaarding.points", "must be a power of two in [8, 32]");
  require(cfg.gaarding.trials >= 20, "gaarding.trials", "must be at least 20");
  require(cfg.gaarding.radius > 0.0, "gaarding.radius", "must be positive");
  top.finish();

  // Cross-field check: the quasimode family must fit the potential.
  quasimode_spec(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "invalid JSON in '" + path.string() + "': " + e.what());
  }
  return parse_config(doc);
}

quasimodes::QuasimodeSpec quasimode_spec(const ExperimentConfig& cfg) {
  const auto& q = cfg.quasimode;
  const int k = q.k.value_or(std::min(core::critical_order(cfg.model, q.theta0), 8));
  quasimodes::QuasimodeSpec spec = q.case_id == 1
                                       ? quasimodes::make_case1_spec(cfg.model, q.theta0, k, q.epsilon)
                                       : quasimodes::make_case2_spec(cfg.model, q.theta0, k, *q.energy, q.epsilon);
  try {
    spec.validate(cfg.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("quasimode", e.what());
  }
  return spec;
}

double observability_exponent(const ExperimentConfig& cfg) {
  return cfg.observability.exponent.value_or(1.0 / (quasimode_spec(cfg).k + 1.0));
}

ordered_json ExperimentConfig::resolved() const {
  const auto spec = quasimode_spec(*this);
  ordered_json j;
  j["schema_version"] = schema_version;
  j["kind"] = kind ? ordered_json(to_string(*kind)) : ordered_json(nullptr);
  j["potential"] = potential_record;
  j["seed"] = seed;
  j["threads"] = threads;
  j["tol"] = tol;
  ordered_json ics = ordered_json::array();
  for (const auto& p : flow.initial_conditions) ics.push_back({p.rho, p.theta, p.eta});
  j["flow"] = {{"tol", flow.tol},
               {"t_end", flow.t_end},
               {"output_samples", flow.output_samples},
               {"initial_conditions", ics},
               {"random_count", flow.random_count}};
  j["quasimode"] = {{"case", spec.case_id},     {"k", spec.k},           {"epsilon", spec.epsilon_exp},
                    {"theta0", spec.theta0},    {"energy", spec.energy}, {"h_list", quasimode.h_list},
                    {"export_field", quasimode.export_field}};
  j["pairings"] = {{"h_list", pairings.h_list},         {"cutoff", pairings.cutoff},
                   {"delta", pairings.delta},           {"max_spacing", pairings.max_spacing},
                   {"box_factor", pairings.box_factor}, {"stride", pairings.stride}};
  j["observability"] = {{"h_list", observability.h_list},
                        {"C", observability.C},
                        {"exponent", observability_exponent(*this)},
                        {"R", observability.R},
                        {"T", observability.T},
                        {"dt", observability.dt},
                        {"half_width", observability.half_width},
                        {"points", observability.points}};
  j["gaarding"] = {{"h_list", gaarding.h_list}, {"points", gaarding.points}, {"trials", gaarding.trials},
                   {"rho", gaarding.rho},       {"theta", gaarding.theta},   {"w", gaarding.w},
                   {"radius", gaarding.radius}};
  return j;
}

}  // namespace semilab::harness
