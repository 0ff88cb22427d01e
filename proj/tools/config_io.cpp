// SPDX-License-Identifier: Apache-2.0
#include "config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bsm::cli {

using nlohmann::json;

namespace {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<PulseKind> pulse_names[] = {
    {PulseKind::sinc, "sinc"}, {PulseKind::rrc, "rrc"}, {PulseKind::triangular, "triangular"}};
constexpr EnumName<Window> window_names[] = {
    {Window::rect, "rect"}, {Window::hann, "hann"}, {Window::blackman, "blackman"}};
constexpr EnumName<Truncation> trunc_names[] = {{Truncation::adjacent, "adjacent"},
                                                {Truncation::full_span, "full_span"}};
constexpr EnumName<TagMode> tag_names[] = {{TagMode::designed, "designed"},
                                           {TagMode::random, "random"},
                                           {TagMode::projection_only, "projection_only"},
                                           {TagMode::eigen, "eigen"},
                                           {TagMode::disabled, "disabled"}};
constexpr EnumName<TiiiMode> tiii_names[] = {{TiiiMode::fixed, "fixed"}, {TiiiMode::derived, "derived"}};
constexpr EnumName<BudgetSplit> split_names[] = {{BudgetSplit::symmetric, "symmetric"},
                                                 {BudgetSplit::optimized, "optimized"}};

template <class E, std::size_t N>
const char* to_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

template <class E, std::size_t N>
E from_name(const EnumName<E> (&table)[N], const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  const auto s = j.get<std::string>();
  for (const auto& e : table)
    if (s == e.name) return e.value;
  std::string opts;
  for (const auto& e : table) opts += std::string(opts.empty() ? "" : ", ") + e.name;
  throw ConfigError(path, "unknown value '" + s + "' (expected one of " + opts + ")");
}

// Overlay `user` onto `base`, rejecting keys that base does not have.
void merge(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string p = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(p, "unknown key");
    json& slot = base[it.key()];
    if (slot.is_object())
      merge(slot, it.value(), p);
    else
      slot = it.value();
  }
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
  const double v = num(j, path);
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (std::floor(v) != v || std::fabs(v) > 9.0e15) throw ConfigError(path, "expected an integer");
  return static_cast<std::int64_t>(v);
}

std::uint64_t unsigned_integer(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const std::int64_t v = integer(j, path);
  if (v < 0) throw ConfigError(path, "must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

int small_int(const json& j, const std::string& path) {
  const std::int64_t v = integer(j, path);
  if (v < -(1LL << 30) || v > (1LL << 30)) throw ConfigError(path, "out of range");
  return static_cast<int>(v);
}

}  // namespace

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["arrays"] = {{"m_ant", c.arrays.m_ant}, {"n_bm", c.arrays.n_bm}, {"d_bs", c.arrays.d_bs}, {"d_bm", c.arrays.d_bm}};
  j["channel"] = {{"kappa", c.channel.kappa},         {"paths", c.channel.paths},   {"scatterers", c.channel.scatterers},
                  {"beta0_abs", c.channel.beta0_abs}, {"scr_db", c.channel.scr_db}, {"omega", c.channel.omega}};
  j["waveform"] = {{"n_s", c.waveform.n_s},
                   {"pulse",
                    {{"kind", to_name(pulse_names, c.waveform.pulse.kind)},
                     {"span", c.waveform.pulse.span},
                     {"rolloff", c.waveform.pulse.rolloff},
                     {"window", to_name(window_names, c.waveform.pulse.window)}}},
                   {"truncate", to_name(trunc_names, c.waveform.truncate)},
                   {"clutter_columns", c.waveform.clutter_columns},
                   {"grid_points", c.waveform.grid_points},
                   {"tag", to_name(tag_names, c.waveform.tag)}};
  j["detector"] = {{"p_fa_sys", c.detector.p_fa_sys},
                   {"sigma2", c.detector.sigma2},
                   {"p_tx", c.detector.p_tx},
                   {"f_s", c.detector.f_s}};
  j["timing"] = {{"t_frame", c.timing.t_frame}, {"t_dwell", c.timing.t_dwell},
                 {"t_iii", c.timing.t_iii},     {"t_iii_mode", to_name(tiii_names, c.timing.t_iii_mode)},
                 {"t_fb", c.timing.t_fb},       {"mu", c.timing.mu}};
  j["protocol"] = {{"p_req", c.protocol.p_req},
                   {"p_trig_budget", c.protocol.p_trig_budget ? json(*c.protocol.p_trig_budget) : json(nullptr)},
                   {"split", to_name(split_names, c.protocol.split)},
                   {"grid_points", c.protocol.grid_points}};
  j["mc"] = {{"trials", c.mc.trials}, {"episodes", c.mc.episodes}, {"seed", c.mc.seed}};
  return j;
}

ScenarioConfig config_from_json(const json& user) {
  json j = config_to_json(ScenarioConfig{});
  merge(j, user, "");

  ScenarioConfig c;
  const json& a = j["arrays"];
  c.arrays.m_ant = small_int(a["m_ant"], "arrays.m_ant");
  c.arrays.n_bm = small_int(a["n_bm"], "arrays.n_bm");
  c.arrays.d_bs = num(a["d_bs"], "arrays.d_bs");
  c.arrays.d_bm = num(a["d_bm"], "arrays.d_bm");

  const json& ch = j["channel"];
  c.channel.kappa = num(ch["kappa"], "channel.kappa");
  c.channel.paths = small_int(ch["paths"], "channel.paths");
  c.channel.scatterers = small_int(ch["scatterers"], "channel.scatterers");
  c.channel.beta0_abs = num(ch["beta0_abs"], "channel.beta0_abs");
  c.channel.scr_db = num(ch["scr_db"], "channel.scr_db");
  c.channel.omega = num(ch["omega"], "channel.omega");

  const json& w = j["waveform"];
  c.waveform.n_s = small_int(w["n_s"], "waveform.n_s");
  c.waveform.pulse.kind = from_name(pulse_names, w["pulse"]["kind"], "waveform.pulse.kind");
  c.waveform.pulse.span = small_int(w["pulse"]["span"], "waveform.pulse.span");
  c.waveform.pulse.rolloff = num(w["pulse"]["rolloff"], "waveform.pulse.rolloff");
  c.waveform.pulse.window = from_name(window_names, w["pulse"]["window"], "waveform.pulse.window");
  c.waveform.truncate = from_name(trunc_names, w["truncate"], "waveform.truncate");
  c.waveform.clutter_columns = small_int(w["clutter_columns"], "waveform.clutter_columns");
  c.waveform.grid_points = small_int(w["grid_points"], "waveform.grid_points");
  c.waveform.tag = from_name(tag_names, w["tag"], "waveform.tag");

  const json& d = j["detector"];
  c.detector.p_fa_sys = num(d["p_fa_sys"], "detector.p_fa_sys");
  c.detector.sigma2 = num(d["sigma2"], "detector.sigma2");
  c.detector.p_tx = num(d["p_tx"], "detector.p_tx");
  c.detector.f_s = num(d["f_s"], "detector.f_s");

  const json& t = j["timing"];
  c.timing.t_frame = num(t["t_frame"], "timing.t_frame");
  c.timing.t_dwell = num(t["t_dwell"], "timing.t_dwell");
  c.timing.t_iii = num(t["t_iii"], "timing.t_iii");
  c.timing.t_iii_mode = from_name(tiii_names, t["t_iii_mode"], "timing.t_iii_mode");
  c.timing.t_fb = num(t["t_fb"], "timing.t_fb");
  c.timing.mu = num(t["mu"], "timing.mu");

  const json& p = j["protocol"];
  c.protocol.p_req = num(p["p_req"], "protocol.p_req");
  if (!p["p_trig_budget"].is_null()) c.protocol.p_trig_budget = num(p["p_trig_budget"], "protocol.p_trig_budget");
  c.protocol.split = from_name(split_names, p["split"], "protocol.split");
  c.protocol.grid_points = small_int(p["grid_points"], "protocol.grid_points");

  const json& m = j["mc"];
  c.mc.trials = integer(m["trials"], "mc.trials");
  c.mc.episodes = integer(m["episodes"], "mc.episodes");
  c.mc.seed = unsigned_integer(m["seed"], "mc.seed");

  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << config_to_json(cfg).dump(2) << '\n';
}

ScenarioConfig apply_overrides(const ScenarioConfig& cfg, const std::vector<std::string>& overrides) {
  if (overrides.empty()) return cfg;
  json patch = json::object();
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(o, "override must look like dotted.path=value");
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    json* node = &patch;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      json& next = (*node)[parts[i]];
      if (!next.is_object()) next = json::object();
      node = &next;
    }
    (*node)[parts.back()] = value;
  }
  json full = config_to_json(cfg);
  merge(full, patch, "");
  return config_from_json(full);
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string s = config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bsm::cli
