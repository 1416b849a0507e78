#include "cfmimo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace cfmimo {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " +
                    std::string(key) + " (expected " + std::string(expected) +
                    ")");
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, value, "a finite number");
  }
  return out;
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view value) {
  Int out = 0;
  const auto v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, value, "an integer");
  }
  return out;
}

// "a,b,c" or an inclusive range "start:step:stop".
std::vector<double> to_double_list(std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (v.empty()) bad_value(key, value, "a non-empty list");
  if (v.find(':') != std::string_view::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) bad_value(key, value, "start:step:stop");
    const double start = to_double(key, parts[0]);
    const double step = to_double(key, parts[1]);
    const double stop = to_double(key, parts[2]);
    if (!(step > 0.0) || stop < start) bad_value(key, value, "start:step:stop");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out;
  for (auto part : split(v, ',')) out.push_back(to_double(key, part));
  return out;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string_view to_string(ApPlacement placement) {
  switch (placement) {
    case ApPlacement::kAuto: return "auto";
    case ApPlacement::kGrid: return "grid";
    case ApPlacement::kRandom: return "random";
  }
  return "auto";
}

ApPlacement to_placement(std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (v == "auto") return ApPlacement::kAuto;
  if (v == "grid") return ApPlacement::kGrid;
  if (v == "random") return ApPlacement::kRandom;
  bad_value(key, value, "auto, grid or random");
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Member>
Field double_field(std::string key, Member member) {
  return {std::move(key),
          [member](ExperimentConfig& c, std::string_view k, std::string_view v) {
            member(c) = to_double(k, v);
          },
          [member](const ExperimentConfig& c) {
            return format_double(member(c));
          }};
}

template <typename Member>
Field int_field(std::string key, Member member) {
  return {std::move(key),
          [member](ExperimentConfig& c, std::string_view k, std::string_view v) {
            member(c) = to_integer<int>(k, v);
          },
          [member](const ExperimentConfig& c) {
            return std::to_string(member(c));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(int_field("system.L", [](auto& c) -> auto& { return c.system.num_aps; }));
    f.push_back(int_field("system.N", [](auto& c) -> auto& { return c.system.antennas_per_ap; }));
    f.push_back(int_field("system.K", [](auto& c) -> auto& { return c.system.num_ues; }));
    f.push_back(int_field("system.n", [](auto& c) -> auto& { return c.system.num_scheduled; }));
    f.push_back(double_field("system.area_side", [](auto& c) -> auto& { return c.system.area_side_m; }));
    f.push_back(double_field("system.sigma_w2", [](auto& c) -> auto& { return c.system.sigma_w2; }));
    f.push_back(double_field("system.P_budget", [](auto& c) -> auto& { return c.system.power_budget; }));
    f.push_back(double_field("system.ap_selection_delta", [](auto& c) -> auto& { return c.system.ap_selection_delta; }));
    f.push_back({"system.ap_placement",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                   c.system.ap_placement = to_placement(k, v);
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.system.ap_placement)); }});
    f.push_back(double_field("system.pathloss.d0", [](auto& c) -> auto& { return c.system.pathloss.d0_m; }));
    f.push_back(double_field("system.pathloss.d1", [](auto& c) -> auto& { return c.system.pathloss.d1_m; }));
    f.push_back(double_field("system.pathloss.l0_db", [](auto& c) -> auto& { return c.system.pathloss.l0_db; }));
    f.push_back(double_field("system.pathloss.shadowing_std_db", [](auto& c) -> auto& { return c.system.pathloss.shadowing_std_db; }));
    f.push_back(double_field("system.pathloss.reference_distance", [](auto& c) -> auto& { return c.system.pathloss.reference_distance_m; }));
    f.push_back(double_field("system.pathloss.min_distance", [](auto& c) -> auto& { return c.system.pathloss.min_distance_m; }));
    f.push_back({"snr_grid_db",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.snr_grid_db = to_double_list(k, v); },
                 [](const ExperimentConfig& c) { return join_doubles(c.snr_grid_db); }});
    f.push_back({"alpha_grid",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) { c.alpha_grid = to_double_list(k, v); },
                 [](const ExperimentConfig& c) { return join_doubles(c.alpha_grid); }});
    f.push_back(int_field("n_drops", [](auto& c) -> auto& { return c.n_drops; }));
    f.push_back({"precoders",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                   std::vector<PrecoderKind> kinds;
                   for (auto name : split(trim(v), ',')) kinds.push_back(parse_precoder_kind(name));
                   if (kinds.empty()) bad_value(k, v, "zf,mmse,robust subset");
                   c.precoders = std::move(kinds);
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.precoders.size(); ++i) {
                     if (i) out += ',';
                     out += to_string(c.precoders[i]);
                   }
                   return out;
                 }});
    f.push_back(int_field("robust.i_max", [](auto& c) -> auto& { return c.robust.i_max; }));
    f.push_back(double_field("robust.epsilon", [](auto& c) -> auto& { return c.robust.epsilon; }));
    f.push_back(double_field("robust.jitter", [](auto& c) -> auto& { return c.robust.jitter_scale; }));
    f.push_back({"robust.lambda_rule",
                 [](ExperimentConfig& c, std::string_view, std::string_view v) {
                   c.robust.lambda_rule = parse_lambda_rule(trim(v));
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.robust.lambda_rule)); }});
    f.push_back({"output_path",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                   if (trim(v).empty()) bad_value(k, v, "a path");
                   c.output_path = std::string(trim(v));
                 },
                 [](const ExperimentConfig& c) { return c.output_path; }});
    f.push_back({"master_seed",
                 [](ExperimentConfig& c, std::string_view k, std::string_view v) {
                   c.master_seed = to_integer<std::uint64_t>(k, v);
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.master_seed); }});
    f.push_back(int_field("workers", [](auto& c) -> auto& { return c.workers; }));
    return f;
  }();
  return table;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, end};
}

void SystemConfig::validate() const {
  if (num_aps < 1) throw ConfigError("system.L must be >= 1");
  if (antennas_per_ap < 1) throw ConfigError("system.N must be >= 1");
  if (num_scheduled < 1) throw ConfigError("system.n must be >= 1");
  if (num_scheduled > num_antennas()) throw ConfigError("system.n must be <= L*N");
  if (num_ues < num_scheduled) throw ConfigError("system.K must be >= system.n");
  if (!(area_side_m > 0.0)) throw ConfigError("system.area_side must be > 0");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
  if (!(rho_f > 0.0)) throw ConfigError("rho_f must be > 0");
  if (!(sigma_w2 > 0.0)) throw ConfigError("system.sigma_w2 must be > 0");
  if (!(power_budget > 0.0)) throw ConfigError("system.P_budget must be > 0");
  if (!(ap_selection_delta > 0.0 && ap_selection_delta <= 1.0)) {
    throw ConfigError("system.ap_selection_delta must lie in (0, 1]");
  }
  if (ap_placement == ApPlacement::kGrid) {
    const int side = static_cast<int>(std::lround(std::sqrt(num_aps)));
    if (side * side != num_aps) throw ConfigError("grid placement needs a square L");
  }
  const PathlossParams& p = pathloss;
  if (!(p.d0_m > 0.0 && p.d1_m > p.d0_m)) {
    throw ConfigError("pathloss breakpoints need 0 < d0 < d1");
  }
  if (!(p.shadowing_std_db >= 0.0)) throw ConfigError("shadowing std must be >= 0");
  if (!(p.reference_distance_m > 0.0)) throw ConfigError("reference distance must be > 0");
  if (!(p.min_distance_m > 0.0)) throw ConfigError("minimum distance must be > 0");
}

void ExperimentConfig::validate() const {
  system.validate();
  robust.validate();
  if (n_drops < 1) throw ConfigError("n_drops must be >= 1");
  if (snr_grid_db.empty()) throw ConfigError("snr_grid_db must be non-empty");
  if (alpha_grid.empty()) throw ConfigError("alpha_grid must be non-empty");
  for (double snr : snr_grid_db) {
    if (!std::isfinite(snr)) throw ConfigError("SNR values must be finite");
  }
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a < 1.0)) throw ConfigError("alpha_grid values must lie in [0, 1)");
  }
  if (precoders.empty()) throw ConfigError("precoders must be non-empty");
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_settings(ExperimentConfig& cfg, const KeyValues& kv) {
  for (const auto& [key, value] : kv) apply_setting(cfg, key, value);
}

KeyValues to_key_values(const ExperimentConfig& cfg) {
  KeyValues out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.push_back(f.key);
  return out;
}

}  // namespace cfmimo
