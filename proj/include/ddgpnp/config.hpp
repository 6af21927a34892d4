#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ddgpnp/errors.hpp"
#include "ddgpnp/flux.hpp"
#include "ddgpnp/problem.hpp"

namespace ddgpnp {

inline const std::vector<std::string>& benchmark_ids() {
  static const std::vector<std::string> ids = {"example1",   "example2",   "example3-1", "example3-2",
                                               "example3-3", "example3-4", "example4",   "custom"};
  return ids;
}

enum class SteadyMode { neutral, perturbed, resume, reinit };

inline const char* to_string(SteadyMode m) {
  switch (m) {
    case SteadyMode::neutral: return "neutral";
    case SteadyMode::perturbed: return "perturbed";
    case SteadyMode::resume: return "resume";
    case SteadyMode::reinit: return "reinit";
  }
  return "?";
}

/// Everything one CLI invocation needs. All fields hold resolved values
/// (benchmark defaults applied), so serialize/parse is an exact round trip.
struct RunConfig {
  std::string benchmark;
  int variant = 1;  // example3-4 table variant (1..3)
  std::vector<int> cells;  // cells per direction, one entry per mesh
  FluxParams np_flux{4.0, 1.0 / 6.0};
  FluxParams poisson_flux{4.0, 1.0 / 6.0};
  double dt = 0.0;  // used when positive, otherwise dt = mu h^2
  double mu = 0.01;
  double final_time = 0.01;
  int rk = 2;
  std::size_t cadence = 1;
  bool limiter = true;
  CflMode cfl = CflMode::monitor;
  bool override_admissibility = false;
  std::string output = "out";
  // custom benchmark: neutral constant state on the unit interval or square
  int dim = 1;
  double value = 1.0;
  // steady-check
  SteadyMode steady_mode = SteadyMode::neutral;
  std::size_t steady_steps = 100;
  double settle_time = 1.0;
  double perturbation = 1e-3;
  // convergence: reference mesh refinement for benchmarks without exact solution
  int reference_refinement = 4;

  bool operator==(const RunConfig&) const = default;

  int dimension() const {
    if (benchmark == "custom") return dim;
    return benchmark == "example1" || benchmark == "example2" ? 1 : 2;
  }
  bool is_example3() const { return benchmark.rfind("example3-", 0) == 0; }
  int example3_case() const { return is_example3() ? benchmark.back() - '0' : 0; }
};

/// Command-line settings that take precedence over the file.
struct ConfigOverrides {
  std::optional<bool> override_admissibility;
  std::optional<CflMode> cfl;
  std::optional<int> rk;
  std::optional<bool> limiter;
  std::optional<std::string> output;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

inline std::optional<double> to_number(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Decimal number or fraction p/q.
inline double parse_real(const std::string& s, std::size_t line, const std::string& key) {
  const auto slash = s.find('/');
  std::optional<double> v;
  if (slash == std::string::npos) {
    v = to_number(s);
  } else {
    const auto p = to_number(trim(s.substr(0, slash)));
    const auto q = to_number(trim(s.substr(slash + 1)));
    if (p && q && *q != 0.0) v = *p / *q;
  }
  if (!v) throw ConfigError("type mismatch for '" + key + "': expected a number, got '" + s + "'", line);
  return *v;
}

inline long parse_integer(const std::string& s, std::size_t line, const std::string& key) {
  long v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError("type mismatch for '" + key + "': expected an integer, got '" + s + "'", line);
  }
  return v;
}

inline bool parse_bool(const std::string& s, std::size_t line, const std::string& key) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("type mismatch for '" + key + "': expected true or false, got '" + s + "'", line);
}

inline std::string format_real(double v) {
  char buf[32];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace detail

inline CflMode parse_cfl_mode(const std::string& s, std::size_t line = 0) {
  if (s == "monitor") return CflMode::monitor;
  if (s == "strict") return CflMode::strict;
  if (s == "adaptive") return CflMode::adaptive;
  throw ConfigError("cfl must be monitor, strict or adaptive, got '" + s + "'", line);
}

/// Defaults of a benchmark, applied before the file's settings.
inline RunConfig benchmark_defaults(const std::string& id) {
  RunConfig c;
  c.benchmark = id;
  if (id == "example1") {
    c.cells = {5, 10, 20, 40};
  } else if (id == "example2") {
    c.cells = {5, 10, 20};
    c.final_time = 0.5;
  } else if (id.rfind("example3-", 0) == 0) {
    c.cells = {10, 20};
    c.np_flux = c.poisson_flux = {16.0, 1.0 / 6.0};
    c.mu = 1.6e-5;
    c.final_time = 0.001;
  } else if (id == "example4") {
    c.cells = {20};
    c.np_flux = c.poisson_flux = {16.0, 1.0 / 6.0};
    c.dt = 1e-5;
    c.final_time = 0.1;
  } else if (id == "custom") {
    c.cells = {8};
    c.settle_time = 0.005;
  } else {
    throw ConfigError("unknown benchmark id '" + id + "'");
  }
  if (id == "example2") c.steady_mode = SteadyMode::reinit;
  return c;
}

/// Rejects values no run can use.
inline void validate(const RunConfig& c) {
  if (c.benchmark.empty()) throw ConfigError("benchmark id required");
  const auto& ids = benchmark_ids();
  if (std::find(ids.begin(), ids.end(), c.benchmark) == ids.end()) {
    throw ConfigError("unknown benchmark id '" + c.benchmark + "'");
  }
  if (c.cells.empty()) throw ConfigError("mesh.cells must list at least one mesh");
  for (int n : c.cells) {
    if (n < 1) throw ConfigError("mesh.cells entries must be positive, got " + std::to_string(n));
  }
  if (c.benchmark == "example3-4" && (c.variant < 1 || c.variant > 3)) {
    throw ConfigError("variant must be 1, 2 or 3 for example3-4");
  }
  if (c.dim != 1 && c.dim != 2) throw ConfigError("custom.dim must be 1 or 2");
  if (c.rk != 1 && c.rk != 2) throw ConfigError("time.rk must be 1 or 2");
  if (c.cadence == 0) throw ConfigError("time.cadence must be positive");
  if (!(c.final_time >= 0.0)) throw ConfigError("time.final_time must be nonnegative");
  if (!(c.dt > 0.0) && !(c.mu > 0.0)) throw ConfigError("one of time.dt or time.mu must be positive");
  if (!(c.perturbation >= 0.0)) throw ConfigError("steady.perturbation must be nonnegative");
  if (c.steady_steps == 0) throw ConfigError("steady.steps must be positive");
  if (c.reference_refinement < 2) throw ConfigError("convergence.reference_refinement must be at least 2");
  if (!transport_params_admissible(c.np_flux) && !c.override_admissibility) {
    throw ConfigError("np_flux beta1 = " + detail::format_real(c.np_flux.beta1) + ", beta0 = " +
                      detail::format_real(c.np_flux.beta0) +
                      " outside the admissible range beta1 in [1/8, 1/4], beta0 >= 1 "
                      "(pass --override-admissibility to run anyway)");
  }
}

/// Parse `key = value` lines grouped by `[section]` headers; `#` starts a comment.
inline RunConfig parse_config(const std::string& text, const ConfigOverrides& ov = {}) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> entries;
  std::vector<std::string> order;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::trim(std::string_view(raw).substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", line);
      section = detail::trim(std::string_view(s).substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + s + "'", line);
    const std::string key = detail::trim(std::string_view(s).substr(0, eq));
    const std::string value = detail::trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line);
    const std::string full = section.empty() ? key : section + "." + key;
    if (entries.count(full)) throw ConfigError("duplicate key '" + full + "'", line);
    entries[full] = {value, line};
    order.push_back(full);
  }

  const auto bench = entries.find("benchmark");
  if (bench == entries.end() || bench->second.value.empty()) throw ConfigError("benchmark id required");
  RunConfig c;
  try {
    c = benchmark_defaults(bench->second.value);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), bench->second.line);
  }

  for (const auto& key : order) {
    const auto& [v, ln] = entries.at(key);
    auto real = [&] { return detail::parse_real(v, ln, key); };
    auto integer = [&] { return detail::parse_integer(v, ln, key); };
    auto count = [&] {
      const long n = integer();
      if (n < 0) throw ConfigError("'" + key + "' must be nonnegative", ln);
      return static_cast<std::size_t>(n);
    };
    auto boolean = [&] { return detail::parse_bool(v, ln, key); };
    if (key == "benchmark") {
    } else if (key == "variant") {
      c.variant = static_cast<int>(integer());
    } else if (key == "beta0") {
      c.np_flux.beta0 = c.poisson_flux.beta0 = real();
    } else if (key == "beta1") {
      c.np_flux.beta1 = c.poisson_flux.beta1 = real();
    } else if (key == "mesh.cells") {
      c.cells.clear();
      for (const auto& item : detail::split_list(v)) c.cells.push_back(static_cast<int>(detail::parse_integer(item, ln, key)));
    } else if (key == "np_flux.beta0") {
      c.np_flux.beta0 = real();
    } else if (key == "np_flux.beta1") {
      c.np_flux.beta1 = real();
    } else if (key == "poisson_flux.beta0") {
      c.poisson_flux.beta0 = real();
    } else if (key == "poisson_flux.beta1") {
      c.poisson_flux.beta1 = real();
    } else if (key == "time.dt") {
      c.dt = real();
    } else if (key == "time.mu") {
      c.mu = real();
    } else if (key == "time.final_time") {
      c.final_time = real();
    } else if (key == "time.rk") {
      c.rk = static_cast<int>(integer());
    } else if (key == "time.cadence") {
      c.cadence = count();
    } else if (key == "solver.limiter") {
      c.limiter = boolean();
    } else if (key == "solver.cfl") {
      c.cfl = parse_cfl_mode(v, ln);
    } else if (key == "solver.override_admissibility") {
      c.override_admissibility = boolean();
    } else if (key == "output.directory") {
      c.output = v;
    } else if (key == "custom.dim") {
      c.dim = static_cast<int>(integer());
    } else if (key == "custom.value") {
      c.value = real();
    } else if (key == "steady.mode") {
      if (v == "neutral") c.steady_mode = SteadyMode::neutral;
      else if (v == "perturbed") c.steady_mode = SteadyMode::perturbed;
      else if (v == "resume") c.steady_mode = SteadyMode::resume;
      else if (v == "reinit") c.steady_mode = SteadyMode::reinit;
      else throw ConfigError("steady.mode must be neutral, perturbed, resume or reinit, got '" + v + "'", ln);
    } else if (key == "steady.steps") {
      c.steady_steps = count();
    } else if (key == "steady.settle_time") {
      c.settle_time = real();
    } else if (key == "steady.perturbation") {
      c.perturbation = real();
    } else if (key == "convergence.reference_refinement") {
      c.reference_refinement = static_cast<int>(integer());
    } else {
      throw ConfigError("unknown key '" + key + "'", ln);
    }
  }
  if (ov.override_admissibility) c.override_admissibility = *ov.override_admissibility;
  if (ov.cfl) c.cfl = *ov.cfl;
  if (ov.rk) c.rk = *ov.rk;
  if (ov.limiter) c.limiter = *ov.limiter;
  if (ov.output) c.output = *ov.output;
  validate(c);
  return c;
}

/// Text form accepted by parse_config, listing every field.
inline std::string serialize(const RunConfig& c) {
  using detail::format_real;
  std::ostringstream o;
  o << "benchmark = " << c.benchmark << "\n";
  o << "variant = " << c.variant << "\n\n[mesh]\ncells = ";
  for (std::size_t i = 0; i < c.cells.size(); ++i) o << (i ? ", " : "") << c.cells[i];
  o << "\n\n[np_flux]\nbeta0 = " << format_real(c.np_flux.beta0) << "\nbeta1 = " << format_real(c.np_flux.beta1)
    << "\n\n[poisson_flux]\nbeta0 = " << format_real(c.poisson_flux.beta0)
    << "\nbeta1 = " << format_real(c.poisson_flux.beta1) << "\n\n[time]\ndt = " << format_real(c.dt)
    << "\nmu = " << format_real(c.mu) << "\nfinal_time = " << format_real(c.final_time) << "\nrk = " << c.rk
    << "\ncadence = " << c.cadence << "\n\n[solver]\nlimiter = " << (c.limiter ? "true" : "false")
    << "\ncfl = " << to_string(c.cfl) << "\noverride_admissibility = " << (c.override_admissibility ? "true" : "false")
    << "\n\n[output]\ndirectory = " << c.output << "\n\n[custom]\ndim = " << c.dim << "\nvalue = " << format_real(c.value)
    << "\n\n[steady]\nmode = " << to_string(c.steady_mode) << "\nsteps = " << c.steady_steps
    << "\nsettle_time = " << format_real(c.settle_time) << "\nperturbation = " << format_real(c.perturbation)
    << "\n\n[convergence]\nreference_refinement = " << c.reference_refinement << "\n";
  return o.str();
}

/// SimConfig for the time stepper.
inline SimConfig sim_config(const RunConfig& c) {
  SimConfig s;
  s.dt = c.dt;
  s.mu = c.mu;
  s.final_time = c.final_time;
  s.rk_order = c.rk;
  s.limiter = c.limiter;
  s.cfl = c.cfl;
  s.cadence = c.cadence;
  s.override_admissibility = c.override_admissibility;
  return s;
}

}  // namespace ddgpnp
