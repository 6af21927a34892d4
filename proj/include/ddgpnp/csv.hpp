#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "ddgpnp/diagnostics.hpp"
#include "ddgpnp/errors.hpp"
#include "ddgpnp/field.hpp"

namespace ddgpnp::csv {

/// Round-trip decimal form with 15 to 17 significant digits, "nan"/"inf" for non-finite values.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out;
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

inline std::vector<std::string> diagnostics_header(const std::vector<std::string>& species) {
  std::vector<std::string> h{"t"};
  for (const auto& s : species) h.push_back("mass_" + s);
  h.push_back("energy");
  for (const auto& s : species) h.push_back("min_avg_" + s);
  for (const auto& s : species) h.push_back("min_g_" + s);
  h.push_back("theta_count");
  h.push_back("mu0");
  return h;
}

/// One row per record; min_g is the minimum of g on the test sets before limiting.
inline std::string diagnostics(const std::vector<DiagnosticsRecord>& records, const std::vector<std::string>& species) {
  std::string out = join(diagnostics_header(species)) + "\n";
  for (const auto& r : records) {
    std::vector<std::string> row{number(r.t)};
    for (double m : r.mass) row.push_back(number(m));
    row.push_back(number(r.energy));
    for (double m : r.min_average) row.push_back(number(m));
    for (std::size_t i = 0; i < species.size(); ++i) {
      row.push_back(number(i < r.min_g_before.size() ? r.min_g_before[i] : std::nan("")));
    }
    row.push_back(std::to_string(r.limited_cells));
    row.push_back(number(r.mu0));
    out += join(row) + "\n";
  }
  return out;
}

/// One convergence row: mesh label (h or N), mesh size and errors per
/// species followed by the potential error.
struct ErrorRow {
  double label = 0.0;
  double h = 0.0;
  std::vector<double> errors;
};

/// Observed order between consecutive meshes.
inline double order(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

/// errors.csv: label column, then err/order pairs; the first row has empty orders.
inline std::string errors(const std::string& label, const std::vector<std::string>& species,
                          const std::vector<ErrorRow>& rows) {
  std::vector<std::string> h{label};
  for (const auto& s : species) {
    h.push_back("err_" + s);
    h.push_back("order_" + s);
  }
  h.push_back("err_psi");
  h.push_back("order_psi");
  std::string out = join(h) + "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> row{label == "N" ? std::to_string(static_cast<long>(rows[r].label)) : number(rows[r].label)};
    for (std::size_t j = 0; j < rows[r].errors.size(); ++j) {
      row.push_back(number(rows[r].errors[j]));
      row.push_back(r == 0 ? "" : number(order(rows[r - 1].errors[j], rows[r].errors[j], rows[r - 1].h, rows[r].h)));
    }
    out += join(row) + "\n";
  }
  return out;
}

/// Snapshot: cell index and modal coefficients a0..a{n-1}.
template <int Dim>
std::string snapshot(const Field<Dim>& u) {
  constexpr int nb = Field<Dim>::num_basis;
  std::vector<std::string> h{"cell"};
  for (int b = 0; b < nb; ++b) h.push_back("a" + std::to_string(b));
  std::string out = join(h) + "\n";
  for (std::size_t k = 0; k < u.num_cells(); ++k) {
    std::vector<std::string> row{std::to_string(k)};
    for (int b = 0; b < nb; ++b) row.push_back(number(u.cell(k)[b]));
    out += join(row) + "\n";
  }
  return out;
}

template <int Dim>
Field<Dim> read_snapshot(const std::string& text, std::shared_ptr<const DgSpace<Dim>> space,
                         FieldRole role = FieldRole::density) {
  constexpr int nb = Field<Dim>::num_basis;
  Field<Dim> u(std::move(space), role);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (split(line).size() != static_cast<std::size_t>(nb + 1)) throw NumericalError("snapshot: header does not match the basis");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split(line);
    if (cols.size() != static_cast<std::size_t>(nb + 1)) throw NumericalError("snapshot: malformed row '" + line + "'");
    const auto k = static_cast<std::size_t>(std::stoul(cols[0]));
    if (k >= u.num_cells()) throw NumericalError("snapshot: cell index out of range");
    for (int b = 0; b < nb; ++b) u.cell(k)[b] = parse_number(cols[static_cast<std::size_t>(b + 1)]);
    ++rows;
  }
  if (rows != u.num_cells()) throw NumericalError("snapshot: expected " + std::to_string(u.num_cells()) + " rows");
  return u;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace ddgpnp::csv
