#pragma once

// JSON forms of measures and ensemble specs, CSV writers, and the binary
// spectrum format:
//   "DWSPEC01" | u64 N | u64 count | count * N little-endian f64 (row per sample)

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dwedge/ensemble.hpp"
#include "dwedge/errors.hpp"
#include "dwedge/freeconv.hpp"
#include "dwedge/measure.hpp"
#include "json.hpp"

namespace dwedge {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key, "missing");
  return *it;
}

inline double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline std::vector<double> as_numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Measures
//   {"kind": "atomic", "atoms": [[x, w], ...]}
//   {"kind": "point_mass", "x": c}        {"kind": "two_atom", "c": c}
//   {"kind": "grid", "lo": a, "hi": b, "values": [...]}
//   {"kind": "jacobi", "a": a, "b": b}

inline Json to_json(const Measure& m) {
  switch (m.kind()) {
    case Measure::Kind::Atomic: {
      Json atoms = Json::array();
      const auto& a = m.atoms();
      for (std::size_t i = 0; i < a.x.size(); ++i) atoms.push_back({a.x[i], a.w[i]});
      return {{"kind", "atomic"}, {"atoms", atoms}};
    }
    case Measure::Kind::Grid: {
      const auto& g = m.grid_density();
      return {{"kind", "grid"}, {"lo", g.lo}, {"hi", g.hi}, {"values", g.values}};
    }
    case Measure::Kind::Jacobi:
      return {{"kind", "jacobi"}, {"a", m.jacobi_params().a}, {"b", m.jacobi_params().b}};
  }
  return {};
}

inline Measure measure_from_json(const Json& j, const std::string& path = "measure") {
  const Json& kind_j = detail::require(j, "kind", path);
  if (!kind_j.is_string()) throw ConfigError(path + ".kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  try {
    if (kind == "atomic") {
      const Json& atoms = detail::require(j, "atoms", path);
      if (!atoms.is_array() || atoms.empty()) throw ConfigError(path + ".atoms", "expected a nonempty array");
      std::vector<std::pair<double, double>> pairs;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string p = path + ".atoms[" + std::to_string(i) + "]";
        if (!atoms[i].is_array() || atoms[i].size() != 2) throw ConfigError(p, "expected [x, w]");
        const double x = detail::as_number(atoms[i][0], p + "[0]");
        const double w = detail::as_number(atoms[i][1], p + "[1]");
        if (w < 0.0) throw ConfigError(p + "[1]", "negative weight");
        pairs.emplace_back(x, w);
      }
      return Measure::atomic(std::move(pairs));
    }
    if (kind == "point_mass") return Measure::point_mass(detail::as_number(detail::require(j, "x", path), path + ".x"));
    if (kind == "two_atom") {
      double c = 1.0;
      if (j.contains("c")) c = detail::as_number(j["c"], path + ".c");
      return Measure::two_atom(c);
    }
    if (kind == "grid") {
      return Measure::grid(detail::as_number(detail::require(j, "lo", path), path + ".lo"),
                           detail::as_number(detail::require(j, "hi", path), path + ".hi"),
                           detail::as_numbers(detail::require(j, "values", path), path + ".values"));
    }
    if (kind == "jacobi") {
      return Measure::jacobi(detail::as_number(detail::require(j, "a", path), path + ".a"),
                             detail::as_number(detail::require(j, "b", path), path + ".b"));
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + ".kind", "unknown measure kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Ensemble specs
//   {"N": 500, "lambda0": 0.5, "potential": {"iid": <measure>} | {"fixed": [...]},
//    "law": "gaussian" | "rademacher", "c2": 0, "zero_diagonal": true, "seed": 7}

inline Json to_json(const EnsembleSpec& s) {
  Json pot;
  if (auto* p = std::get_if<IidPotential>(&s.potential)) {
    pot = {{"iid", to_json(p->law)}};
  } else {
    pot = {{"fixed", std::get<FixedPotential>(s.potential).values}};
  }
  return {{"N", s.n},           {"lambda0", s.lambda0}, {"potential", pot},
          {"law", to_string(s.law)}, {"c2", s.c2},     {"zero_diagonal", s.zero_diagonal},
          {"seed", s.seed}};
}

inline EntryLaw entry_law_from_string(const std::string& s, const std::string& path = "law") {
  if (s == "gaussian") return EntryLaw::Gaussian;
  if (s == "rademacher") return EntryLaw::Rademacher;
  throw ConfigError(path, "unknown entry law '" + s + "'");
}

/// Missing keys keep their defaults; present keys are type-checked.
inline EnsembleSpec spec_from_json(const Json& j, const std::string& path = "ensemble") {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  EnsembleSpec s;
  if (j.contains("N")) {
    if (!j["N"].is_number_integer()) throw ConfigError(path + ".N", "expected an integer");
    s.n = j["N"].get<int>();
  }
  if (j.contains("lambda0")) s.lambda0 = detail::as_number(j["lambda0"], path + ".lambda0");
  if (j.contains("c2")) s.c2 = detail::as_number(j["c2"], path + ".c2");
  if (j.contains("law")) {
    if (!j["law"].is_string()) throw ConfigError(path + ".law", "expected a string");
    s.law = entry_law_from_string(j["law"].get<std::string>(), path + ".law");
  }
  if (j.contains("zero_diagonal")) {
    if (!j["zero_diagonal"].is_boolean()) throw ConfigError(path + ".zero_diagonal", "expected a boolean");
    s.zero_diagonal = j["zero_diagonal"].get<bool>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw ConfigError(path + ".seed", "expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("potential")) {
    const Json& p = j["potential"];
    if (p.is_object() && p.contains("iid")) {
      s.potential = IidPotential{measure_from_json(p["iid"], path + ".potential.iid")};
    } else if (p.is_object() && p.contains("fixed")) {
      s.potential = FixedPotential{detail::as_numbers(p["fixed"], path + ".potential.fixed")};
    } else {
      throw ConfigError(path + ".potential", "expected {\"iid\": measure} or {\"fixed\": [...]}");
    }
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + "." + e.field(), e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double x) {
  std::ostringstream o;
  o << std::setprecision(17) << x;
  return o.str();
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

/// Columns: E, density, re_m, im_m (m at the solve height).
inline void write_solution_csv(std::ostream& out, const FreeConvolutionSolution& s) {
  write_csv_row(out, {"E", "density", "re_m", "im_m"});
  for (std::size_t k = 0; k < s.energies.size(); ++k)
    write_csv_row(out, {csv_number(s.energies[k]), csv_number(s.density[k]), csv_number(s.m[k].real()),
                        csv_number(s.m[k].imag())});
}

inline Json solution_summary(const FreeConvolutionSolution& s) {
  return {{"lambda", s.lambda},     {"gamma", s.gamma},       {"eta", s.solve_eta},
          {"e_minus", s.e_minus},   {"e_plus", s.e_plus},     {"points", s.energies.size()},
          {"max_residual", max_residual(s)}, {"measure", to_json(s.nu)}};
}

/// Columns: sample_index, k, mu (k = 1 is the largest).
inline void write_spectra_csv(std::ostream& out, const std::vector<Spectrum>& spectra) {
  write_csv_row(out, {"sample_index", "k", "mu"});
  for (const auto& s : spectra)
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
      write_csv_row(out, {std::to_string(s.sample_index), std::to_string(k + 1), csv_number(s.eigenvalues[k])});
}

// ---------------------------------------------------------------------------
// Binary spectra

inline constexpr char kSpectrumMagic[8] = {'D', 'W', 'S', 'P', 'E', 'C', '0', '1'};

namespace detail {

template <class T>
void put_le(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw ConfigError("spectra", "truncated binary file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_spectra_binary(std::ostream& out, const std::vector<std::vector<double>>& rows) {
  const std::uint64_t n = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows)
    if (r.size() != n) throw InvalidArgument("write_spectra_binary: rows differ in length");
  out.write(kSpectrumMagic, 8);
  detail::put_le<std::uint64_t>(out, n);
  detail::put_le<std::uint64_t>(out, rows.size());
  for (const auto& r : rows)
    for (double x : r) detail::put_le<double>(out, x);
}

inline std::vector<std::vector<double>> read_spectra_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kSpectrumMagic, 8) != 0)
    throw ConfigError("spectra", "bad magic; expected DWSPEC01");
  const auto n = detail::get_le<std::uint64_t>(in);
  const auto count = detail::get_le<std::uint64_t>(in);
  std::vector<std::vector<double>> rows(count, std::vector<double>(n));
  for (auto& r : rows)
    for (double& x : r) x = detail::get_le<double>(in);
  return rows;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace dwedge
