#pragma once

/**
 * @file io.hpp
 * @brief JSON forms of laws and benchmark specs, law parsing from key=value
 *        tokens, and the versioned trajectory CSV.
 *
 * Trajectory CSV layout (v1):
 *
 *   # olfkit-trajectory v1
 *   # benchmark {...BenchmarkSpec JSON...}
 *   t,V,normS,res_stat,res_eq,res_ineq,normU,sigma,z0,z1,...
 *   <one row per sample, 17 significant digits>
 *
 * The embedded spec lets a reader rebuild the model the states belong to.
 */

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "olfkit/error.hpp"
#include "olfkit/integrate.hpp"
#include "olfkit/law.hpp"
#include "olfkit/problems.hpp"

namespace olfkit {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Laws

/// Builds a law from its short name (exp, ft, fxt, pt) and named parameters.
/// Parameter names: exp c; ft k gamma; fxt a b gamma delta; pt mu T.
inline DecayLaw make_law(std::string_view kind, const std::map<std::string, double>& p) {
  auto get = [&](const char* key) {
    auto it = p.find(key);
    require(it != p.end(), ErrorCode::InvalidArgument,
            std::string("law '") + std::string(kind) + "' is missing parameter " + key);
    return it->second;
  };
  auto allow = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : p) {
      bool known = false;
      for (auto key : keys) known = known || k == key;
      require(known, ErrorCode::InvalidArgument,
              "unknown parameter '" + k + "' for law '" + std::string(kind) + "'");
    }
  };
  if (kind == "exp") {
    allow({"c"});
    return DecayLaw::exponential(get("c"));
  }
  if (kind == "ft") {
    allow({"k", "gamma"});
    return DecayLaw::finite_time(get("k"), get("gamma"));
  }
  if (kind == "fxt") {
    allow({"a", "b", "gamma", "delta"});
    return DecayLaw::fixed_time(get("a"), get("b"), get("gamma"), get("delta"));
  }
  if (kind == "pt") {
    allow({"mu", "T"});
    return DecayLaw::prescribed_time(get("mu"), get("T"));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown law '" + std::string(kind) + "' (expected exp, ft, fxt or pt)");
}

/// Parses tokens like {"ft", "k=1", "gamma=0.5"}.
inline DecayLaw parse_law(const std::vector<std::string>& tokens) {
  require(!tokens.empty(), ErrorCode::InvalidArgument, "empty law specification");
  std::map<std::string, double> params;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    const auto eq = tok.find('=');
    require(eq != std::string::npos && eq > 0, ErrorCode::InvalidArgument,
            "law parameter '" + tok + "' is not of the form key=value");
    const std::string key = tok.substr(0, eq);
    const std::string text = tok.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used == text.size() && !text.empty(), ErrorCode::InvalidArgument,
            "law parameter '" + key + "' has non-numeric value '" + text + "'");
    params[key] = value;
  }
  return make_law(tokens.front(), params);
}

inline std::map<std::string, double> law_params(const DecayLaw& law) {
  return std::visit(detail::overloaded{
                        [](const ExpLaw& l) -> std::map<std::string, double> { return {{"c", l.c}}; },
                        [](const FiniteTimeLaw& l) -> std::map<std::string, double> {
                          return {{"k", l.k}, {"gamma", l.gamma_lo}};
                        },
                        [](const FixedTimeLaw& l) -> std::map<std::string, double> {
                          return {{"a", l.a}, {"b", l.b}, {"gamma", l.gamma_lo}, {"delta", l.gamma_hi}};
                        },
                        [](const PrescribedTimeLaw& l) -> std::map<std::string, double> {
                          return {{"mu", l.mu}, {"T", l.horizon}};
                        }},
                    law.params());
}

/// "ft k=1 gamma=0.5"
inline std::string describe(const DecayLaw& law) {
  std::ostringstream os;
  os << to_string(law.kind());
  for (const auto& [k, v] : law_params(law)) os << ' ' << k << '=' << v;
  return os.str();
}

inline json law_to_json(const DecayLaw& law) {
  json j = {{"type", std::string(to_string(law.kind()))}};
  for (const auto& [k, v] : law_params(law)) j[k] = v;
  return j;
}

inline DecayLaw law_from_json(const json& j) {
  require(j.is_object() && j.contains("type") && j["type"].is_string(), ErrorCode::InvalidArgument,
          "law must be an object with a string 'type'");
  std::map<std::string, double> params;
  for (const auto& [k, v] : j.items()) {
    if (k == "type") continue;
    require(v.is_number(), ErrorCode::InvalidArgument, "law parameter '" + k + "' must be a number");
    params[k] = v.get<double>();
  }
  return make_law(j["type"].get<std::string>(), params);
}

// ---------------------------------------------------------------------------
// Benchmark specs

inline json spec_to_json(const BenchmarkSpec& s) {
  json j;
  j["name"] = s.name;
  j["encoding"] = s.encoding;
  j["dims"] = s.dims;
  j["params"] = s.params;
  j["z0"] = detail::to_std(s.z0);
  j["laws"] = json::array();
  for (const auto& l : s.laws) j["laws"].push_back(law_to_json(l));
  j["solution"] = s.solution ? json(detail::to_std(*s.solution)) : json(nullptr);
  j["strong_monotonicity"] = s.strong_monotonicity ? json(*s.strong_monotonicity) : json(nullptr);
  j["eps"] = s.eps;
  j["note"] = s.note;
  return j;
}

inline BenchmarkSpec spec_from_json(const json& j) {
  try {
    BenchmarkSpec s;
    s.name = j.at("name").get<std::string>();
    s.encoding = j.at("encoding").get<std::string>();
    s.dims = j.at("dims").get<std::map<std::string, Index>>();
    s.params = j.at("params").get<std::map<std::string, std::vector<double>>>();
    s.z0 = detail::to_eigen(j.at("z0").get<std::vector<double>>());
    for (const auto& l : j.at("laws")) s.laws.push_back(law_from_json(l));
    if (j.contains("solution") && !j["solution"].is_null())
      s.solution = detail::to_eigen(j["solution"].get<std::vector<double>>());
    if (j.contains("strong_monotonicity") && !j["strong_monotonicity"].is_null())
      s.strong_monotonicity = j["strong_monotonicity"].get<double>();
    s.eps = j.value("eps", 1e-6);
    s.note = j.value("note", std::string());
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("benchmark spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Trajectory CSV

inline constexpr std::string_view kTrajectoryMagic = "# olfkit-trajectory v1";
inline constexpr std::string_view kTrajectoryColumns = "t,V,normS,res_stat,res_eq,res_ineq,normU,sigma";

struct TrajectoryFile {
  BenchmarkSpec spec;
  Trajectory trajectory;
};

inline void write_trajectory_csv(std::ostream& os, const BenchmarkSpec& spec, const Trajectory& traj) {
  os << kTrajectoryMagic << '\n';
  os << "# benchmark " << spec_to_json(spec).dump() << '\n';
  os << kTrajectoryColumns;
  const Index n = traj.samples.empty() ? spec.z0.size() : traj.samples.front().z.size();
  for (Index i = 0; i < n; ++i) os << ",z" << i;
  os << '\n';
  os << std::setprecision(17);
  for (const Sample& s : traj.samples) {
    os << s.t << ',' << s.v << ',' << s.norm_s << ',' << s.residuals.stationarity << ',' << s.residuals.equality << ','
       << s.residuals.inequality << ',' << s.norm_u << ',' << s.sigma;
    for (Index i = 0; i < s.z.size(); ++i) os << ',' << s.z[i];
    os << '\n';
  }
}

inline void write_trajectory_csv(const std::string& path, const BenchmarkSpec& spec, const Trajectory& traj) {
  std::ofstream os(path);
  require(bool(os), ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
  write_trajectory_csv(os, spec, traj);
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty()) {
    throw Error(ErrorCode::SchemaMismatch,
                "row " + std::to_string(row) + " column " + std::to_string(col) + ": '" + cell + "' is not a number");
  }
  return v;
}

}  // namespace detail

inline TrajectoryFile read_trajectory_csv(std::istream& is) {
  std::string line;
  require(bool(std::getline(is, line)) && line == kTrajectoryMagic, ErrorCode::SchemaMismatch,
          "missing trajectory header '" + std::string(kTrajectoryMagic) + "'");
  TrajectoryFile file;
  const std::string prefix = "# benchmark ";
  require(bool(std::getline(is, line)) && line.rfind(prefix, 0) == 0, ErrorCode::SchemaMismatch,
          "missing embedded benchmark spec");
  try {
    file.spec = spec_from_json(json::parse(line.substr(prefix.size())));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("embedded benchmark spec: ") + e.what());
  }

  require(bool(std::getline(is, line)), ErrorCode::SchemaMismatch, "missing column header");
  const auto header = detail::split_csv(line);
  const auto fixed = detail::split_csv(std::string(kTrajectoryColumns));
  require(header.size() > fixed.size(), ErrorCode::SchemaMismatch, "column header has no state columns");
  for (std::size_t i = 0; i < fixed.size(); ++i)
    require(header[i] == fixed[i], ErrorCode::SchemaMismatch,
            "column " + std::to_string(i) + " is '" + header[i] + "', expected '" + fixed[i] + "'");
  const std::size_t n = header.size() - fixed.size();
  for (std::size_t i = 0; i < n; ++i)
    require(header[fixed.size() + i] == "z" + std::to_string(i), ErrorCode::SchemaMismatch,
            "unexpected state column '" + header[fixed.size() + i] + "'");

  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    require(cells.size() == header.size(), ErrorCode::SchemaMismatch,
            "row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " +
                std::to_string(header.size()));
    std::vector<double> v(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) v[c] = detail::parse_cell(cells[c], row, c);
    Sample s;
    s.t = v[0];
    s.v = v[1];
    s.norm_s = v[2];
    s.residuals = {v[3], v[5], v[4]};
    s.norm_u = v[6];
    s.sigma = v[7];
    s.z = Eigen::Map<const Vector>(v.data() + fixed.size(), static_cast<Index>(n));
    file.trajectory.samples.push_back(std::move(s));
    ++row;
  }
  return file;
}

inline TrajectoryFile read_trajectory_csv(const std::string& path) {
  std::ifstream is(path);
  require(bool(is), ErrorCode::SchemaMismatch, "cannot open " + path);
  return read_trajectory_csv(is);
}

}  // namespace olfkit
