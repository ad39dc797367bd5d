#pragma once

// Transform description files: JSON with the fields
//   {"T": "...", "T_inv": "...", "X": "...", "Psi": "...", "eps": 1,
//    "reflect_x": false, "reflect_t": false, "domain": [lo, hi]}
// T, X, Psi use the exact grammar; T_inv may use the extended numeric
// grammar (log, atan, sqrt, ...).

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "symclass/equiv.hpp"

namespace symclass::equiv {

inline EquivTransform transform_from_json(const nlohmann::json& j) {
  EquivTransform g;
  if (j.contains("T")) g.T = parse(j.at("T").get<std::string>());
  if (j.contains("X")) g.X = parse(j.at("X").get<std::string>());
  if (j.contains("Psi")) g.Psi = parse(j.at("Psi").get<std::string>());
  if (j.contains("eps")) g.eps = j.at("eps").get<int>();
  if (j.contains("reflect_x")) g.reflect_x = j.at("reflect_x").get<bool>();
  if (j.contains("reflect_t")) g.reflect_t = j.at("reflect_t").get<bool>();
  if (j.contains("domain")) {
    g.domain.lo = j.at("domain").at(0).get<double>();
    g.domain.hi = j.at("domain").at(1).get<double>();
  }
  if (j.contains("label")) g.label = j.at("label").get<std::string>();
  if (j.contains("T_inv")) {
    const std::string s = j.at("T_inv").get<std::string>();
    try {
      Expr e = parse(s);
      canonicalize(e);  // in-class check
      g.T_inv.exact = e;
    } catch (const std::exception&) {
      g.T_inv.numeric = numexpr::parse_numeric(s);
      g.t_inv_text = s;
    }
  } else if (is_zero(g.T - Expr::t())) {
    g.T_inv.exact = Expr::t();
  }
  g.sqrt_Tt = detail::derive_sqrt_Tt(g.T, g.domain);
  g.pullback = detail::derive_pullback(g.T);
  return g;
}

inline EquivTransform load_transform(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transform file: " + path);
  nlohmann::json j;
  in >> j;
  return transform_from_json(j);
}

inline nlohmann::json transform_to_json(const EquivTransform& g) {
  nlohmann::json j;
  j["T"] = to_string(g.T);
  if (g.T_inv.exact)
    j["T_inv"] = to_string(*g.T_inv.exact);
  else if (!g.t_inv_text.empty())
    j["T_inv"] = g.t_inv_text;
  j["X"] = to_string(g.X);
  j["Psi"] = to_string(g.Psi);
  j["eps"] = g.eps;
  j["reflect_x"] = g.reflect_x;
  j["reflect_t"] = g.reflect_t;
  j["domain"] = {g.domain.lo, g.domain.hi};
  j["label"] = g.label;
  return j;
}

}  // namespace symclass::equiv
