#pragma once

#include <functional>
#include <future>
#include <map>
#include <string>
#include <vector>

#include "symclass/equiv.hpp"

namespace symclass::catalog {

using lie::AlgebraElement;
using symmetry::Potential;

/// Parameter constraint attached to a table case; checked on concrete
/// values by the classifier, stored as documentation otherwise.
struct Constraint {
  std::string text;
  std::function<bool(const std::map<std::string, Rational>&)> holds;
};

/// One row of the classification tables: canonical potential template with
/// free parameters, its symmetry-algebra basis, and the Table-1 cross
/// reference for Table-2 rows (N1 column).  id 0 is the generic header row.
struct TableCase {
  int table = 1;
  int id = 0;
  std::string potential_text;
  Potential potential;
  std::vector<std::string> param_names;
  std::vector<Constraint> constraints;
  std::vector<AlgebraElement> basis;
  std::vector<std::string> basis_text;
  int cross_ref = 0;  // Table 2 only: equivalent Table-1 case
};

/// Witnessed equivalence between a Table-2 row and its Table-1 target.
struct CaseMapping {
  std::string name;
  int source_table = 2, source_id = 0;
  int target_table = 1, target_id = 0;
  equiv::EquivTransform g;
  // source-template parameter instantiation (e.g. nu -> mu^2) and the
  // parameter values of the target template, both over the mapping's own
  // free parameters
  std::map<std::string, Expr> source_params;
  std::map<std::string, Expr> target_params;
};

namespace detail {

inline AlgebraElement op(const std::string& text) { return lie::parse_operator(text); }

inline Constraint nonzero_pair(const std::string& a, const std::string& b) {
  return {"(" + a + "," + b + ") != (0,0)",
          [a, b](const std::map<std::string, Rational>& p) {
            auto pa = p.find(a);
            auto pb = p.find(b);
            if (pa == p.end() || pb == p.end()) return true;
            return pa->second != 0 || pb->second != 0;
          }};
}

inline Constraint nonneg(const std::string& name) {
  return {name + " >= 0", [name](const std::map<std::string, Rational>& p) {
            auto it = p.find(name);
            return it == p.end() || it->second >= 0;
          }};
}

inline Constraint positive(const std::string& name) {
  return {name + " > 0", [name](const std::map<std::string, Rational>& p) {
            auto it = p.find(name);
            return it == p.end() || it->second > 0;
          }};
}

}  // namespace detail

/// Table 1: inequivalent potentials V(t, x) with extended symmetry.
/// id 0 is the arbitrary-potential header row (kernel only).
inline std::vector<TableCase> table1() {
  using detail::op;
  std::vector<TableCase> rows;
  {
    TableCase c;
    c.table = 1;
    c.id = 0;
    c.potential_text = "V(t,x)";
    c.potential = Expr::func_sym("V", true, true);
    c.basis_text = {"M(1)"};
    c.basis = {op("M(1)")};
    rows.push_back(std::move(c));
  }
  {
    TableCase c;
    c.table = 1;
    c.id = 1;
    c.potential_text = "i*W(t)";
    c.potential = Expr::i() * Expr::func_sym("W", true, false);
    c.basis_text = {"M(1)", "G(1)", "G(t)"};
    c.basis = {op("M(1)"), op("G(1)"), op("G(t)")};
    rows.push_back(std::move(c));
  }
  {
    TableCase c;
    c.table = 1;
    c.id = 2;
    c.potential_text = "(i/2)*(t+nu)/(t^2+1)";
    c.potential = parse(c.potential_text);
    c.param_names = {"nu"};
    c.constraints = {detail::nonneg("nu")};
    c.basis_text = {"M(1)", "G(1)", "G(t)", "D(t^2+1)"};
    c.basis = {op("M(1)"), op("G(1)"), op("G(t)"), op("D(t^2+1)")};
    rows.push_back(std::move(c));
  }
  {
    TableCase c;
    c.table = 1;
    c.id = 3;
    c.potential_text = "i*nu/t";
    c.potential = parse(c.potential_text);
    c.param_names = {"nu"};
    c.constraints = {{"nu >= 1/4",
                      [](const std::map<std::string, Rational>& p) {
                        auto it = p.find("nu");
                        return it == p.end() || it->second >= Rational(1, 4);
                      }},
                     {"nu != 0, 1/2", [](const std::map<std::string, Rational>& p) {
                        auto it = p.find("nu");
                        return it == p.end() ||
                               (it->second != 0 && it->second != Rational(1, 2));
                      }}};
    c.basis_text = {"M(1)", "G(1)", "G(t)", "D(t)"};
    c.basis = {op("M(1)"), op("G(1)"), op("G(t)"), op("D(t)")};
    rows.push_back(std::move(c));
  }
  {
    TableCase c;
    c.table = 1;
    c.id = 4;
    c.potential_text = "i";
    c.potential = parse(c.potential_text);
    c.basis_text = {"M(1)", "G(1)", "G(t)", "D(1)"};
    c.basis = {op("M(1)"), op("G(1)"), op("G(t)"), op("D(1)")};
    rows.push_back(std::move(c));
  }
  {
    TableCase c;
    c.table = 1;
    c.id = 5;
    c.potential_text = "0";
    c.potential = parse(c.potential_text);
    c.basis_text = {"M(1)", "G(1)", "G(t)", "D(1)", "D(t)"};
    c.basis = {op("M(1)"), op("G(1)"), op("G(t)"), op("D(1)"), op("D(t)")};
    rows.push_back(std::move(c));
  }
  {
    TableCase c;
    c.table = 1;
    c.id = 6;
    c.potential_text = "V(x)";
    c.potential = Expr::func_sym("V", false, true);
    c.basis_text = {"M(1)", "D(1)"};
    c.basis = {op("M(1)"), op("D(1)")};
    rows.push_back(std::move(c));
  }
  {
    TableCase c;
    c.table = 1;
    c.id = 7;
    c.potential_text = "(alpha+i*beta)*x^-2";
    c.potential = parse(c.potential_text);
    c.param_names = {"alpha", "beta"};
    c.constraints = {detail::nonneg("beta"), detail::nonzero_pair("alpha", "beta")};
    c.basis_text = {"M(1)", "D(1)", "D(t)"};
    c.basis = {op("M(1)"), op("D(1)"), op("D(t)")};
    rows.push_back(std::move(c));
  }
  return rows;
}

/// Table 2: the x-dependent subclass V = V(x); id 0 is the generic row.
inline std::vector<TableCase> table2() {
  using detail::op;
  std::vector<TableCase> rows;
  auto mk = [&rows](int id, const std::string& vtext, std::vector<std::string> ops, int n1) {
    TableCase c;
    c.table = 2;
    c.id = id;
    c.potential_text = vtext;
    c.potential = parse(vtext);
    c.basis_text = ops;
    for (const auto& s : ops) c.basis.push_back(op(s));
    c.cross_ref = n1;
    rows.push_back(std::move(c));
  };
  {
    TableCase c;
    c.table = 2;
    c.id = 0;
    c.potential_text = "V(x)";
    c.potential = Expr::func_sym("V", false, true);
    c.basis_text = {"M(1)", "D(1)"};
    c.basis = {op("M(1)"), op("D(1)")};
    c.cross_ref = 6;
    rows.push_back(std::move(c));
  }
  mk(1, "(alpha+i*beta)*x^-2", {"M(1)", "D(1)", "D(t)"}, 7);
  rows.back().param_names = {"alpha", "beta"};
  rows.back().constraints = {detail::nonneg("beta"), detail::nonzero_pair("alpha", "beta")};
  mk(2, "x^2 + i + (alpha+i*beta)*x^-2", {"M(1)", "D(1)", "D(exp(4*t))"}, 7);
  rows.back().param_names = {"alpha", "beta"};
  rows.back().constraints = {detail::nonzero_pair("alpha", "beta")};
  mk(3, "i", {"M(1)", "D(1)", "G(1)", "G(t)"}, 4);
  mk(4, "x + i*nu", {"M(1)", "D(1)", "G(1)+M(t)", "G(2*t)+M(t^2)"}, 4);
  rows.back().param_names = {"nu"};
  rows.back().constraints = {detail::positive("nu")};
  mk(5, "-x^2 + i*nu", {"M(1)", "D(1)", "G(sin(2*t))", "G(cos(2*t))"}, 2);
  rows.back().param_names = {"nu"};
  rows.back().constraints = {detail::nonneg("nu")};
  mk(6, "x^2 + i*nu", {"M(1)", "D(1)", "G(exp(2*t))", "G(exp(-2*t))"}, 3);
  rows.back().param_names = {"nu"};
  rows.back().constraints = {detail::nonneg("nu"),
                             {"nu != 1, -1", [](const std::map<std::string, Rational>& p) {
                                auto it = p.find("nu");
                                return it == p.end() ||
                                       (it->second != 1 && it->second != -1);
                              }}};
  mk(7, "0", {"M(1)", "D(1)", "G(1)", "G(t)", "D(t)"}, 5);
  mk(8, "x", {"M(1)", "D(1)", "G(1)+M(t)", "G(2*t)+M(t^2)", "D(2*t)+G(3*t^2)+M(t^3)"}, 5);
  mk(9, "x^2 + i", {"M(1)", "D(1)", "G(exp(2*t))", "G(exp(-2*t))", "D(exp(4*t))"}, 5);
  return rows;
}

inline TableCase get_case(int table, int id) {
  const auto rows = table == 1 ? table1() : table2();
  if (table != 1 && table != 2) throw std::out_of_range("unknown table");
  for (const auto& c : rows)
    if (c.id == id) return c;
  throw std::out_of_range("unknown case id " + std::to_string(id) + " in table " +
                          std::to_string(table));
}

/// Equivalence witnesses connecting Table-2 rows to their Table-1 targets,
/// plus the inverse-time consistency maps inside Table 1.
inline std::vector<CaseMapping> stored_mappings() {
  std::vector<CaseMapping> maps;
  {
    CaseMapping m;
    m.name = "2->7";
    m.source_id = 2;
    m.target_id = 7;
    m.g = equiv::exp_decay_time();
    m.target_params = {{"alpha", Expr::param("alpha")}, {"beta", Expr::param("beta")}};
    maps.push_back(std::move(m));
  }
  {
    CaseMapping m;
    m.name = "9->5";
    m.source_id = 9;
    m.target_id = 5;
    m.g = equiv::exp_decay_time();
    maps.push_back(std::move(m));
  }
  {
    CaseMapping m;
    m.name = "6->3";
    m.source_id = 6;
    m.target_id = 3;
    m.g = equiv::exp_decay_time();
    m.target_params = {{"nu", parse("(1-nu)/4")}};
    maps.push_back(std::move(m));
  }
  {
    CaseMapping m;
    m.name = "5->2";
    m.source_id = 5;
    m.target_id = 2;
    m.g = equiv::tan2t_time();
    m.target_params = {{"nu", Expr::param("nu")}};
    maps.push_back(std::move(m));
  }
  {
    CaseMapping m;
    m.name = "8->5";
    m.source_id = 8;
    m.target_id = 5;
    m.g = equiv::identity_transform();
    m.g.X = parse("-t^2");
    m.g.Psi = parse("t^3/3");
    m.g.label = "shear";
    maps.push_back(std::move(m));
  }
  {
    CaseMapping m;
    m.name = "4->4";
    m.source_id = 4;
    m.target_id = 4;
    // nu = mu^2 keeps the scale factors rational with mu > 0 free
    m.g = equiv::scale_time_symbolic("mu");
    m.g.X = parse("-mu*t^2");
    m.g.Psi = parse("t^3/3");
    m.g.label = "scale-shear";
    m.source_params = {{"nu", parse("mu^2")}};
    maps.push_back(std::move(m));
  }
  {
    CaseMapping m;
    m.name = "T1:3->3 (nu~ = 1/2 - nu)";
    m.source_table = 1;
    m.source_id = 3;
    m.target_id = 3;
    m.g = equiv::neg_inverse_time();
    m.target_params = {{"nu", parse("1/2 - nu")}};
    maps.push_back(std::move(m));
  }
  {
    CaseMapping m;
    m.name = "T1:3(nu=1/2)->5";
    m.source_table = 1;
    m.source_id = 3;
    m.target_id = 5;
    m.g = equiv::neg_inverse_time();
    m.source_params = {{"nu", parse("1/2")}};
    maps.push_back(std::move(m));
  }
  return maps;
}

// -- verification ----------------------------------------------------------------

struct OperatorCheck {
  std::string op;
  std::string status;  // "exact" | "numeric" | "fail"
};

struct ClosureCheck {
  int i = 0, j = 0;
  bool ok = false;
  std::vector<Rational> coeffs;
};

struct CaseReport {
  int table = 0, id = 0;
  std::string potential;
  std::vector<OperatorCheck> operators;
  std::vector<ClosureCheck> closure;
  bool pass = true;
};

struct MappingReport {
  std::string name;
  bool validated = false;
  bool potential_match = false;
  std::string match_path;  // "exact" | "numeric" | "fail"
  bool transport_ok = false;
  bool pass = false;
  std::string detail;
};

/// Residual-zero check for every basis operator (parameters free) and
/// pairwise bracket closure with exact span coefficients.
inline CaseReport verify_case(const TableCase& c) {
  CaseReport rep;
  rep.table = c.table;
  rep.id = c.id;
  rep.potential = c.potential_text;
  for (size_t k = 0; k < c.basis.size(); ++k) {
    OperatorCheck oc;
    oc.op = c.basis_text[k];
    auto d = symmetry::is_symmetry_detailed(c.potential, c.basis[k]);
    oc.status = d.zero ? (d.path == DecisionPath::Exact ? "exact" : "numeric") : "fail";
    if (!d.zero) rep.pass = false;
    rep.operators.push_back(std::move(oc));
  }
  for (size_t a = 0; a < c.basis.size(); ++a) {
    for (size_t b = a + 1; b < c.basis.size(); ++b) {
      ClosureCheck cc;
      cc.i = static_cast<int>(a);
      cc.j = static_cast<int>(b);
      auto sol = lie::in_span(lie::bracket(c.basis[a], c.basis[b]), c.basis);
      cc.ok = sol.has_value();
      if (sol) cc.coeffs = *sol;
      if (!cc.ok) rep.pass = false;
      rep.closure.push_back(std::move(cc));
    }
  }
  return rep;
}

/// Exact equality of the mapped source template against the target template
/// with its parameter map, plus symmetry transport of the target basis.
inline MappingReport verify_mapping(const CaseMapping& m) {
  MappingReport rep;
  rep.name = m.name;
  auto val = equiv::validate(m.g);
  rep.validated = val.ok;
  if (!val.ok) {
    rep.detail = "validation failed";
    for (const auto& f : val.failures) rep.detail += "; " + f;
    return rep;
  }
  TableCase src = get_case(m.source_table, m.source_id);
  TableCase dst = get_case(m.target_table, m.target_id);
  Expr source = src.potential;
  {
    Bindings b;
    for (const auto& [name, e] : m.source_params) b.param(name, e);
    source = substitute(source, b);
  }
  Expr target = dst.potential;
  {
    Bindings b;
    for (const auto& [name, e] : m.target_params) b.param(name, e);
    target = substitute(target, b);
  }
  auto mapped = equiv::apply_to_potential(source, m.g);
  if (mapped.exact) {
    auto d = is_zero_detailed(*mapped.exact - target);
    rep.potential_match = d.zero;
    rep.match_path = d.zero ? (d.path == DecisionPath::Exact ? "exact" : "numeric") : "fail";
    if (!d.zero) rep.detail = "difference: " + to_string(*mapped.exact - target);
  } else {
    rep.potential_match = false;
    rep.match_path = "fail";
    rep.detail = "no exact image";
  }
  // transport: every target-basis operator annihilates the mapped potential
  rep.transport_ok = true;
  if (mapped.exact) {
    for (const auto& q : dst.basis) {
      if (!symmetry::is_symmetry(*mapped.exact, q)) {
        rep.transport_ok = false;
        rep.detail += "; transport failed for an operator";
        break;
      }
    }
  } else {
    rep.transport_ok = false;
  }
  rep.pass = rep.validated && rep.potential_match && rep.transport_ok;
  return rep;
}

struct TablesReport {
  std::vector<CaseReport> cases;
  std::vector<MappingReport> mappings;
  bool pass = true;
};

/// Verify both tables and all stored mappings; case verifications run in
/// parallel and reports are merged in table/id order.
inline TablesReport verify_tables() {
  TablesReport rep;
  std::vector<TableCase> all;
  for (auto& c : table1()) all.push_back(std::move(c));
  for (auto& c : table2()) all.push_back(std::move(c));
  std::vector<std::future<CaseReport>> futs;
  futs.reserve(all.size());
  for (const auto& c : all)
    futs.push_back(std::async(std::launch::async, [&c] { return verify_case(c); }));
  for (auto& f : futs) rep.cases.push_back(f.get());
  for (const auto& m : stored_mappings()) rep.mappings.push_back(verify_mapping(m));
  for (const auto& c : rep.cases) rep.pass = rep.pass && c.pass;
  for (const auto& m : rep.mappings) rep.pass = rep.pass && m.pass;
  return rep;
}

}  // namespace symclass::catalog
