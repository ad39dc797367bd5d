// symclass: verification and classification workflows for the cubic
// Schroedinger equation with potential.  JSON reports go to stdout, a
// human-readable summary to stderr; exit codes: 0 pass, 1 check failure,
// 2 usage error.

#include <complex>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "symclass/catalog.hpp"
#include "symclass/classifier.hpp"
#include "symclass/numcheck.hpp"
#include "symclass/transform_io.hpp"
#include "symclass/version.hpp"

using nlohmann::json;
using namespace symclass;

namespace {

json report_skeleton(const std::string& command) {
  json j;
  j["schema"] = 1;
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = zero_test_seed();
  return j;
}

int finish(json& rep, bool pass) {
  rep["status"] = pass ? "pass" : "fail";
  std::cout << rep.dump(2) << "\n";
  std::cerr << rep["command"].get<std::string>() << ": " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

json param_json(const std::map<std::string, classifier::ParamValue>& params) {
  json j = json::object();
  for (const auto& [name, val] : params) {
    if (val.exact)
      j[name] = rational_to_string(*val.exact);
    else
      j[name] = val.approx;
  }
  return j;
}

int cmd_verify_tables() {
  json rep = report_skeleton("verify-tables");
  catalog::TablesReport tr = catalog::verify_tables();
  json cases = json::array();
  for (const auto& c : tr.cases) {
    json cj;
    cj["table"] = c.table;
    cj["id"] = c.id;
    cj["kind"] = c.id == 0 ? "kernel-row" : "case";
    cj["potential"] = c.potential;
    json ops = json::array();
    for (const auto& oc : c.operators) ops.push_back({{"name", oc.op}, {"residual_zero", oc.status}});
    cj["operators"] = ops;
    json closure = json::array();
    for (const auto& cc : c.closure) {
      json e;
      e["pair"] = {cc.i, cc.j};
      e["in_span"] = cc.ok;
      json co = json::array();
      for (const auto& r : cc.coeffs) co.push_back(rational_to_string(r));
      e["coefficients"] = co;
      closure.push_back(e);
    }
    cj["closure"] = closure;
    cj["pass"] = c.pass;
    cases.push_back(cj);
  }
  rep["cases"] = cases;
  json maps = json::array();
  for (const auto& m : tr.mappings) {
    maps.push_back({{"name", m.name},
                    {"validated", m.validated},
                    {"potential_match", m.potential_match},
                    {"match_path", m.match_path},
                    {"transport", m.transport_ok},
                    {"pass", m.pass},
                    {"detail", m.detail}});
  }
  rep["mappings"] = maps;
  std::cerr << tr.cases.size() << " case reports, " << tr.mappings.size()
            << " mapping reports\n";
  return finish(rep, tr.pass);
}

int cmd_classify(const std::string& vtext) {
  json rep = report_skeleton("classify");
  rep["potential"] = vtext;
  classifier::ClassificationResult r = classifier::classify(parse(vtext));
  rep["result"] = {{"status", classifier::to_string(r.status)},
                   {"verified", r.verified},
                   {"reason", r.reason}};
  if (r.status == classifier::Status::Matched) {
    rep["result"]["table"] = r.table;
    rep["result"]["case"] = r.case_id;
    rep["result"]["params"] = param_json(r.params);
    rep["result"]["path"] = r.witness_path == DecisionPath::Exact ? "exact" : "numeric";
    rep["result"]["moves"] = r.moves;
    if (r.witness) {
      json w = equiv::transform_to_json(*r.witness);
      if (!r.witness_bindings.empty()) {
        json b = json::object();
        for (const auto& [name, val] : r.witness_bindings) b[name] = val;
        w["bindings"] = b;
      }
      rep["result"]["witness"] = w;
    }
  }
  if (r.needs_manual_confirmation) rep["result"]["needs_manual_confirmation"] = true;
  return finish(rep, true);
}

int cmd_bracket(const std::string& a, const std::string& b) {
  json rep = report_skeleton("bracket");
  lie::AlgebraElement qa = lie::parse_operator(a);
  lie::AlgebraElement qb = lie::parse_operator(b);
  lie::AlgebraElement r = lie::bracket(qa, qb);
  rep["a"] = a;
  rep["b"] = b;
  rep["bracket"] = lie::to_string(r);
  return finish(rep, true);
}

int cmd_check_symmetry(const std::string& vtext, const std::string& optext) {
  json rep = report_skeleton("check-symmetry");
  Expr v = parse(vtext);
  lie::AlgebraElement q = lie::parse_operator(optext);
  auto d = symmetry::is_symmetry_detailed(v, q);
  rep["potential"] = vtext;
  rep["op"] = optext;
  rep["is_symmetry"] = d.zero;
  rep["path"] = d.path == DecisionPath::Exact ? "exact" : "numeric";
  if (!d.zero) {
    try {
      rep["residual"] = to_string(to_expr(canonicalize(symmetry::residual(v, q))));
    } catch (const CanonicalError&) {
      rep["residual"] = "(out of the exact class; decided numerically)";
    }
  }
  return finish(rep, d.zero);
}

int cmd_transform(const std::string& vtext, const std::string& file) {
  json rep = report_skeleton("transform");
  equiv::EquivTransform g = equiv::load_transform(file);
  auto val = equiv::validate(g);
  rep["potential"] = vtext;
  rep["transform"] = equiv::transform_to_json(g);
  rep["validated"] = val.ok;
  if (!val.ok) {
    rep["failures"] = val.failures;
    return finish(rep, false);
  }
  auto r = equiv::apply_to_potential(parse(vtext), g);
  rep["path"] = r.path == DecisionPath::Exact ? "exact" : "numeric";
  if (r.exact) {
    rep["mapped"] = to_string(*r.exact);
  } else {
    // sample the numeric closure at the domain midpoint for reference
    double tm = g.domain.mid();
    std::complex<double> tn = eval_d(g.T, {tm, 0}, {0, 0});
    std::complex<double> vv = r.eval_at<std::complex<double>>(tn, {1.0, 0.0});
    rep["sample"] = {{"t", tn.real()}, {"x", 1.0}, {"re", vv.real()}, {"im", vv.imag()}};
  }
  return finish(rep, true);
}

int cmd_residual_check(const std::string& vtext, const std::string& solution,
                       const std::string& transform_file, const std::string& grid_spec,
                       const std::string& boundary) {
  json rep = report_skeleton("residual-check");
  double t0, t1, x0, x1;
  int nt, nx;
  if (std::sscanf(grid_spec.c_str(), "%lf,%lf,%lf,%lf,%d,%d", &t0, &t1, &x0, &x1, &nt, &nx) != 6)
    throw std::invalid_argument("--grid expects t0,t1,x0,x1,nt,nx");
  numcheck::Grid grid(t0, t1, x0, x1, nt, nx,
                      boundary == "periodic" ? numcheck::Grid::Boundary::Periodic
                                             : numcheck::Grid::Boundary::DirichletZero);
  // solution: named seed "soliton:a", "plane:a,k" or an expression in t, x
  numcheck::Field psi;
  if (solution.rfind("soliton", 0) == 0) {
    double a = 1.0;
    if (auto pos = solution.find(':'); pos != std::string::npos)
      a = std::stod(solution.substr(pos + 1));
    psi = numcheck::soliton(a);
  } else if (solution.rfind("plane", 0) == 0) {
    double a = 1.0, k = 0.0;
    if (auto pos = solution.find(':'); pos != std::string::npos)
      std::sscanf(solution.c_str() + pos + 1, "%lf,%lf", &a, &k);
    psi = numcheck::plane_wave(a, k);
  } else {
    numexpr::NumExpr e = numexpr::parse_numeric(solution);
    psi = [e](double t, double x) {
      EvalPoint<std::complex<double>> pt;
      pt.t = {t, 0};
      pt.x = {x, 0};
      return e.eval(pt);
    };
  }
  Expr v = parse(vtext);
  double res;
  std::string path;
  if (!transform_file.empty()) {
    equiv::EquivTransform g = equiv::load_transform(transform_file);
    res = numcheck::transported_residual(psi, v, g, grid);
    path = equiv::apply_to_potential(v, g).path == DecisionPath::Exact ? "exact" : "numeric";
  } else {
    res = numcheck::pde_residual(psi, v, grid);
    path = "exact";
  }
  rep["max_residual"] = res;
  rep["grid"] = {{"t0", t0}, {"t1", t1}, {"x0", x0}, {"x1", x1},
                 {"nt", nt}, {"nx", nx}, {"boundary", boundary}};
  rep["path"] = path;
  return finish(rep, std::isfinite(res));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie-symmetry toolkit for the cubic Schroedinger equation with potential"};
  app.require_subcommand(1);

  auto* sc_tables = app.add_subcommand("verify-tables", "verify both classification tables");

  std::string cl_potential;
  auto* sc_classify = app.add_subcommand("classify", "classify a potential");
  sc_classify->add_option("--potential", cl_potential, "potential expression")->required();

  std::string br_a, br_b;
  auto* sc_bracket = app.add_subcommand("bracket", "Lie bracket of two operators");
  sc_bracket->add_option("--a", br_a, "first operator")->required();
  sc_bracket->add_option("--b", br_b, "second operator")->required();

  std::string cs_potential, cs_op;
  auto* sc_check = app.add_subcommand("check-symmetry", "test the classifying condition");
  sc_check->add_option("--potential", cs_potential, "potential expression")->required();
  sc_check->add_option("--op", cs_op, "operator, e.g. D(2*t)+G(3*t^2)+M(t^3)")->required();

  std::string tr_potential, tr_file;
  auto* sc_transform = app.add_subcommand("transform", "apply an equivalence transform");
  sc_transform->add_option("--potential", tr_potential, "potential expression")->required();
  sc_transform->add_option("--transform", tr_file, "transform description file")->required();

  std::string rc_potential, rc_solution = "soliton:1", rc_file, rc_grid = "0,1,-10,10,256,256";
  std::string rc_boundary = "dirichlet_zero";
  auto* sc_residual = app.add_subcommand("residual-check", "finite-difference residual");
  sc_residual->add_option("--potential", rc_potential, "potential expression")->required();
  sc_residual->add_option("--solution", rc_solution, "named seed or expression");
  sc_residual->add_option("--transform", rc_file, "optional transform file");
  sc_residual->add_option("--grid", rc_grid, "t0,t1,x0,x1,nt,nx");
  sc_residual->add_option("--boundary", rc_boundary, "periodic | dirichlet_zero");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sc_tables->parsed()) return cmd_verify_tables();
    if (sc_classify->parsed()) return cmd_classify(cl_potential);
    if (sc_bracket->parsed()) return cmd_bracket(br_a, br_b);
    if (sc_check->parsed()) return cmd_check_symmetry(cs_potential, cs_op);
    if (sc_transform->parsed()) return cmd_transform(tr_potential, tr_file);
    if (sc_residual->parsed())
      return cmd_residual_check(rc_potential, rc_solution, rc_file, rc_grid, rc_boundary);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
