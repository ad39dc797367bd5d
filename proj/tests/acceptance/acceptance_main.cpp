// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances and counts are pinned in code.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "support/random_exprs.hpp"
#include "symclass/catalog.hpp"
#include "symclass/classifier.hpp"
#include "symclass/numcheck.hpp"

using namespace symclass;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail = "") {
  std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// criterion 1: exact residuals and bracket closure for all table cases
void table_reproduction() {
  auto t0 = Clock::now();
  catalog::TablesReport rep = catalog::verify_tables();
  bool all_exact = rep.pass;
  int numbered = 0;
  for (const auto& c : rep.cases) {
    if (c.id != 0) ++numbered;
    for (const auto& oc : c.operators) all_exact = all_exact && oc.status == "exact";
    for (const auto& cc : c.closure) all_exact = all_exact && cc.ok;
  }
  double dt = seconds_since(t0);
  report("table reproduction: 16 cases, exact residuals and closure",
         all_exact && numbered == 16 && dt < 30.0,
         "runtime " + std::to_string(dt) + " s");
}

// criterion 2: all stored cross-table witnesses verify exactly
void mapping_reproduction() {
  bool ok = true;
  std::string detail;
  int cross_table = 0;
  for (const auto& m : catalog::stored_mappings()) {
    catalog::MappingReport r = catalog::verify_mapping(m);
    if (m.source_table == 2) ++cross_table;
    if (!r.pass || r.match_path != "exact") {
      ok = false;
      detail += m.name + " failed; ";
    }
  }
  // the 6->3 and 5->2 parameter maps are part of the stored mappings and
  // were checked symbolically above; re-assert them explicitly
  {
    auto g = equiv::exp_decay_time();
    auto r = equiv::apply_to_potential(parse("x^2 + i*nu"), g);
    ok = ok && r.exact && is_zero(*r.exact - parse("i*((1-nu)/4)/t"));
  }
  {
    auto g = equiv::tan2t_time();
    auto r = equiv::apply_to_potential(parse("-x^2 + i*nu"), g);
    ok = ok && r.exact && is_zero(*r.exact - parse("(i/2)*(t+nu)/(t^2+1)"));
  }
  // inverse-time normalization from the Table 1 note
  {
    auto g = equiv::neg_inverse_time();
    auto r = equiv::apply_to_potential(parse("i*nu/t"), g);
    ok = ok && r.exact && is_zero(*r.exact - parse("i*(1/2-nu)/t"));
    auto r2 = equiv::apply_to_potential(parse("i*(1/2)/t"), g);
    ok = ok && r2.exact && is_zero(*r2.exact);
  }
  report("mapping reproduction: cross-table witnesses + inverse-time normalizations, exact",
         ok && cross_table == 6, detail);
}

// criterion 3: kernel theorems, exact for random potentials
void kernel_theorems() {
  testgen::ExprGen gen(0xACCE5501);
  bool ok = true;
  auto M = lie::AlgebraElement::M(parse("1"));
  for (int j = 0; j < 100 && ok; ++j) {
    auto d = symmetry::is_symmetry_detailed(gen.potential(), M);
    ok = d.zero && d.path == DecisionPath::Exact;
  }
  auto G1 = lie::AlgebraElement::G(parse("1"));
  auto Gt = lie::AlgebraElement::G(parse("t"));
  for (int j = 0; j < 50 && ok; ++j) {
    Expr v = gen.potential(true, false);
    for (const auto& q : {M, G1, Gt}) {
      auto d = symmetry::is_symmetry_detailed(v, q);
      ok = ok && d.zero && d.path == DecisionPath::Exact;
    }
  }
  auto D1 = lie::AlgebraElement::D(parse("1"));
  for (int j = 0; j < 50 && ok; ++j) {
    Expr v = gen.potential(false, true);
    for (const auto& q : {M, D1}) {
      auto d = symmetry::is_symmetry_detailed(v, q);
      ok = ok && d.zero && d.path == DecisionPath::Exact;
    }
  }
  report("kernel theorems: M on 100 potentials, subclass kernels on 50 + 50, exact", ok);
}

// criterion 4: algebra laws, exact
void algebra_laws() {
  testgen::ExprGen gen(0xACCE5502);
  auto random_element = [&gen] {
    return lie::AlgebraElement(gen.t_function(2), gen.t_function(2), gen.t_function(2));
  };
  bool ok = true;
  for (int j = 0; j < 100 && ok; ++j) {
    auto a = random_element(), b = random_element();
    ok = lie::is_zero_element(lie::bracket(a, b) + lie::bracket(b, a));
  }
  for (int j = 0; j < 50 && ok; ++j) {
    auto a = random_element(), b = random_element(), c = random_element();
    ok = lie::is_zero_element(lie::bracket(a, lie::bracket(b, c)) +
                              lie::bracket(b, lie::bracket(c, a)) +
                              lie::bracket(c, lie::bracket(a, b)));
  }
  for (int j = 0; j < 50 && ok; ++j) {
    auto a = random_element(), b = random_element();
    ok = lie::equal_fields(lie::to_vector_field(lie::bracket(a, b)), lie::bracket_direct(a, b));
  }
  auto D1 = lie::AlgebraElement::D(parse("1"));
  auto Dt = lie::AlgebraElement::D(parse("t"));
  auto Dt2 = lie::AlgebraElement::D(parse("t^2"));
  ok = ok && lie::equal_elements(lie::bracket(D1, Dt), D1);
  ok = ok && lie::equal_elements(lie::bracket(D1, Dt2), lie::AlgebraElement::D(parse("2*t")));
  ok = ok && lie::equal_elements(lie::bracket(Dt, Dt2), Dt2);
  report("algebra laws: antisymmetry(100), Jacobi(50), direct-commutator oracle(50), sl(2,R)",
         ok);
}

// criterion 5: linearization link and the measured dilation coefficient
void linearization_link() {
  testgen::ExprGen gen(0xACCE5503);
  bool ok = true;
  for (int j = 0; j < 25 && ok; ++j) {
    Expr v = gen.potential();
    lie::AlgebraElement q(gen.t_function(2), gen.t_function(2), gen.t_function(2));
    auto d = is_zero_detailed(equiv::infinitesimal_action(v, q) + symmetry::residual(v, q));
    ok = d.zero && d.path == DecisionPath::Exact;
  }
  // measured coefficient of xi_tt in the dilation channel at V = 0, x = 0
  Expr f = Expr::func_sym("f", true, false);
  Expr dv = equiv::infinitesimal_action(parse("0"), lie::AlgebraElement::D(f));
  Expr at_x0 = substitute(dv, Bindings().x(Expr::integer(0)));
  CanonicalForm cf = canonicalize(at_x0 * Expr::pow(Expr::func_sym("f", true, false, 2), -1));
  CRat measured = cf.is_constant() ? cf.constant_value() : CRat(0);
  bool coeff_ok = measured == CRat(Rational(0), Rational(1, 4));
  report("linearization link: eps-expansion equals -residual (25 runs), exact",
         ok && coeff_ok,
         "measured i*xi_tt coefficient = " +
             (cf.is_constant() ? rational_to_string(measured.im) : std::string("?")) +
             " (expected 1/4)");
}

// criterion 6: classifier round trip and the adversarial set
void classifier_round_trip() {
  std::mt19937_64 rng(0xACCE5504);
  std::uniform_int_distribution<int> num(0, 12);
  std::uniform_int_distribution<int> den(1, 4);
  auto rnd_pos = [&](Rational lo) {
    Rational r;
    do {
      r = Rational(num(rng), den(rng));
    } while (r < lo);
    return r;
  };
  bool ok = true;
  std::string detail;
  struct Inst {
    int table, id;           // instantiated case
    int want_table, want_id;  // canonical home (aliased rows re-identify there)
    std::map<std::string, Rational> params;
  };
  testgen::ExprGen wgen(0xACCE5505);
  for (int k = 0; k < 10 && ok; ++k) {
    std::vector<Inst> insts;
    insts.push_back({1, 2, 1, 2, {{"nu", rnd_pos(0)}}});
    Rational nu3 = rnd_pos(Rational(1, 4));
    if (nu3 == Rational(1, 2)) nu3 = Rational(3, 4);
    insts.push_back({1, 3, 1, 3, {{"nu", nu3}}});
    insts.push_back({1, 4, 1, 4, {}});
    insts.push_back({1, 5, 1, 5, {}});
    // rows shared between the tables re-identify at their canonical home
    insts.push_back({1, 7, 2, 1, {{"alpha", rnd_pos(0) + 1}, {"beta", rnd_pos(0)}}});
    insts.push_back({2, 3, 1, 4, {}});
    insts.push_back({2, 7, 1, 5, {}});
    insts.push_back({2, 1, 2, 1, {{"alpha", rnd_pos(0) + 1}, {"beta", rnd_pos(0)}}});
    insts.push_back({2, 2, 2, 2, {{"alpha", rnd_pos(0) + 1}, {"beta", rnd_pos(0)}}});
    insts.push_back({2, 4, 2, 4, {{"nu", rnd_pos(0) + 1}}});
    insts.push_back({2, 5, 2, 5, {{"nu", rnd_pos(0)}}});
    Rational nu6 = rnd_pos(0);
    if (nu6 == 1) nu6 = Rational(3, 2);
    insts.push_back({2, 6, 2, 6, {{"nu", nu6}}});
    insts.push_back({2, 8, 2, 8, {}});
    insts.push_back({2, 9, 2, 9, {}});
    for (const auto& inst : insts) {
      catalog::TableCase c = catalog::get_case(inst.table, inst.id);
      Bindings b;
      for (const auto& [name, val] : inst.params) b.param(name, Expr::number(CRat(val)));
      auto r = classifier::classify(substitute(c.potential, b));
      bool good = r.status == classifier::Status::Matched && r.table == inst.want_table &&
                  r.case_id == inst.want_id && r.verified &&
                  r.witness_path == DecisionPath::Exact;
      if (inst.table == inst.want_table && inst.id == inst.want_id) {
        for (const auto& [name, val] : inst.params)
          good = good && r.params.count(name) && r.params.at(name).exact &&
                 *r.params.at(name).exact == val;
      }
      if (!good) {
        ok = false;
        detail = "case (" + std::to_string(inst.table) + "," + std::to_string(inst.id) + ")";
      }
    }
    // generic rows: a concrete in-class instantiation of i W(t) must stay
    // conservative (no tabulated match claimed)
    Expr w = wgen.real_t_function(3);
    auto rg = classifier::classify(Expr::i() * w + Expr::i() * Expr::pow(Expr::t(), 3));
    if (rg.status == classifier::Status::Matched && rg.table == 1 &&
        (rg.case_id == 2 || rg.case_id == 3)) {
      // a random polynomial instance cannot be one of the special families
      ok = false;
      detail = "generic iW(t) claimed a tabulated extension";
    }
  }
  // adversarial set: no false "matched"
  const char* adversarial[20] = {
      "x^2 + i/2 + x^-2", "x + i*x",      "i*x^2",        "2*x^2 + x^-2",
      "-x^2 + x^-2 + i",  "x + x^-2",     "x^-2 + i + 1", "(1+i)*x",
      "x^2 + i*x",        "-x^2 - i + x^-2", "x^3",       "1/x",
      "t*x",              "x^2 + t",      "exp(x)",       "sin(2*x)",
      "1/t",              "i/(t^2+1)",    "nu*x^2",       "exp(exp(t))",
  };
  int false_matches = 0;
  for (const char* s : adversarial) {
    auto r = classifier::classify(parse(s));
    if (r.status == classifier::Status::Matched) ++false_matches;
  }
  report("classifier round trip: 10 instantiations per case, exact; adversarial set clean",
         ok && false_matches == 0,
         detail + (false_matches ? std::to_string(false_matches) + " false matches" : ""));
}

// criterion 7: numerics at the pinned tolerances
void numerics() {
  using namespace numcheck;
  auto t0 = Clock::now();
  bool ok = true;
  std::string detail;

  Grid g256(0, 1, -10, 10, 256, 256, Grid::Boundary::DirichletZero);
  double r_sol = pde_residual(soliton(0.5), parse("0"), g256);
  if (!(r_sol < 1e-6)) {
    ok = false;
    detail += "soliton residual " + std::to_string(r_sol) + "; ";
  }

  double r_boost =
      transported_residual(soliton(0.5), parse("0"), equiv::galilean_boost(Rational(1)), g256);
  if (!(r_boost < 1e-5)) {
    ok = false;
    detail += "boosted residual " + std::to_string(r_boost) + "; ";
  }

  std::vector<double> rs;
  for (int nx : {64, 128, 256}) {
    Grid g(0, 1, -10, 10, 4096, nx, Grid::Boundary::DirichletZero);
    rs.push_back(pde_residual(soliton(0.5), parse("0"), g));
  }
  if (!(rs[0] / rs[1] >= 8.0 && rs[1] / rs[2] >= 8.0)) {
    ok = false;
    detail += "refinement ratios " + std::to_string(rs[0] / rs[1]) + ", " +
              std::to_string(rs[1] / rs[2]) + "; ";
  }

  Grid gsolve(0, 1, -10, 10, 1025, 256, Grid::Boundary::Periodic);
  std::vector<CD> psi0(256);
  for (int k = 0; k < 256; ++k) psi0[k] = soliton(0.5)(0.0, gsolve.x_at(k));
  FieldSample sol = solve_split_step(parse("x^2/100"), psi0, gsolve);
  double drift = std::abs(mass(sol, gsolve.nt - 1) - mass(sol, 0)) / mass(sol, 0);
  if (!(drift < 1e-8)) {
    ok = false;
    detail += "mass drift " + std::to_string(drift) + "; ";
  }

  double dt = seconds_since(t0);
  if (!(dt < 120.0)) {
    ok = false;
    detail += "runtime " + std::to_string(dt) + " s; ";
  }
  report("numerics: soliton < 1e-6 @256x256, boost < 1e-5, x-ratio >= 8, drift < 1e-8",
         ok, detail + "runtime " + std::to_string(dt) + " s");
}

}  // namespace

int main() {
  std::printf("acceptance suite (seed 0x%llX)\n",
              static_cast<unsigned long long>(zero_test_seed()));
  table_reproduction();
  mapping_reproduction();
  kernel_theorems();
  algebra_laws();
  linearization_link();
  classifier_round_trip();
  numerics();
  std::printf("%s\n", g_failures == 0 ? "all criteria passed" : "criteria FAILED");
  return g_failures == 0 ? 0 : 1;
}
