#include <catch2/catch.hpp>

#include "symclass/catalog.hpp"

using namespace symclass;
using namespace symclass::catalog;

TEST_CASE("get_case returns the encoded rows") {
  TableCase c17 = get_case(1, 7);
  CHECK(is_zero(c17.potential - parse("(alpha+i*beta)*x^-2")));
  CHECK(c17.basis.size() == 3);

  TableCase c15 = get_case(1, 5);
  CHECK(is_zero(c15.potential));
  CHECK(c15.basis.size() == 5);

  TableCase c25 = get_case(2, 5);
  CHECK(is_zero(c25.potential - parse("-x^2 + i*nu")));
  CHECK(c25.basis.size() == 4);
  CHECK(c25.cross_ref == 2);

  CHECK_THROWS_AS(get_case(1, 9), std::out_of_range);
  CHECK_THROWS_AS(get_case(3, 1), std::out_of_range);
}

TEST_CASE("generic header rows") {
  TableCase g1 = get_case(1, 0);
  CHECK(g1.basis.size() == 1);  // M only
  TableCase g2 = get_case(2, 0);
  CHECK(g2.basis.size() == 2);  // M, D(1)
  CHECK(g2.cross_ref == 6);
  CHECK(verify_case(g1).pass);
  CHECK(verify_case(g2).pass);
}

TEST_CASE("verify_case: residuals exactly zero and brackets close") {
  // Table 2 Case 9 has the richest bracket structure
  CaseReport r9 = verify_case(get_case(2, 9));
  CHECK(r9.pass);
  for (const auto& oc : r9.operators) CHECK(oc.status == "exact");
  // basis order: M, D(1), G(e^{2t}), G(e^{-2t}), D(e^{4t})
  for (const auto& cc : r9.closure) {
    if (cc.i == 2 && cc.j == 3) {  // [G(e^{2t}), G(e^{-2t})] = -2M
      REQUIRE(cc.ok);
      CHECK(cc.coeffs[0] == Rational(-2));
      for (size_t k = 1; k < cc.coeffs.size(); ++k) CHECK(cc.coeffs[k] == 0);
    }
    if (cc.i == 1 && cc.j == 2) {  // [D(1), G(e^{2t})] = 2 G(e^{2t})
      REQUIRE(cc.ok);
      CHECK(cc.coeffs[2] == Rational(2));
    }
    if (cc.i == 2 && cc.j == 4) {  // [G(e^{2t}), D(e^{4t})] = 0
      REQUIRE(cc.ok);
      for (const auto& v : cc.coeffs) CHECK(v == 0);
    }
  }
}

TEST_CASE("verify_case: Mobius row residual is exactly zero") {
  CaseReport r = verify_case(get_case(1, 2));
  CHECK(r.pass);
  for (const auto& oc : r.operators) CHECK(oc.status == "exact");
}

TEST_CASE("all sixteen numbered cases verify") {
  for (int id = 1; id <= 7; ++id) {
    CaseReport r = verify_case(get_case(1, id));
    INFO("table 1 case " << id);
    CHECK(r.pass);
    for (const auto& oc : r.operators) CHECK(oc.status == "exact");
  }
  for (int id = 1; id <= 9; ++id) {
    CaseReport r = verify_case(get_case(2, id));
    INFO("table 2 case " << id);
    CHECK(r.pass);
    for (const auto& oc : r.operators) CHECK(oc.status == "exact");
  }
}

TEST_CASE("note mappings verify exactly") {
  for (const auto& m : stored_mappings()) {
    MappingReport r = verify_mapping(m);
    INFO("mapping " << m.name << ": " << r.detail);
    CHECK(r.pass);
    CHECK(r.match_path == "exact");
  }
}

TEST_CASE("identity mapping of a case to itself passes") {
  CaseMapping m;
  m.name = "identity 2:1";
  m.source_table = 2;
  m.source_id = 1;
  m.target_table = 2;
  m.target_id = 1;
  m.g = equiv::identity_transform();
  m.target_params = {{"alpha", Expr::param("alpha")}, {"beta", Expr::param("beta")}};
  CHECK(verify_mapping(m).pass);
}

TEST_CASE("mapping 4->4 sends x + i mu^2 to i") {
  for (const auto& m : stored_mappings()) {
    if (m.name != "4->4") continue;
    TableCase src = get_case(2, 4);
    Bindings b;
    for (const auto& [name, e] : m.source_params) b.param(name, e);
    Expr source = substitute(src.potential, b);
    auto mapped = equiv::apply_to_potential(source, m.g);
    REQUIRE(mapped.exact);
    CHECK(is_zero(*mapped.exact - parse("i")));
  }
}

TEST_CASE("full verify_tables run passes") {
  TablesReport rep = verify_tables();
  CHECK(rep.pass);
  CHECK(rep.cases.size() == 18);    // 16 numbered + 2 generic header rows
  CHECK(rep.mappings.size() == 8);  // 6 cross-table witnesses + 2 inverse-time maps
  int numbered = 0;
  for (const auto& c : rep.cases)
    if (c.id != 0) ++numbered;
  CHECK(numbered == 16);
}

TEST_CASE("every Table-2 row has a witnessed Table-1 cross reference") {
  auto maps = stored_mappings();
  for (const auto& c : table2()) {
    if (c.id == 0) continue;
    // identity-witnessed rows carry the same potential in both tables
    TableCase t1 = get_case(1, c.cross_ref);
    bool witnessed = is_zero(c.potential - t1.potential);
    for (const auto& m : maps)
      if (m.source_table == 2 && m.source_id == c.id && m.target_id == c.cross_ref)
        witnessed = true;
    INFO("table 2 case " << c.id << " -> " << c.cross_ref);
    CHECK(witnessed);
  }
}
