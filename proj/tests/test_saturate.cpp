#include "doctest.h"

#include "kforge/saturate.hpp"

#include "helpers.hpp"
#include "oracle.hpp"

using namespace kforge;
using th::cst;
using th::ctx_of;
using th::ev_bits;
using th::ex_space;
using th::fam;
using th::fml;
using th::tab;

namespace {

TypeSpec type_of(const std::vector<std::string>& texts) {
  std::vector<FormulaPtr> members;
  for (const auto& t : texts) members.push_back(parse_formula(t));
  return make_type(std::move(members));
}

}  // namespace

TEST_CASE("make_type renames members to a shared variable") {
  auto p = type_of({"x <= 1", "w = 0"});
  CHECK(p.var == "x");
  CHECK(render_formula(*p.members[1]) == "x = 0");
  CHECK(p.cls == TypeClass::Open);

  CHECK(type_of({"(exists y)(y = x)"}).cls == TypeClass::Existential);
  CHECK(type_of({"(forall y)(y = x)"}).cls == TypeClass::Universal);
  CHECK(type_of({"(exists y)(y = x)", "(forall y)(y = x)"}).cls ==
        TypeClass::Mixed);
  CHECK(type_of({"(exists y)(y = x)", "x <= 1"}).cls == TypeClass::Existential);

  CHECK_THROWS_AS(make_type({}), Error);
  try {
    type_of({"x <= 1", "x <= y"});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(th::msg_has(e, "type member 2 must have exactly one free variable"));
  }
}

TEST_CASE("parse_type skips comments and prefixes errors with the path") {
  auto p = parse_type("# header\n\nx <= 2  # tail comment\nx = 0\n", "p.type");
  REQUIRE(p.members.size() == 2);
  CHECK(render_formula(*p.members[0]) == "x <= 2");

  try {
    parse_type("x <= 2\nx = = 0\n", "bad.type");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("bad.type:2: ", 0) == 0);
  }
  try {
    load_type("/nonexistent/file.type");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(th::msg_has(e, "cannot open type file"));
  }
}

TEST_CASE("conjunction_chain left-associates the prefix") {
  auto p = type_of({"x <= 3", "x <= 2", "x = 0"});
  auto chain = conjunction_chain(p);
  REQUIRE(chain.size() == 3);
  CHECK(structural_equal(*chain[0], *p.members[0]));
  CHECK(chain[1]->kind == Formula::Kind::And);
  CHECK(structural_equal(*chain[1]->a, *p.members[0]));
  CHECK(structural_equal(*chain[1]->b, *p.members[1]));
  CHECK(structural_equal(*chain[2]->a, *chain[1]));
  CHECK(structural_equal(*chain[2]->b, *p.members[2]));
}

TEST_CASE("check_satur on the minimal instance") {
  auto s = ex_space(2);
  auto f = fam(s, {tab("a", s, {0, 1, 0, 1}), tab("b", s, {1, 0, 1, 0})});
  Evaluator ev(ctx_of(s, f));
  auto p = type_of({"(forall y)(x <= y)"});
  for (const auto& u : f->members()) {
    auto rep = check_satur(ev, p, u);
    CHECK(rep.kind == ReportKind::Check);
    CHECK(rep.stage == 1);
    CHECK(rep.prefix == 1);
    CHECK(rep.witness_in_family);
    CHECK(rep.lhs_measure == Rational(1));
    CHECK(rep.rhs_measure == Rational(1, 2));
    CHECK(rep.defect == Rational(1, 2));
    CHECK_FALSE(rep.realized_mod_eps);
    CHECK(rep.full_defect == rep.defect);
    REQUIRE(rep.profile.size() == 1);
    CHECK(rep.profile[0].flags == "ok");
    CHECK(rep.profile[0].gap == Rational(1, 2));
    CHECK(rep.steps[0].witness_gap == Rational(1, 2));
  }
  auto ra = check_satur(ev, p, f->members()[0]);
  CHECK(*ra.rhs == ev_bits(s, "1010"));
}

TEST_CASE("check_satur runs the whole chain and can realize exactly") {
  auto s = ex_space(2);
  auto f = fam(s, {RandomVariable::identity("id", s), cst("c0", s, 0)});
  Evaluator ev(ctx_of(s, f));
  auto p = type_of({"x <= 9", "x = 0"});
  auto rep = check_satur(ev, p, f->by_name("c0"));
  CHECK(rep.stage == 2);
  CHECK(rep.prefix == 2);
  CHECK(rep.defect == Rational(0));
  CHECK(rep.realized_mod_eps);
  REQUIRE(rep.profile.size() == 2);
  CHECK(rep.profile[1].lhs_measure == Rational(1));
  CHECK(rep.profile[1].rhs_measure == Rational(1));
}

TEST_CASE("check_satur outside the quantifier range may go negative") {
  auto s = ex_space(2);
  auto f = fam(s, {tab("a", s, {0, 1, 0, 1}), tab("b", s, {1, 0, 1, 0})});
  Evaluator ev(ctx_of(s, f));
  auto rep = check_satur(ev, type_of({"x = 5"}), cst("u", s, 5));
  CHECK_FALSE(rep.witness_in_family);
  CHECK(rep.lhs_measure == Rational(0));
  CHECK(rep.rhs_measure == Rational(1));
  CHECK(rep.defect == Rational(-1));

  CHECK_THROWS_AS(check_satur(ev, type_of({"x = 5"}), nullptr), Error);
  CHECK_THROWS_AS(check_satur(ev, type_of({"x = 5"}), cst("v", ex_space(3), 0)),
                  Error);
}

TEST_CASE("realize_open_type on a realizable two-step type") {
  auto s = ex_space(2);
  auto f = fam(s, {RandomVariable::identity("id", s), cst("c0", s, 0)});
  Evaluator ev(ctx_of(s, f));
  auto rep = realize_open_type(ev, type_of({"x <= 2", "x = 0"}),
                               WitnessPolicy::Synthesize);
  CHECK(rep.kind == ReportKind::RealizeOpen);
  CHECK(rep.policy == WitnessPolicy::Synthesize);
  CHECK(rep.stage == 2);
  CHECK(rep.prefix == 2);
  CHECK(rep.witness->table_values() == th::nat_vec({0, 0, 0, 0}));
  CHECK(rep.defect == Rational(0));
  CHECK(rep.realized_mod_eps);
  CHECK(rep.full_defect == Rational(0));
  CHECK_FALSE(rep.thinned);
  CHECK(rep.kept.empty());
  REQUIRE(rep.steps.size() == 2);
  for (const auto& st : rep.steps) {
    CHECK(st.witness_gap == Rational(0));
    CHECK(st.mono_loss == Rational(0));
    CHECK(st.flags() == "ok");
  }
  REQUIRE(rep.profile.size() == 2);
  CHECK(rep.profile[0].gap == Rational(0));
  CHECK(rep.profile[1].gap == Rational(0));
}

TEST_CASE("realize_open_type saturates trivially on an unsatisfiable head") {
  auto s = ex_space(2);
  auto f = fam(s, {RandomVariable::identity("id", s), cst("c0", s, 0)});
  Evaluator ev(ctx_of(s, f));
  auto rep = realize_open_type(ev, type_of({"x != x", "x = 0"}),
                               WitnessPolicy::Synthesize);
  CHECK(rep.stage == 2);
  CHECK(rep.defect == Rational(0));
  CHECK(rep.realized_mod_eps);
  CHECK(rep.lhs_measure == Rational(0));
  CHECK(rep.rhs_measure == Rational(0));
}

TEST_CASE("measure collapse fails condition 5") {
  auto s = ex_space(2);
  auto f = fam(s, {tab("a", s, {0, 1, 0, 1}), tab("b", s, {1, 0, 1, 0})});
  Evaluator ev(ctx_of(s, f));
  auto rep = realize_open_type(ev, type_of({"x <= 9", "x = 5"}),
                               WitnessPolicy::Synthesize);
  REQUIRE(rep.steps.size() == 2);
  CHECK(rep.steps[0].all_pass());
  CHECK_FALSE(rep.steps[1].cond5);
  CHECK(rep.steps[1].flags() == "cond5");
  CHECK(rep.stage == 1);
  CHECK(rep.prefix == 1);
  CHECK(rep.defect == Rational(0));
  CHECK(rep.lhs_measure == Rational(1));
  // the whole chain is dead but the accepted prefix is realized exactly
  CHECK(rep.full_lhs_measure == Rational(0));
  CHECK(rep.full_rhs_measure == Rational(0));
  CHECK(rep.profile[1].flags == "cond5");
}

TEST_CASE("deep witness outside the core fails condition 7") {
  auto s = ex_space(2);
  Filtration filt;
  filt.level_names = {{"a", "b", "c"}, {"a", "b"}};
  auto f = fam(s,
               {tab("a", s, {0, 0, 9, 9}), tab("b", s, {5, 5, 0, 0}),
                tab("c", s, {0, 0, 0, 0})},
               filt);
  Evaluator ev(ctx_of(s, f));
  auto rep = realize_open_type(ev, type_of({"x <= 9", "x = 0"}),
                               WitnessPolicy::Synthesize);
  REQUIRE(rep.steps.size() == 2);
  CHECK(rep.steps[0].all_pass());
  CHECK(rep.steps[0].witness_level == 2);
  CHECK(rep.steps[0].witness_in_family);
  // the fold for step 2 coincides with member c, which lives only at
  // level 1, so the membership condition fails at depth 2
  CHECK(rep.steps[1].witness->table_values() == th::nat_vec({0, 0, 0, 0}));
  CHECK(rep.steps[1].witness_in_family);
  CHECK(rep.steps[1].witness_level == 1);
  CHECK(rep.steps[1].cond4);
  CHECK(rep.steps[1].cond5);
  CHECK_FALSE(rep.steps[1].cond7);
  CHECK(rep.steps[1].flags() == "cond7");
  CHECK(rep.stage == 1);
  CHECK(rep.witness->table_values() == th::nat_vec({0, 0, 9, 9}));
  CHECK(rep.defect == Rational(0));
  CHECK(rep.full_defect == Rational(1, 2));
  REQUIRE(rep.profile.size() == 2);
  CHECK(rep.profile[1].lhs_measure == Rational(1));
  CHECK(rep.profile[1].rhs_measure == Rational(1, 2));
  CHECK(rep.profile[1].flags == "cond7");
}

TEST_CASE("family-only realization reports its shortfall") {
  auto s = ex_space(2);
  auto f = fam(s, {tab("a", s, {0, 9, 9, 0}), tab("b", s, {9, 0, 0, 9})});
  Evaluator ev(ctx_of(s, f));
  auto rep =
      realize_open_type(ev, type_of({"x = 0"}), WitnessPolicy::FamilyOnly);
  CHECK(rep.policy == WitnessPolicy::FamilyOnly);
  CHECK(rep.witness->name() == "a");
  CHECK(rep.witness_in_family);
  CHECK(rep.stage == 1);
  CHECK(rep.lhs_measure == Rational(1));
  CHECK(rep.rhs_measure == Rational(1, 2));
  CHECK(rep.defect == Rational(1, 2));
  CHECK_FALSE(rep.realized_mod_eps);
  CHECK(rep.steps[0].witness_gap == Rational(1, 2));

  Context c = ctx_of(s, f, Rational(1, 2));
  Evaluator ev2(c);
  auto rep2 =
      realize_open_type(ev2, type_of({"x = 0"}), WitnessPolicy::FamilyOnly);
  CHECK(rep2.defect == Rational(1, 2));
  CHECK(rep2.realized_mod_eps);
}

TEST_CASE("thinning drops steps that would break the chain") {
  auto s = ex_space(2);
  auto f = fam(s, {RandomVariable::identity("id", s)});
  Evaluator ev(ctx_of(s, f));
  auto p = type_of({"x <= 3", "x = 9"});
  auto rep = realize_open_type(ev, p, WitnessPolicy::Synthesize, true);
  CHECK(rep.thinned);
  CHECK(rep.kept == std::vector<std::size_t>{1});
  REQUIRE(rep.steps.size() == 1);
  CHECK(rep.steps[0].k == 1);
  CHECK(rep.stage == 1);
  CHECK(rep.defect == Rational(0));
  CHECK(rep.full_defect == Rational(0));

  auto full = realize_open_type(ev, p, WitnessPolicy::Synthesize, false);
  CHECK(full.steps.size() == 2);
  CHECK(full.stage == 1);
  CHECK(full.defect == rep.defect);

  auto keep_all = realize_open_type(ev, type_of({"x <= 3", "x <= 1", "x = 0"}),
                                    WitnessPolicy::Synthesize, true);
  CHECK(keep_all.kept == std::vector<std::size_t>{1, 2, 3});
  CHECK(keep_all.stage == 3);
  CHECK(keep_all.defect == Rational(0));
}

TEST_CASE("realize_open_type rejects non-open types and empty families") {
  auto s = ex_space(2);
  auto f = fam(s, {cst("c0", s, 0)});
  Evaluator ev(ctx_of(s, f));
  try {
    realize_open_type(ev, type_of({"(exists y)(y = x)"}),
                      WitnessPolicy::Synthesize);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(th::msg_has(e, "realize_open_type requires an open type"));
  }
  Context bare;
  bare.space = s;
  Evaluator ev2(bare);
  CHECK_THROWS_AS(
      realize_open_type(ev2, type_of({"x = 0"}), WitnessPolicy::Synthesize),
      Error);
}

TEST_CASE("realize_existential_type lifts through the pairing reduction") {
  auto s = ex_space(2);
  auto f = fam(s, {RandomVariable::identity("id", s), cst("c0", s, 0)});
  Evaluator ev(ctx_of(s, f));
  auto p = type_of({"(exists y)(y <= x)"});
  auto rep = realize_existential_type(ev, p, WitnessPolicy::Synthesize, 1);
  CHECK(rep.kind == ReportKind::RealizeExistential);
  REQUIRE(rep.reduced.size() == 1);
  CHECK(render_formula(*rep.reduced[0]) == "p1(p2(z)) <= p1(z)");
  CHECK(rep.var == "z");
  CHECK(rep.closure_added == 5);
  CHECK(rep.z_witness->table_values() == th::nat_vec({0, 1, 0, 3}));
  CHECK(rep.witness->table_values() == th::nat_vec({0, 1, 0, 2}));
  CHECK_FALSE(rep.witness_in_family);
  CHECK(rep.stage == 1);
  CHECK(rep.defect == Rational(0));
  CHECK(rep.realized_mod_eps);
  REQUIRE(rep.x_profile.size() == 1);
  CHECK(rep.x_profile[0].lhs_measure == Rational(1));
  CHECK(rep.x_profile[0].gap == Rational(0));
  CHECK(rep.x_profile[0].flags == "ok");
  // the z-side and x-side existentials agree measure for measure
  CHECK(rep.profile[0].lhs_measure == rep.x_profile[0].lhs_measure);

  for (std::size_t w = 0; w < 4; ++w)
    CHECK(oracle::unpair(rep.z_witness->value(w)).first == rep.witness->value(w));
}

TEST_CASE("realize_existential_type accepts open members unchanged") {
  auto s = ex_space(2);
  auto f = fam(s, {RandomVariable::identity("id", s), cst("c0", s, 0)});
  Evaluator ev(ctx_of(s, f));
  auto rep = realize_existential_type(ev, type_of({"x <= 2"}),
                                      WitnessPolicy::Synthesize, 0);
  REQUIRE(rep.reduced.size() == 1);
  CHECK(render_formula(*rep.reduced[0]) == "p1(z) <= 2");
  CHECK(rep.closure_added == 0);
  CHECK(rep.defect == Rational(0));
  CHECK(rep.x_profile[0].gap == Rational(0));
  CHECK(rep.witness->table_values() == th::nat_vec({0, 1, 0, 2}));
}

TEST_CASE("closure depth zero can leave an unrealized existential") {
  auto s = ex_space(2);
  auto f = fam(s, {cst("c1", s, 1), cst("c2", s, 2)});
  Evaluator ev(ctx_of(s, f));
  auto rep = realize_existential_type(ev, type_of({"(exists y)(y = x)"}),
                                      WitnessPolicy::Synthesize, 0);
  CHECK(rep.closure_added == 0);
  // no family member encodes a valid pair, so the z-side event is empty
  // and the projected witness misses the x-side existential entirely
  CHECK(rep.lhs_measure == Rational(0));
  CHECK(rep.defect == Rational(0));
  REQUIRE(rep.x_profile.size() == 1);
  CHECK(rep.x_profile[0].lhs_measure == Rational(1));
  CHECK(rep.x_profile[0].gap == Rational(1));
}

TEST_CASE("realize_existential_type rejects universal members") {
  auto s = ex_space(2);
  auto f = fam(s, {cst("c0", s, 0)});
  Evaluator ev(ctx_of(s, f));
  try {
    realize_existential_type(ev, type_of({"(forall y)(y = x)"}),
                             WitnessPolicy::Synthesize, 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(th::msg_has(e,
                      "realize_existential_type requires existential or open "
                      "members"));
  }
}

TEST_CASE("term_type enumerates substitution instances") {
  auto a = fml("y <= x");
  auto p0 = term_type(a, "x", "y", 0);
  REQUIRE(p0.members.size() == 1);
  CHECK(render_formula(*p0.members[0]) == "x <= x");
  CHECK(p0.cls == TypeClass::Open);
  CHECK(p0.var == "x");

  auto p1 = term_type(a, "x", "y", 1);
  REQUIRE(p1.members.size() == 7);
  std::vector<std::string> got;
  for (const auto& m : p1.members) got.push_back(render_formula(*m));
  std::vector<std::string> want{
      "x <= x",         "x + x <= x", "x * x <= x", "pair(x, x) <= x",
      "len(x) <= x",    "p1(x) <= x", "p2(x) <= x"};
  CHECK(got == want);

  auto p2 = term_type(a, "x", "y", 2);
  CHECK(p2.members.size() > 7);
  for (std::size_t i = 0; i < 7; ++i)
    CHECK(render_formula(*p2.members[i]) == want[i]);
  std::set<std::string> uniq;
  for (const auto& m : p2.members) CHECK(uniq.insert(render_formula(*m)).second);
}

TEST_CASE("term_type validates its inputs") {
  CHECK_THROWS_AS(term_type(fml("(exists y)(y <= x)"), "x", "y", 1), Error);
  try {
    term_type(fml("y <= x"), "x", "x", 1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(th::msg_has(e, "free variables exactly"));
  }
  CHECK_THROWS_AS(term_type(fml("x <= x"), "x", "y", 1), Error);
  CHECK_THROWS_AS(term_type(fml("x + y <= w"), "x", "y", 1), Error);
}

TEST_CASE("universal failure demo, small instance") {
  auto d = build_universal_failure(16, 2, 64, 1, 2, 2, 1);
  CHECK(d.n == 16);
  CHECK(d.levels == 2);
  CHECK(d.samples == 64);
  CHECK(d.budget_exponents == std::vector<unsigned>{16, 4});
  CHECK(d.scenario.space->size() == 64);
  CHECK(d.family_size == d.scenario.family->members().size());
  CHECK(d.core_size == d.scenario.family->quantifier_range().size());
  CHECK(d.core_size < d.family_size);
  REQUIRE(d.prefix.size() == 2);
  CHECK(d.prefix[0].k == 1);
  CHECK(d.prefix[1].lhs_running <= d.prefix[0].lhs_running);
  CHECK(d.lhs_final == d.prefix[1].lhs_running);
  CHECK(d.deep_meet.size() == d.core_size);
  Rational worst(0);
  bool first = true;
  for (const auto& [name, m] : d.deep_meet) {
    CHECK(m >= Rational(0));
    CHECK(m <= Rational(1));
    if (first || m > worst) worst = m;
    first = false;
  }
  CHECK(d.deep_meet_max == worst);
  REQUIRE(d.squeeze.size() == 2);
  CHECK(d.squeeze[0].budget_exponent == 16);
  CHECK(d.squeeze[0].value == Natural(1) << 15);
  CHECK(d.squeeze[0].matched_by == "lenwit_c32768");
  CHECK(d.squeeze[0].penalty == Rational(1));
  CHECK(d.squeeze[1].budget_exponent == 4);
  CHECK(d.squeeze[1].value == 8);
  CHECK(d.squeeze[1].matched_by == "c128");
  CHECK(d.squeeze[1].matched_level == 2);
  CHECK(d.squeeze[1].penalty == Rational(1));

  // the type pairs the length-power budget with the untypability clause
  REQUIRE(d.type.members.size() == 2);
  auto want = parse_formula(
      "(len(x) * len(x) <= nlen) & ((forall y)(len(y) != x))",
      &d.scenario.rv_names);
  CHECK(structural_equal(*d.type.members[1], *want));
}

TEST_CASE("universal failure demo validates its arguments") {
  CHECK_THROWS_AS(build_universal_failure(8, 2, 64, 1, 2, 2, 1), Error);
  CHECK_THROWS_AS(build_universal_failure(16, 1, 64, 1, 2, 2, 1), Error);
  CHECK_THROWS_AS(build_universal_failure(16, 2, 32, 1, 2, 2, 1), Error);
  CHECK_THROWS_AS(build_universal_failure(16, 2, 64, 1, 0, 2, 1), Error);
  CHECK_THROWS_AS(build_universal_failure(70000, 2, 64, 1, 2, 2, 1), Error);
}

TEST_CASE("demo runs are deterministic for a fixed seed") {
  auto a = build_universal_failure(16, 2, 64, 9, 2, 2, 1);
  auto b = build_universal_failure(16, 2, 64, 9, 2, 2, 4);
  CHECK(a.lhs_final == b.lhs_final);
  CHECK(a.deep_meet_max == b.deep_meet_max);
  CHECK(a.deep_meet_argmax == b.deep_meet_argmax);
  CHECK(a.family_size == b.family_size);
  REQUIRE(a.deep_meet.size() == b.deep_meet.size());
  for (std::size_t i = 0; i < a.deep_meet.size(); ++i) {
    CHECK(a.deep_meet[i].first == b.deep_meet[i].first);
    CHECK(a.deep_meet[i].second == b.deep_meet[i].second);
  }
}
