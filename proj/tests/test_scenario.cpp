#include "doctest.h"

#include "kforge/scenario.hpp"

#include "helpers.hpp"

using namespace kforge;

namespace {

Scenario parse(const std::string& text) {
  return parse_scenario(text, "p.scn", "");
}

std::string parse_error(const std::string& text) {
  try {
    parse_scenario(text, "p.scn", "");
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected a parse error");
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

const std::string kToy =
    "# toy\n"
    "space n_bits=2 exhaustive\n"
    "eps 1/4\n"
    "rv id builtin identity\n"
    "rv a table 0 1 0 1\n"
    "rv c const 2\n"
    "family: id a\n"
    "formula sat := \"(exists x)(x = c)\"\n";

}  // namespace

TEST_CASE("scenario parsing collects spaces, rvs, families and formulas") {
  auto s = parse(kToy);
  CHECK(s.space->mode() == SampleSpace::Mode::Exhaustive);
  CHECK(s.space->n_bits() == 2);
  CHECK(s.space->size() == 4);
  CHECK(s.eps == Rational(1, 4));
  REQUIRE(s.decls.size() == 3);
  CHECK(s.decls[0]->name() == "id");
  CHECK(s.decls[1]->table_values() == th::nat_vec({0, 1, 0, 1}));
  CHECK(s.decls[2]->value(3) == 2);
  CHECK(s.rv_names == std::set<std::string>{"a", "c", "id"});
  REQUIRE(s.family);
  CHECK(s.family_names == std::vector<std::string>{"id", "a"});
  CHECK(s.family->members().size() == 2);
  CHECK_FALSE(s.filtration);
  REQUIRE(s.formulas.size() == 1);
  CHECK(s.formulas[0].first == "sat");
  CHECK(render_formula(*s.formulas[0].second) == "(exists x)(x = c)");
}

TEST_CASE("comments, blank lines and spacing are cosmetic") {
  auto spaced = parse(
      "\n#leading\n  space   n_bits=2   exhaustive  # trailing\n\n"
      "rv a const 1   # note\n\n");
  CHECK(spaced.space->size() == 4);
  CHECK(spaced.decls.size() == 1);
}

TEST_CASE("sampled spaces draw distinct points deterministically") {
  auto s = parse("space n_bits=16 samples=3 seed=0\n");
  CHECK(s.space->mode() == SampleSpace::Mode::Sampled);
  CHECK(s.space->seed() == 0);
  REQUIRE(s.space->size() == 3);
  // low 16 bits of the first three splitmix64 outputs for seed 0
  CHECK(s.space->points()[0] == 0xCDAF);
  CHECK(s.space->points()[1] == 0x65F4);
  CHECK(s.space->points()[2] == 0x454F);
  auto again = parse("space n_bits=16 samples=3 seed=0\n");
  CHECK(again.space->points() == s.space->points());
}

TEST_CASE("explicit point lists parse as hex") {
  auto s = parse("space n_bits=5 points: 0 A 1f\n");
  CHECK(s.space->mode() == SampleSpace::Mode::Explicit);
  REQUIRE(s.space->size() == 3);
  CHECK(s.space->points()[0] == 0);
  CHECK(s.space->points()[1] == 10);
  CHECK(s.space->points()[2] == 31);
}

TEST_CASE("filtered families declare nested levels") {
  auto s = parse(
      "space n_bits=2 exhaustive\n"
      "rv a table 0 1 0 1\n"
      "rv b table 1 0 1 0\n"
      "rv c const 0\n"
      "family level 1: a b c\n"
      "family level 2: a b\n"
      "family level 3: b\n");
  REQUIRE(s.filtration);
  CHECK(s.filtration->level_names.size() == 3);
  CHECK(s.family_names == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(s.family);
  CHECK(s.family->members().size() == 3);
  REQUIRE(s.family->quantifier_range().size() == 1);
  CHECK(s.family->quantifier_range()[0]->name() == "b");
}

TEST_CASE("scenario errors carry the source location") {
  CHECK(parse_error("eps 1/2\n") == "p.scn: missing space section");
  CHECK(starts_with(
      parse_error("space n_bits=2 exhaustive\nspace n_bits=2 exhaustive\n"),
      "p.scn:2: duplicate space section"));
  CHECK(starts_with(parse_error("space n_bits=x exhaustive\n"),
                    "p.scn:1: bad n_bits value"));
  CHECK(starts_with(parse_error("space n_bits=2 exhaustive now\n"),
                    "p.scn:1: trailing tokens after 'exhaustive'"));
  CHECK(starts_with(parse_error("space n_bits=2 sample=4 seed=1\n"),
                    "p.scn:1: expected samples=<value>, got 'sample=4'"));
  CHECK(starts_with(parse_error("space n_bits=2 samples=4\n"),
                    "p.scn:1: expected seed=<s>"));
  CHECK(starts_with(parse_error("space n_bits=4 points: 0 xy\n"),
                    "p.scn:1: bad hex digit 'x'"));
  CHECK(starts_with(parse_error("space n_bits=30 exhaustive\n"),
                    "p.scn:1: exhaustive space too large"));
  CHECK(starts_with(parse_error("space n_bits=3 points: 9\n"),
                    "p.scn:1: point 9 exceeds 3 bits"));

  const std::string sp = "space n_bits=2 exhaustive\n";
  CHECK(starts_with(parse_error(sp + "eps nine\n"), "p.scn:2: "));
  CHECK(starts_with(parse_error(sp + "eps 3/2\n"),
                    "p.scn:2: eps must lie in [0,1]"));
  CHECK(starts_with(parse_error(sp + "eps 0\neps 0\n"),
                    "p.scn:3: duplicate eps section"));
  CHECK(starts_with(parse_error(sp + "eps\n"),
                    "p.scn:2: expected eps <rational>"));

  CHECK(starts_with(parse_error(sp + "rv a\n"), "p.scn:2: incomplete rv line"));
  CHECK(starts_with(parse_error(sp + "rv a const 0\nrv a const 1\n"),
                    "p.scn:3: duplicate name 'a'"));
  CHECK(starts_with(parse_error(sp + "rv a builtin magic\n"),
                    "p.scn:2: expected 'builtin identity'"));
  CHECK(starts_with(parse_error(sp + "rv a table 0 two\n"),
                    "p.scn:2: bad table value 'two'"));
  CHECK(starts_with(parse_error(sp + "rv a table 0 1 2\n"),
                    "p.scn:2: table length 3 does not match space size 4"));
  CHECK(starts_with(parse_error(sp + "rv a const x\n"),
                    "p.scn:2: expected 'const <value>'"));
  CHECK(starts_with(parse_error(sp + "rv a tape 0\n"),
                    "p.scn:2: unknown rv backing 'tape'"));
  CHECK(starts_with(parse_error(sp + "rv a circuit nope.circ\n"),
                    "p.scn:2: cannot open circuit file"));

  CHECK(starts_with(parse_error(sp + "family:\n"), "p.scn:2: empty family"));
  CHECK(starts_with(
      parse_error(sp + "rv a const 0\nfamily: a\nfamily: a\n"),
      "p.scn:4: duplicate family section"));
  CHECK(starts_with(
      parse_error(sp + "rv a const 0\nfamily: a\nfamily level 1: a\n"),
      "p.scn:4: cannot mix family forms"));
  CHECK(starts_with(parse_error(sp + "rv a const 0\nfamily level 0: a\n"),
                    "p.scn:3: bad level index"));
  CHECK(starts_with(
      parse_error(sp + "rv a const 0\nfamily level 1: a\nfamily level 1: a\n"),
      "p.scn:4: duplicate level 1"));
  CHECK(parse_error(sp + "rv a const 0\nfamily level 1: a\nfamily level 3: a\n") ==
        "p.scn: filtration level 2 missing");
  CHECK(parse_error(sp + "family: ghost\n") ==
        "p.scn: family names undeclared rv 'ghost'");
  // deeper level names resolve against level 1, the family itself
  CHECK(starts_with(
      parse_error(sp +
                  "rv a const 0\nrv b const 1\n"
                  "family level 1: a\nfamily level 2: b\n"),
      "p.scn: filtration level 2 names unknown member 'b'"));

  CHECK(starts_with(parse_error(sp + "formula f x = 0\n"),
                    "p.scn:2: expected 'formula <name> := \"<text>\"'"));
  CHECK(starts_with(parse_error(sp + "formula f := x = 0\n"),
                    "p.scn:2: formula text must be double-quoted"));
  CHECK(starts_with(
      parse_error(sp + "formula f := \"x = 0\"\nformula f := \"x = 1\"\n"),
      "p.scn:3: duplicate name 'f'"));
  CHECK(starts_with(parse_error(sp + "formula f := \"x = = 0\"\n"),
                    "p.scn:2: in formula: "));
  CHECK(starts_with(parse_error(sp + "bogus line\n"),
                    "p.scn:2: unknown section 'bogus'"));
}

TEST_CASE("serialize emits the canonical form and round-trips") {
  auto s = parse(kToy);
  std::string out = serialize_scenario(s);
  CHECK(out ==
        "space n_bits=2 exhaustive\n"
        "eps 1/4\n"
        "rv id builtin identity\n"
        "rv a table 0 1 0 1\n"
        "rv c const 2\n"
        "family: id a\n"
        "formula sat := \"(exists x)(x = c)\"\n");
  CHECK(serialize_scenario(parse(out)) == out);

  auto pts = parse("space n_bits=5 points: 0 A 1f\n");
  CHECK(serialize_scenario(pts) == "space n_bits=5 points: 0 a 1f\neps 0/1\n");

  auto sm = parse("space n_bits=16 samples=3 seed=9\n");
  CHECK(serialize_scenario(sm) ==
        "space n_bits=16 samples=3 seed=9\neps 0/1\n");

  auto filt = parse(
      "space n_bits=2 exhaustive\n"
      "rv a table 0 1 0 1\n"
      "rv b table 1 0 1 0\n"
      "family level 1: a b\n"
      "family level 2: b\n");
  std::string fout = serialize_scenario(filt);
  CHECK(fout.find("family level 1: a b\nfamily level 2: b\n") !=
        std::string::npos);
  CHECK(serialize_scenario(parse(fout)) == fout);
}

TEST_CASE("scenario_formula resolves declared names first") {
  auto s = parse(kToy);
  CHECK(scenario_formula(s, "sat") == s.formulas[0].second);
  auto fresh = scenario_formula(s, "(forall x)(x <= c)");
  CHECK(render_formula(*fresh) == "(forall x)(x <= c)");
  CHECK_THROWS_AS(scenario_formula(s, "x = ="), ParseError);
}

TEST_CASE("make_context copies the scenario and honors overrides") {
  auto s = parse(kToy);
  Context ctx = make_context(s, 4);
  CHECK(ctx.space == s.space);
  CHECK(ctx.family == s.family);
  CHECK(ctx.eps == Rational(1, 4));
  CHECK(ctx.options.workers == 4);
  CHECK(ctx.consts.size() == 3);
  Context over = make_context(s, 1, Rational(1, 8));
  CHECK(over.eps == Rational(1, 8));

  // only id can witness x = c, and only at the sample equal to c
  Evaluator ev(ctx);
  CHECK(measure(ev.truth_value(scenario_formula(s, "sat"))) == Rational(1, 4));
}

TEST_CASE("load_scenario resolves circuit paths against its directory") {
  auto s = load_scenario(std::string(TEST_DATA_DIR) + "/circuits.scn");
  REQUIRE(s.decls.size() == 2);
  CHECK(s.decls[1]->name() == "g");
  CHECK(s.decls[1]->table_values() == th::nat_vec({0, 1, 1, 0}));
  CHECK(s.circuit_paths.at("g") == "xor2.circ");
  CHECK(serialize_scenario(s).find("rv g circuit xor2.circ\n") !=
        std::string::npos);

  try {
    load_scenario("/nonexistent/dir/x.scn");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(th::msg_has(e, "cannot open scenario file"));
  }
}
