#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kforge/base.hpp"

namespace kforge {

// The fixed arithmetic language: constants are numeric literals, unary
// functions len/p1/p2, binary functions +/*/pair, predicates = and <=.
// The signature is closed; arities are checked at parse time.
enum class Fn { Add, Mul, Pair, Len, Proj1, Proj2 };

std::size_t fn_arity(Fn f);
const char* fn_name(Fn f);
std::optional<Fn> fn_by_name(const std::string& name);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Literal, RvConst, Apply };
  Kind kind;
  std::string name;           // Var, RvConst
  Natural value;              // Literal
  Fn fn = Fn::Add;            // Apply
  std::vector<TermPtr> args;  // Apply

  static TermPtr var(std::string name);
  static TermPtr literal(Natural v);
  static TermPtr rv_const(std::string name);
  static TermPtr apply(Fn f, std::vector<TermPtr> args);
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Eq, Le, Not, And, Or, Implies, Exists, Forall };
  Kind kind;
  TermPtr lhs, rhs;  // Eq, Le
  FormulaPtr a, b;   // Not (a), And/Or/Implies (a, b), quantifier body (a)
  std::string var;   // Exists, Forall

  static FormulaPtr eq(TermPtr l, TermPtr r);
  static FormulaPtr le(TermPtr l, TermPtr r);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr exists(std::string var, FormulaPtr body);
  static FormulaPtr forall(std::string var, FormulaPtr body);
};

bool structural_equal(const Term& a, const Term& b);
bool structural_equal(const Formula& a, const Formula& b);
std::size_t structural_hash(const Term& t);
std::size_t structural_hash(const Formula& f);

std::set<std::string> free_variables(const Formula& f);
std::set<std::string> free_variables(const Term& t);

// Names of random-variable constants occurring in the formula.
std::set<std::string> rv_constants(const Formula& f);

enum class FormulaClass { Open, Existential, Universal, ExistsForallPrefix, General };
const char* formula_class_name(FormulaClass c);

// Open: quantifier-free. Existential/Universal: a nonempty prefix of one
// quantifier kind over an open matrix. ExistsForallPrefix: a strictly
// alternating (exists x)(forall y)... prefix, one variable per block,
// ending with forall, over an open matrix. Everything else is General.
FormulaClass classify_formula(const Formula& f);

// Parses a formula. Identifiers in `declared` become random-variable
// constants; all other identifiers are variables. Bound variables are
// renamed apart from each other and from free occurrences.
FormulaPtr parse_formula(const std::string& text,
                         const std::set<std::string>* declared = nullptr);
TermPtr parse_term(const std::string& text,
                   const std::set<std::string>* declared = nullptr);

// Canonical printer; parse_formula(render_formula(f)) is structurally
// equal to f.
std::string render_formula(const Formula& f);
std::string render_term(const Term& t);

struct SubstResult {
  FormulaPtr formula;
  std::size_t replaced = 0;  // 0 means the variable was not free
};

// Replaces every free occurrence of `var` by the constant `rv_name`.
SubstResult substitute_const(const FormulaPtr& f, const std::string& var,
                             const std::string& rv_name);

// Renames the free variable `from` to `to`, renaming bound variables
// apart when `to` would be captured.
FormulaPtr rename_free(const FormulaPtr& f, const std::string& from,
                       const std::string& to);

// Replaces every free occurrence of `var` by the term `t`; throws when
// a binder would capture a variable of `t`.
FormulaPtr substitute_term(const FormulaPtr& f, const std::string& var,
                           const TermPtr& t);

// The fixed interpretation over the naturals: add/mul are arithmetic,
// len is bit-length (len(0) = 0), pair is Cantor pairing and p1/p2 its
// inverse components.
Natural eval_function(Fn f, const std::vector<Natural>& args);

// Point assignment for evaluating terms and open formulas at one sample.
struct Valuation {
  virtual ~Valuation() = default;
  virtual Natural var(const std::string& name) const = 0;
  virtual Natural rv_const(const std::string& name) const = 0;
};

Natural eval_term(const Term& t, const Valuation& v);
// Quantifier-free formulas only; throws on quantifiers.
bool eval_open(const Formula& f, const Valuation& v);

}  // namespace kforge
