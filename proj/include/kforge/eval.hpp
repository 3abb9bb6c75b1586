#pragma once

#include <map>
#include <mutex>
#include <set>
#include <unordered_map>

#include "kforge/rv.hpp"

namespace kforge {

using Environment = std::map<std::string, RvPtr>;

struct EvalOptions {
  unsigned workers = 1;
  bool memoize = true;
};

struct Context {
  SpacePtr space;
  FamilyPtr family;                    // may be null for quantifier-free work
  std::map<std::string, RvPtr> consts; // every declared rv, family member or not
  Rational eps = 0;
  EvalOptions options;
};

// ⟦A⟧ per the Boolean clauses: atoms pointwise, connectives as event
// algebra, ∃/∀ as join/meet over the family's quantifier range. One
// Evaluator instance carries a memo cache across calls; results are
// identical for any worker count.
class Evaluator {
 public:
  explicit Evaluator(Context ctx) : ctx_(std::move(ctx)) {}

  const Context& context() const { return ctx_; }

  Event truth_value(const FormulaPtr& f, const Environment& env = {});
  bool is_valid(const FormulaPtr& f, const Rational& eps);

 private:
  Event eval(const FormulaPtr& f, const Environment& env, bool allow_parallel);
  Event atom_event(const Formula& f, const Environment& env, bool allow_parallel);
  Event quantifier_event(const FormulaPtr& f, const Environment& env,
                         bool allow_parallel);
  const std::set<std::string>& free_vars_of(const FormulaPtr& f);
  std::size_t intern_rv(const RvPtr& rv);
  using EnvKey = std::vector<std::pair<std::string, std::size_t>>;
  EnvKey env_key(const FormulaPtr& f, const Environment& env);

  Context ctx_;

  struct MemoEntry {
    FormulaPtr f;
    EnvKey env;
    Event event;
  };
  std::unordered_multimap<std::size_t, MemoEntry> memo_;
  std::mutex memo_mu_;
  // shared_ptr keys pin the nodes: a recycled heap address must not
  // alias a cache entry for an object that no longer exists
  std::map<FormulaPtr, std::set<std::string>> fv_cache_;
  std::mutex fv_mu_;
  // extensional rv ids: same value table, same id
  std::vector<RvPtr> rv_reps_;
  std::map<RvPtr, std::size_t> rv_ids_;
  std::mutex rv_mu_;
};

Event truth_value(const Context& ctx, const FormulaPtr& f, const Environment& env = {});
bool is_valid(const Context& ctx, const FormulaPtr& f, const Rational& eps);

}  // namespace kforge
