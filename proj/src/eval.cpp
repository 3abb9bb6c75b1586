#include "kforge/eval.hpp"

#include "kforge/parallel.hpp"

namespace kforge {

const std::set<std::string>& Evaluator::free_vars_of(const FormulaPtr& f) {
  std::lock_guard<std::mutex> lock(fv_mu_);
  auto it = fv_cache_.find(f);
  if (it == fv_cache_.end())
    it = fv_cache_.emplace(f, free_variables(*f)).first;
  return it->second;
}

std::size_t Evaluator::intern_rv(const RvPtr& rv) {
  std::lock_guard<std::mutex> lock(rv_mu_);
  auto it = rv_ids_.find(rv);
  if (it != rv_ids_.end()) return it->second;
  for (std::size_t i = 0; i < rv_reps_.size(); ++i) {
    if (rv_reps_[i]->same_table(*rv)) {
      rv_ids_.emplace(rv, i);
      return i;
    }
  }
  rv_reps_.push_back(rv);
  rv_ids_.emplace(rv, rv_reps_.size() - 1);
  return rv_reps_.size() - 1;
}

Evaluator::EnvKey Evaluator::env_key(const FormulaPtr& f, const Environment& env) {
  EnvKey key;
  for (const auto& v : free_vars_of(f)) {
    auto it = env.find(v);
    if (it != env.end()) key.emplace_back(v, intern_rv(it->second));
  }
  return key;
}

Event Evaluator::truth_value(const FormulaPtr& f, const Environment& env) {
  if (!ctx_.space) throw Error("evaluator has no sample space");
  for (const auto& [name, rv] : env)
    if (rv->space() != ctx_.space)
      throw Error("rv '" + name + "' on a different sample space");
  return eval(f, env, true);
}

bool Evaluator::is_valid(const FormulaPtr& f, const Rational& eps) {
  auto fv = free_variables(*f);
  if (!fv.empty()) {
    std::string names;
    for (const auto& v : fv) names += (names.empty() ? "" : ", ") + v;
    throw Error("formula has free variables: " + names);
  }
  if (eps < 0 || eps > 1) throw Error("eps must lie in [0,1]");
  return measure(truth_value(f)) >= Rational(1) - eps;
}

Event Evaluator::eval(const FormulaPtr& f, const Environment& env, bool allow_parallel) {
  std::size_t hash = 0;
  EnvKey key;
  if (ctx_.options.memoize) {
    hash = structural_hash(*f);
    key = env_key(f, env);
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto [lo, hi] = memo_.equal_range(hash);
    for (auto it = lo; it != hi; ++it)
      if (it->second.env == key && structural_equal(*it->second.f, *f))
        return it->second.event;
  }
  Event result = [&]() {
    switch (f->kind) {
      case Formula::Kind::Eq:
      case Formula::Kind::Le:
        return atom_event(*f, env, allow_parallel);
      case Formula::Kind::Not:
        return complement(eval(f->a, env, allow_parallel));
      case Formula::Kind::And:
        return meet(eval(f->a, env, allow_parallel), eval(f->b, env, allow_parallel));
      case Formula::Kind::Or:
        return join(eval(f->a, env, allow_parallel), eval(f->b, env, allow_parallel));
      case Formula::Kind::Implies:
        return join(complement(eval(f->a, env, allow_parallel)),
                    eval(f->b, env, allow_parallel));
      case Formula::Kind::Exists:
      case Formula::Kind::Forall:
        return quantifier_event(f, env, allow_parallel);
    }
    throw Error("malformed formula");
  }();
  if (ctx_.options.memoize) {
    std::lock_guard<std::mutex> lock(memo_mu_);
    auto [lo, hi] = memo_.equal_range(hash);
    bool present = false;
    for (auto it = lo; it != hi; ++it)
      if (it->second.env == key && structural_equal(*it->second.f, *f)) {
        present = true;
        break;
      }
    if (!present) memo_.emplace(hash, MemoEntry{f, std::move(key), result});
  }
  return result;
}

Event Evaluator::atom_event(const Formula& f, const Environment& env,
                            bool allow_parallel) {
  std::size_t n = ctx_.space->size();
  std::vector<unsigned char> hold(n, 0);
  auto one = [&](std::size_t i) {
    PointValuation val(env, ctx_.consts, i);
    Natural l = eval_term(*f.lhs, val);
    Natural r = eval_term(*f.rhs, val);
    bool v = (f.kind == Formula::Kind::Eq) ? (l == r) : (l <= r);
    hold[i] = v ? 1 : 0;
  };
  unsigned workers = allow_parallel ? ctx_.options.workers : 1;
  parallel_for(n, workers, one);
  boost::dynamic_bitset<> bits(n);
  for (std::size_t i = 0; i < n; ++i)
    if (hold[i]) bits.set(i);
  return Event::from_bits(ctx_.space, std::move(bits));
}

Event Evaluator::quantifier_event(const FormulaPtr& f, const Environment& env,
                                  bool allow_parallel) {
  if (!ctx_.family) throw Error("empty family with quantifier");
  const auto& range = ctx_.family->quantifier_range();
  if (range.empty()) throw Error("empty family with quantifier");
  bool exists = (f->kind == Formula::Kind::Exists);
  unsigned workers = ctx_.options.workers;
  if (allow_parallel && workers > 1 && range.size() > 1) {
    std::vector<Event> subs(range.size(), Event::none(ctx_.space));
    parallel_for(range.size(), workers, [&](std::size_t i) {
      Environment sub_env = env;
      sub_env[f->var] = range[i];
      subs[i] = eval(f->a, sub_env, false);
    });
    Event acc = subs[0];
    for (std::size_t i = 1; i < subs.size(); ++i)
      acc = exists ? join(acc, subs[i]) : meet(acc, subs[i]);
    return acc;
  }
  Event acc = exists ? Event::none(ctx_.space) : Event::all(ctx_.space);
  for (const auto& member : range) {
    Environment sub_env = env;
    sub_env[f->var] = member;
    Event sub = eval(f->a, sub_env, allow_parallel);
    acc = exists ? join(acc, sub) : meet(acc, sub);
    if (exists ? acc.full() : acc.empty()) break;
  }
  return acc;
}

Event truth_value(const Context& ctx, const FormulaPtr& f, const Environment& env) {
  Evaluator ev(ctx);
  return ev.truth_value(f, env);
}

bool is_valid(const Context& ctx, const FormulaPtr& f, const Rational& eps) {
  Evaluator ev(ctx);
  return ev.is_valid(f, eps);
}

}  // namespace kforge
