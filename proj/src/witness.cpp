#include "kforge/witness.hpp"

namespace kforge {

const char* policy_name(WitnessPolicy p) {
  return p == WitnessPolicy::Synthesize ? "synthesize" : "family-only";
}

WitnessPolicy policy_by_name(const std::string& name) {
  if (name == "synthesize") return WitnessPolicy::Synthesize;
  if (name == "family-only") return WitnessPolicy::FamilyOnly;
  throw Error("unknown policy '" + name + "'");
}

namespace {

// γ(ω) = first member whose event membership matches `pick_in_event`,
// else the last member; this is the unrolled right fold of the case
// definition over the member order.
RvPtr fold_merge(const std::vector<RvPtr>& members, const std::vector<Event>& events,
                 bool pick_in_event, const std::string& name, std::string provenance) {
  const SpacePtr& space = members.front()->space();
  std::vector<Natural> values;
  values.reserve(space->size());
  for (std::size_t w = 0; w < space->size(); ++w) {
    std::size_t chosen = members.size() - 1;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (events[i].test(w) == pick_in_event) {
        chosen = i;
        break;
      }
    }
    values.push_back(members[chosen]->value(w));
  }
  return RandomVariable::synthesized(name, space, std::move(values),
                                     std::move(provenance));
}

void collect_var_names(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) out.insert(t.name);
  for (const auto& a : t.args) collect_var_names(*a, out);
}

void collect_var_names(const Formula& f, std::set<std::string>& out) {
  if (f.lhs) collect_var_names(*f.lhs, out);
  if (f.rhs) collect_var_names(*f.rhs, out);
  if (!f.var.empty()) out.insert(f.var);
  if (f.a) collect_var_names(*f.a, out);
  if (f.b) collect_var_names(*f.b, out);
}

const std::vector<RvPtr>& member_range(Evaluator& ev) {
  const auto& ctx = ev.context();
  if (!ctx.family) throw Error("empty family");
  const auto& range = ctx.family->quantifier_range();
  if (range.empty()) throw Error("empty family");
  return range;
}

std::vector<Event> member_events(Evaluator& ev, const FormulaPtr& f,
                                 const std::string& var, const Environment& env,
                                 const std::vector<RvPtr>& range) {
  std::vector<Event> out;
  out.reserve(range.size());
  for (const auto& m : range) {
    Environment sub = env;
    sub[var] = m;
    out.push_back(ev.truth_value(f, sub));
  }
  return out;
}

WitnessResult pick_extreme(Evaluator& ev, const std::vector<RvPtr>& range,
                           const std::vector<Event>& events, const Event& target,
                           bool maximize) {
  std::size_t best = 0;
  Rational best_m = measure(events[0]);
  for (std::size_t i = 1; i < range.size(); ++i) {
    Rational m = measure(events[i]);
    if (maximize ? m > best_m : m < best_m) {
      best = i;
      best_m = m;
    }
  }
  WitnessResult r{range[best], events[best], target,
                  measure(sym_difference(target, events[best])), true, {}};
  r.in_family = ev.context().family->contains_table(*range[best]);
  r.trace.push_back(std::string(maximize ? "argmax" : "argmin") + " member: " +
                    range[best]->name());
  return r;
}

}  // namespace

WitnessResult witness_existential(Evaluator& ev, const FormulaPtr& A,
                                  const std::string& var, WitnessPolicy policy,
                                  const Environment& env) {
  if (classify_formula(*A) != FormulaClass::Open)
    throw Error("formula is not open");
  const auto& range = member_range(ev);
  auto events = member_events(ev, A, var, env, range);
  Event target = events[0];
  for (std::size_t i = 1; i < events.size(); ++i) target = join(target, events[i]);
  if (policy == WitnessPolicy::FamilyOnly)
    return pick_extreme(ev, range, events, target, true);
  auto gamma = fold_merge(range, events, true, "witness(" + var + ")",
                          "case fold over " + render_formula(*A));
  Environment sub = env;
  sub[var] = gamma;
  Event got = ev.truth_value(A, sub);
  WitnessResult r{gamma, got, target, measure(sym_difference(target, got)),
                  ev.context().family->contains_table(*gamma), {}};
  r.trace.push_back("case condition: " + render_formula(*A));
  for (const auto& m : range) r.trace.push_back("member: " + m->name());
  return r;
}

WitnessResult cowitness_universal(Evaluator& ev, const FormulaPtr& C,
                                  const std::string& var, WitnessPolicy policy,
                                  const Environment& env) {
  if (classify_formula(*C) != FormulaClass::Open)
    throw Error("formula is not open");
  const auto& range = member_range(ev);
  auto events = member_events(ev, C, var, env, range);
  Event target = events[0];
  for (std::size_t i = 1; i < events.size(); ++i) target = meet(target, events[i]);
  if (policy == WitnessPolicy::FamilyOnly)
    return pick_extreme(ev, range, events, target, false);
  auto gamma = fold_merge(range, events, false, "cowitness(" + var + ")",
                          "case fold over !(" + render_formula(*C) + ")");
  Environment sub = env;
  sub[var] = gamma;
  Event got = ev.truth_value(C, sub);
  WitnessResult r{gamma, got, target, measure(sym_difference(target, got)),
                  ev.context().family->contains_table(*gamma), {}};
  r.trace.push_back("case condition: !(" + render_formula(*C) + ")");
  for (const auto& m : range) r.trace.push_back("member: " + m->name());
  return r;
}

SkolemChain skolem_chain(Evaluator& ev, const FormulaPtr& A, WitnessPolicy policy) {
  auto cls = classify_formula(*A);
  if (cls != FormulaClass::Open && cls != FormulaClass::ExistsForallPrefix)
    throw Error("formula is not in the exists-forall prefix class");
  Event base = ev.truth_value(A);
  std::vector<SkolemStage> stages;
  Environment env;
  FormulaPtr cur = A;
  std::size_t stage_no = 0;
  while (cur->kind == Formula::Kind::Exists || cur->kind == Formula::Kind::Forall) {
    bool exists = (cur->kind == Formula::Kind::Exists);
    std::string var = cur->var;
    FormulaPtr body = cur->a;
    const auto& range = member_range(ev);
    auto events = member_events(ev, body, var, env, range);
    bool open_body = (classify_formula(*body) == FormulaClass::Open);
    RvPtr chosen;
    Event value = Event::none(ev.context().space);
    std::vector<std::string> trace;
    if (policy == WitnessPolicy::Synthesize) {
      ++stage_no;
      std::string name = (exists ? "skolem_e" : "skolem_a") + std::to_string(stage_no);
      std::string cond = open_body
                             ? (exists ? "case condition: " : "case condition: !(") +
                                   render_formula(*body) + (exists ? "" : ")")
                             : "table-defined by remainder events of: " +
                                   render_formula(*body);
      chosen = fold_merge(range, events, exists, name, cond);
      Environment sub = env;
      sub[var] = chosen;
      value = ev.truth_value(body, sub);
      trace.push_back(cond);
      for (const auto& m : range) trace.push_back("member: " + m->name());
    } else {
      ++stage_no;
      std::size_t best = 0;
      Rational best_m = measure(events[0]);
      for (std::size_t i = 1; i < range.size(); ++i) {
        Rational m = measure(events[i]);
        if (exists ? m > best_m : m < best_m) {
          best = i;
          best_m = m;
        }
      }
      chosen = range[best];
      value = events[best];
      trace.push_back(std::string(exists ? "argmax" : "argmin") + " member: " +
                      chosen->name());
    }
    SkolemStage st{cur->kind,
                   var,
                   chosen,
                   ev.context().family->contains_table(*chosen),
                   policy == WitnessPolicy::Synthesize && !open_body,
                   value,
                   measure(sym_difference(value, base)),
                   std::move(trace)};
    stages.push_back(std::move(st));
    env[var] = chosen;
    cur = body;
  }
  Event matrix_event = ev.truth_value(cur, env);
  return SkolemChain{A, std::move(base), std::move(stages), std::move(matrix_event)};
}

std::vector<FormulaPtr> pairing_reduce(const std::vector<FormulaPtr>& members) {
  std::vector<FormulaPtr> out;
  out.reserve(members.size());
  TermPtr z = Term::var("z");
  for (std::size_t k = 1; k <= members.size(); ++k) {
    FormulaPtr A = members[k - 1];
    auto fv = free_variables(*A);
    if (fv.size() != 1)
      throw Error("type member must have exactly one free variable");
    std::string x = *fv.begin();
    // The replacement terms are built from the variable z; any member
    // variable named z must be renamed away before substitution or its
    // occurrences would alias them.
    std::set<std::string> used;
    collect_var_names(*A, used);
    std::size_t fresh = 0;
    auto next_fresh = [&]() {
      std::string cand;
      do cand = "z_" + std::to_string(++fresh);
      while (used.count(cand));
      used.insert(cand);
      return cand;
    };
    if (x == "z") {
      std::string x2 = next_fresh();
      A = rename_free(A, x, x2);
      x = x2;
    }
    std::vector<std::string> ys;
    FormulaPtr cur = A;
    while (cur->kind == Formula::Kind::Exists) {
      std::string y = cur->var;
      FormulaPtr body = cur->a;
      if (y == "z") {
        std::string y2 = next_fresh();
        body = rename_free(body, y, y2);
        y = y2;
      }
      ys.push_back(y);
      cur = body;
    }
    if (classify_formula(*cur) != FormulaClass::Open)
      throw Error("type member is not existential");
    TermPtr w = z;
    for (std::size_t j = 0; j < k; ++j) w = Term::apply(Fn::Proj2, {w});
    w = Term::apply(Fn::Proj1, {w});
    FormulaPtr body = substitute_term(cur, x, Term::apply(Fn::Proj1, {z}));
    std::size_t m = ys.size();
    for (std::size_t i = 0; i < m; ++i) {
      TermPtr t = w;
      for (std::size_t j = 0; j < i; ++j) t = Term::apply(Fn::Proj2, {t});
      if (i + 1 < m) t = Term::apply(Fn::Proj1, {t});
      body = substitute_term(body, ys[i], t);
    }
    out.push_back(std::move(body));
  }
  return out;
}

RvPtr pack_tuple_witness(const RvPtr& gamma, const std::vector<RvPtr>& betas) {
  const SpacePtr& space = gamma->space();
  for (const auto& b : betas)
    if (b->space() != space) throw Error("rvs on different sample spaces");
  std::vector<Natural> values;
  values.reserve(space->size());
  for (std::size_t w = 0; w < space->size(); ++w) {
    Natural acc = gamma->value(w);
    for (std::size_t i = betas.size(); i > 0; --i)
      acc = cantor_pair(betas[i - 1]->value(w), acc);
    values.push_back(cantor_pair(gamma->value(w), acc));
  }
  std::string name = "pack(" + gamma->name();
  for (const auto& b : betas) name += "," + b->name();
  name += ")";
  return RandomVariable::synthesized(name, space, std::move(values),
                                     "right-nested pairing, trailing " +
                                         gamma->name());
}

}  // namespace kforge
