#include "kforge/saturate.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace kforge {

const char* type_class_name(TypeClass c) {
  switch (c) {
    case TypeClass::Open:
      return "open";
    case TypeClass::Existential:
      return "existential";
    case TypeClass::Universal:
      return "universal";
    case TypeClass::Mixed:
      return "mixed";
  }
  return "?";
}

std::string ChainStep::flags() const {
  if (failed.empty()) return "ok";
  std::string out;
  for (const auto& f : failed) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

namespace {

TypeClass classify_members(const std::vector<FormulaPtr>& members) {
  bool ex = false, uni = false, other = false;
  for (const auto& m : members) {
    switch (classify_formula(*m)) {
      case FormulaClass::Open:
        break;
      case FormulaClass::Existential:
        ex = true;
        break;
      case FormulaClass::Universal:
        uni = true;
        break;
      default:
        other = true;
        break;
    }
  }
  if (other || (ex && uni)) return TypeClass::Mixed;
  if (ex) return TypeClass::Existential;
  if (uni) return TypeClass::Universal;
  return TypeClass::Open;
}

void collect_names(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::RvConst:
      out.insert(t->name);
      break;
    case Term::Kind::Literal:
      break;
    case Term::Kind::Apply:
      for (const auto& a : t->args) collect_names(a, out);
      break;
  }
}

void collect_names(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Le:
      collect_names(f->lhs, out);
      collect_names(f->rhs, out);
      break;
    case Formula::Kind::Not:
      collect_names(f->a, out);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      collect_names(f->a, out);
      collect_names(f->b, out);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      out.insert(f->var);
      collect_names(f->a, out);
      break;
  }
}

// Alpha-renames every binder called `name` to a fresh name so the
// pairing rewrite can introduce `name` as its tuple variable.
FormulaPtr rebind_away(const FormulaPtr& f, const std::string& name,
                       std::set<std::string>& used) {
  switch (f->kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Le:
      return f;
    case Formula::Kind::Not:
      return Formula::negate(rebind_away(f->a, name, used));
    case Formula::Kind::And:
      return Formula::conj(rebind_away(f->a, name, used),
                           rebind_away(f->b, name, used));
    case Formula::Kind::Or:
      return Formula::disj(rebind_away(f->a, name, used),
                           rebind_away(f->b, name, used));
    case Formula::Kind::Implies:
      return Formula::implies(rebind_away(f->a, name, used),
                              rebind_away(f->b, name, used));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      FormulaPtr body = rebind_away(f->a, name, used);
      std::string var = f->var;
      if (var == name) {
        std::string fresh;
        unsigned i = 0;
        do {
          fresh = name + "_" + std::to_string(++i);
        } while (used.count(fresh));
        used.insert(fresh);
        body = rename_free(body, name, fresh);
        var = fresh;
      }
      return f->kind == Formula::Kind::Exists ? Formula::exists(var, body)
                                              : Formula::forall(var, body);
    }
  }
  return f;
}

std::string trimmed(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

}  // namespace

TypeSpec make_type(std::vector<FormulaPtr> members) {
  if (members.empty()) throw Error("empty type");
  TypeSpec p;
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto fv = free_variables(*members[i]);
    if (fv.size() != 1)
      throw Error("type member " + std::to_string(i + 1) +
                  " must have exactly one free variable");
    const std::string& v = *fv.begin();
    if (i == 0)
      p.var = v;
    else if (v != p.var)
      members[i] = rename_free(members[i], v, p.var);
  }
  p.members = std::move(members);
  p.cls = classify_members(p.members);
  return p;
}

TypeSpec parse_type(const std::string& text, const std::string& display_path,
                    const std::set<std::string>* declared) {
  std::vector<FormulaPtr> members;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    try {
      members.push_back(parse_formula(line, declared));
    } catch (const ParseError& e) {
      throw Error(display_path + ":" + std::to_string(lineno) + ": " +
                  e.what());
    }
  }
  try {
    return make_type(std::move(members));
  } catch (const Error& e) {
    throw Error(display_path + ": " + e.what());
  }
}

TypeSpec load_type(const std::string& path,
                   const std::set<std::string>* declared) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open type file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_type(buf.str(), path, declared);
}

std::vector<FormulaPtr> conjunction_chain(const TypeSpec& p) {
  if (p.members.empty()) throw Error("empty type");
  std::vector<FormulaPtr> chain;
  chain.reserve(p.members.size());
  chain.push_back(p.members[0]);
  for (std::size_t k = 1; k < p.members.size(); ++k)
    chain.push_back(Formula::conj(chain.back(), p.members[k]));
  return chain;
}

SaturationReport check_satur(Evaluator& ev, const TypeSpec& p, const RvPtr& u) {
  if (!u) throw Error("null witness");
  const Context& ctx = ev.context();
  if (u->space() != ctx.space)
    throw Error("witness on a different sample space");
  auto chain = conjunction_chain(p);

  SaturationReport rep;
  rep.kind = ReportKind::Check;
  rep.var = p.var;
  rep.eps = ctx.eps;
  rep.witness = u;
  rep.witness_in_family = ctx.family && ctx.family->contains_table(*u);

  std::optional<Event> lhs, rhs;
  for (std::size_t k = 1; k <= chain.size(); ++k) {
    ChainStep st;
    st.k = k;
    st.chain_formula = chain[k - 1];
    st.witness = u;
    st.witness_in_family = rep.witness_in_family;
    if (ctx.family && ctx.family->has_filtration())
      st.witness_level = ctx.family->filtration_level(*u);
    Event ex = ev.truth_value(Formula::exists(p.var, chain[k - 1]));
    Event ru = ev.truth_value(chain[k - 1], {{p.var, u}});
    st.witness_gap = measure(difference(ex, ru));
    st.mono_loss = rhs ? measure(difference(ru, *rhs)) : Rational(0);
    lhs = lhs ? meet(*lhs, ex) : ex;
    rhs = rhs ? meet(*rhs, ru) : ru;
    st.exists_event = ex;
    st.raw_event = ru;
    st.mono_event = *rhs;
    rep.profile.push_back({k, measure(ex), measure(ru),
                           measure(ex) - measure(ru), st.flags()});
    rep.steps.push_back(std::move(st));
  }
  rep.stage = chain.size();
  rep.prefix = chain.size();
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.lhs_measure = measure(*lhs);
  rep.rhs_measure = measure(*rhs);
  rep.defect = rep.lhs_measure - rep.rhs_measure;
  rep.realized_mod_eps = rep.defect <= ctx.eps;
  rep.full_lhs = lhs;
  rep.full_rhs = rhs;
  rep.full_lhs_measure = rep.lhs_measure;
  rep.full_rhs_measure = rep.rhs_measure;
  rep.full_defect = rep.defect;
  return rep;
}

SaturationReport realize_open_type(Evaluator& ev, const TypeSpec& p,
                                   WitnessPolicy policy, bool thin) {
  if (p.cls != TypeClass::Open)
    throw Error("realize_open_type requires an open type");
  const Context& ctx = ev.context();
  const FamilyPtr& fam = ctx.family;
  if (!fam || fam->quantifier_range().empty()) throw Error("empty family");
  const Rational& eps = ctx.eps;
  auto chain = conjunction_chain(p);

  struct RawStage {
    FormulaPtr A;
    WitnessResult w;
  };
  std::vector<RawStage> raw;
  raw.reserve(chain.size());
  for (const auto& A : chain)
    raw.push_back({A, witness_existential(ev, A, p.var, policy)});

  // Subsequence selection: keep an index when conditions 4 and 5 still
  // hold at its renumbered position.
  std::vector<std::size_t> kept(chain.size());
  std::iota(kept.begin(), kept.end(), 0);
  if (thin) {
    kept.clear();
    std::optional<Event> mono;
    std::vector<Rational> mono_ms;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const Event& u = raw[i].w.event;
      Rational loss = mono ? measure(difference(u, *mono)) : Rational(0);
      if (loss > eps) continue;
      Event cand = mono ? meet(*mono, u) : u;
      Rational mc = measure(cand);
      bool ok = true;
      for (std::size_t j = 1; j <= mono_ms.size() && ok; ++j)
        if (mono_ms[j - 1] - mc >= Rational(1, j) + eps) ok = false;
      if (!ok) continue;
      kept.push_back(i);
      mono = cand;
      mono_ms.push_back(mc);
    }
  }

  SaturationReport rep;
  rep.kind = ReportKind::RealizeOpen;
  rep.policy = policy;
  rep.var = p.var;
  rep.eps = eps;
  rep.thinned = thin;
  if (thin)
    for (std::size_t i : kept) rep.kept.push_back(i + 1);

  std::size_t L = fam->level_count();
  std::optional<Event> mono;
  std::vector<Rational> mono_ms;
  std::vector<std::optional<std::size_t>> wlevel;
  std::vector<bool> wexempt;
  for (std::size_t pos = 0; pos < kept.size(); ++pos) {
    const RawStage& rs = raw[kept[pos]];
    ChainStep st;
    st.k = kept[pos] + 1;
    st.chain_formula = rs.A;
    st.witness = rs.w.witness;
    st.witness_in_family = rs.w.in_family;
    st.witness_gap = rs.w.gap;
    st.exists_event = rs.w.target;
    st.raw_event = rs.w.event;
    st.mono_loss = mono ? measure(difference(rs.w.event, *mono)) : Rational(0);
    mono = mono ? meet(*mono, rs.w.event) : rs.w.event;
    st.mono_event = *mono;
    mono_ms.push_back(measure(*mono));
    if (fam->has_filtration())
      st.witness_level = fam->filtration_level(*rs.w.witness);
    wlevel.push_back(st.witness_level);
    // Case-closure would keep a synthesized witness inside the deepest
    // class its ingredients inhabit; a merge of range members is exempt.
    wexempt.push_back(policy == WitnessPolicy::Synthesize && !rs.w.in_family);

    st.cond4 = st.mono_loss <= eps;
    if (!st.cond4) st.failed.push_back("cond4");
    st.cond5 = true;
    for (std::size_t j = 1; j <= pos + 1 && st.cond5; ++j)
      if (mono_ms[j - 1] - mono_ms[pos] >= Rational(1, j) + eps)
        st.cond5 = false;
    if (!st.cond5) st.failed.push_back("cond5");
    if (fam->has_filtration()) {
      std::size_t need = std::min(pos + 1, L);
      for (std::size_t j = 0; j <= pos && st.cond7; ++j) {
        if (wexempt[j]) continue;
        if (!wlevel[j] || *wlevel[j] < need) st.cond7 = false;
      }
      if (!st.cond7) st.failed.push_back("cond7");
    }
    rep.steps.push_back(std::move(st));
  }

  std::size_t s = 0;
  while (s < rep.steps.size() && rep.steps[s].all_pass()) ++s;
  rep.stage = s;
  std::size_t pick = s == 0 ? 1 : s;
  rep.prefix = pick;
  rep.witness = rep.steps[pick - 1].witness;
  rep.witness_in_family = rep.steps[pick - 1].witness_in_family;

  std::optional<Event> flhs, frhs;
  for (std::size_t pos = 0; pos < rep.steps.size(); ++pos) {
    ChainStep& st = rep.steps[pos];
    Event realized =
        ev.truth_value(st.chain_formula, {{p.var, rep.witness}});
    const Event& ex = *st.exists_event;
    flhs = flhs ? meet(*flhs, ex) : ex;
    frhs = frhs ? meet(*frhs, realized) : realized;
    if (pos + 1 == pick) {
      rep.lhs = flhs;
      rep.rhs = frhs;
    }
    rep.profile.push_back({st.k, measure(ex), measure(realized),
                           measure(ex) - measure(realized), st.flags()});
  }
  rep.lhs_measure = measure(*rep.lhs);
  rep.rhs_measure = measure(*rep.rhs);
  rep.defect = rep.lhs_measure - rep.rhs_measure;
  rep.realized_mod_eps = rep.defect <= eps;
  rep.full_lhs = flhs;
  rep.full_rhs = frhs;
  rep.full_lhs_measure = measure(*flhs);
  rep.full_rhs_measure = measure(*frhs);
  rep.full_defect = rep.full_lhs_measure - rep.full_rhs_measure;
  return rep;
}

SaturationReport realize_existential_type(Evaluator& ev, const TypeSpec& p,
                                          WitnessPolicy policy,
                                          unsigned closure_depth,
                                          std::size_t closure_cap, bool thin) {
  if (p.cls != TypeClass::Open && p.cls != TypeClass::Existential)
    throw Error("realize_existential_type requires existential or open members");
  const Context& ctx = ev.context();
  if (!ctx.family || ctx.family->quantifier_range().empty())
    throw Error("empty family");

  std::set<std::string> used{"z"};
  for (const auto& m : p.members) collect_names(m, used);
  std::vector<FormulaPtr> prepared;
  prepared.reserve(p.members.size());
  for (const auto& m : p.members) prepared.push_back(rebind_away(m, "z", used));
  std::vector<FormulaPtr> reduced = pairing_reduce(prepared);
  TypeSpec zp = make_type(reduced);

  FamilyPtr closed = term_closure(
      ctx.family, closure_depth, {Fn::Pair, Fn::Proj1, Fn::Proj2}, closure_cap);
  Context inner_ctx = ctx;
  inner_ctx.family = closed;
  Evaluator inner(inner_ctx);

  SaturationReport rep = realize_open_type(inner, zp, policy, thin);
  rep.kind = ReportKind::RealizeExistential;
  rep.reduced = std::move(reduced);
  rep.z_witness = rep.witness;
  rep.closure_added =
      closed->members().size() - ctx.family->members().size();

  RvPtr xw = apply_term(Term::apply(Fn::Proj1, {Term::var("z")}),
                        {{"z", rep.z_witness}});
  rep.witness = xw;
  rep.witness_in_family = ctx.family->contains_table(*xw);

  auto chain = conjunction_chain(p);
  for (std::size_t k = 1; k <= chain.size(); ++k) {
    Event ex = inner.truth_value(Formula::exists(p.var, chain[k - 1]));
    Event realized = inner.truth_value(chain[k - 1], {{p.var, xw}});
    rep.x_profile.push_back({k, measure(ex), measure(realized),
                             measure(ex) - measure(realized), "ok"});
  }
  return rep;
}

TypeSpec term_type(const FormulaPtr& A, const std::string& x,
                   const std::string& y, unsigned depth) {
  if (!A) throw Error("null formula");
  if (classify_formula(*A) != FormulaClass::Open)
    throw Error("term_type requires an open formula");
  if (x == y || free_variables(*A) != std::set<std::string>{x, y})
    throw Error("term_type requires free variables exactly {" + x + ", " + y +
                "}");

  const Fn binary[] = {Fn::Add, Fn::Mul, Fn::Pair};
  const Fn unary[] = {Fn::Len, Fn::Proj1, Fn::Proj2};
  std::vector<TermPtr> terms{Term::var(x)};
  std::set<std::string> seen{render_term(*terms[0])};
  for (unsigned d = 0; d < depth; ++d) {
    std::vector<TermPtr> base = terms;
    auto emit = [&](TermPtr t) {
      if (seen.insert(render_term(*t)).second) terms.push_back(std::move(t));
    };
    for (Fn f : binary)
      for (const auto& t1 : base)
        for (const auto& t2 : base) emit(Term::apply(f, {t1, t2}));
    for (Fn f : unary)
      for (const auto& t : base) emit(Term::apply(f, {t}));
  }

  std::vector<FormulaPtr> members;
  std::set<std::string> fseen;
  for (const auto& t : terms) {
    FormulaPtr m = substitute_term(A, y, t);
    if (fseen.insert(render_formula(*m)).second) members.push_back(std::move(m));
  }
  return make_type(std::move(members));
}

namespace {

// Largest r with r^k ≤ n.
unsigned iroot(unsigned n, unsigned k) {
  if (k == 1) return n;
  unsigned lo = 1, hi = n;
  while (lo < hi) {
    unsigned mid = lo + (hi - lo + 1) / 2;
    Natural pw = 1;
    bool over = false;
    for (unsigned i = 0; i < k && !over; ++i) {
      pw *= mid;
      if (pw > n) over = true;
    }
    if (over)
      hi = mid - 1;
    else
      lo = mid;
  }
  return lo;
}

}  // namespace

DemoResult build_universal_failure(unsigned n, unsigned levels,
                                   std::size_t samples, std::uint64_t seed,
                                   unsigned horizon, unsigned depth,
                                   unsigned workers) {
  if (n < 16) throw Error("n must be at least 16");
  if (n > 65536) throw Error("n must be at most 65536");
  if (levels < 2) throw Error("levels must be at least 2");
  if (samples < 64) throw Error("samples must be at least 64");
  if (horizon == 0 || depth == 0)
    throw Error("horizon and depth must be positive");

  DemoResult out;
  out.n = n;
  out.levels = levels;
  out.samples = samples;
  out.seed = seed;
  out.horizon = horizon;
  out.depth = depth;

  Scenario& sc = out.scenario;
  sc.space = SampleSpace::sampled(n, samples, seed);
  sc.eps = 0;

  std::vector<unsigned> expo(levels);
  for (unsigned l = 1; l <= levels; ++l) expo[l - 1] = iroot(n, l);
  out.budget_exponents = expo;

  auto declare = [&](const RvPtr& rv) {
    sc.decls.push_back(rv);
    sc.consts[rv->name()] = rv;
    sc.rv_names.insert(rv->name());
  };
  declare(RandomVariable::constant("nlen", sc.space, n));

  std::map<std::vector<Natural>, RvPtr> by_table;
  std::vector<RvPtr> family_members;
  auto try_add = [&](const RvPtr& rv) -> RvPtr {
    auto [it, fresh] = by_table.try_emplace(rv->table_values(), rv);
    if (fresh) {
      declare(rv);
      family_members.push_back(rv);
    }
    return it->second;
  };

  // Constants of every bit length the core budget admits, capped at
  // 16-bit values.
  unsigned core_expo = expo[levels - 1];
  unsigned maxlen = core_expo >= 5 ? 16u : (1u << core_expo);
  try_add(RandomVariable::constant("c0", sc.space, 0));
  for (unsigned d = 1; d <= maxlen; ++d) {
    Natural v = Natural(1) << (d - 1);
    try_add(RandomVariable::constant("c" + v.str(), sc.space, v));
  }
  RvPtr id = try_add(RandomVariable::identity("id", sc.space));
  for (unsigned l = 1; l <= levels; ++l) {
    Natural v = Natural(1) << (expo[l - 1] - 1);
    try_add(RandomVariable::constant("v" + std::to_string(l), sc.space, v));
  }
  // Length witnesses 2^α(ω) − 1, materialized only when every output
  // stays at or below 2^16 bits.
  const Natural out_cap = Natural(1) << 16;
  std::vector<RvPtr> base = family_members;
  for (const RvPtr& m : base) {
    bool feasible = true;
    for (std::size_t i = 0; i < sc.space->size() && feasible; ++i)
      if (m->value(i) > out_cap) feasible = false;
    if (!feasible) continue;
    std::string name = "lenwit_" + m->name();
    if (m->backing() == RandomVariable::Backing::Const) {
      Natural v = (Natural(1) << m->value(0).convert_to<unsigned>()) - 1;
      try_add(RandomVariable::constant(name, sc.space, v));
    } else {
      std::vector<Natural> vals(sc.space->size());
      for (std::size_t i = 0; i < sc.space->size(); ++i)
        vals[i] = (Natural(1) << m->value(i).convert_to<unsigned>()) - 1;
      try_add(RandomVariable::table(name, sc.space, std::move(vals)));
    }
  }

  // Deepest level whose output-length budget 2^expo accommodates the
  // member; the identity stays at level 1.
  std::vector<std::vector<std::string>> level_names(levels);
  for (const RvPtr& m : family_members) {
    std::size_t lvl = 1;
    if (m->backing() != RandomVariable::Backing::Identity) {
      Natural len = m->max_bit_length();
      for (std::size_t l = levels; l >= 1; --l) {
        if (len <= Natural(1) << expo[l - 1]) {
          lvl = l;
          break;
        }
      }
    }
    for (std::size_t l = 1; l <= lvl; ++l)
      level_names[l - 1].push_back(m->name());
  }
  Filtration filt{level_names};
  sc.filtration = filt;
  sc.family_names = level_names[0];
  sc.family = Family::make(sc.space, family_members, filt);

  unsigned kmax = std::max(horizon, depth);
  TermPtr x = Term::var("x");
  TermPtr nlen = Term::rv_const("nlen");
  std::vector<FormulaPtr> members;
  for (unsigned k = 1; k <= kmax; ++k) {
    TermPtr prod = Term::apply(Fn::Len, {x});
    for (unsigned j = 2; j <= k; ++j)
      prod = Term::apply(Fn::Mul, {prod, Term::apply(Fn::Len, {x})});
    FormulaPtr a = Formula::conj(
        Formula::le(prod, nlen),
        Formula::forall("y", Formula::negate(Formula::eq(
                                 Term::apply(Fn::Len, {Term::var("y")}), x))));
    members.push_back(a);
    sc.formulas.emplace_back("A" + std::to_string(k), a);
  }
  out.type = make_type(members);

  Evaluator ev(make_context(sc, workers));
  for (unsigned k = 1; k <= horizon; ++k) {
    Event ex = ev.truth_value(Formula::exists("x", members[k - 1]));
    Rational m = measure(ex);
    Rational run = out.prefix.empty() ? m : std::min(out.prefix.back().lhs_running, m);
    out.prefix.push_back({k, m, run});
  }
  out.lhs_final = out.prefix.back().lhs_running;

  const auto& core = sc.family->quantifier_range();
  out.family_size = sc.family->members().size();
  out.core_size = core.size();
  bool first = true;
  for (const RvPtr& alpha : core) {
    std::optional<Event> meet_ev;
    for (unsigned k = 1; k <= depth; ++k) {
      Event r = ev.truth_value(members[k - 1], {{"x", alpha}});
      meet_ev = meet_ev ? meet(*meet_ev, r) : r;
    }
    Rational m = measure(*meet_ev);
    out.deep_meet.emplace_back(alpha->name(), m);
    if (first || m > out.deep_meet_max) {
      out.deep_meet_max = m;
      out.deep_meet_argmax = alpha->name();
      first = false;
    }
  }

  for (unsigned l = 1; l <= levels; ++l) {
    SqueezeRow row;
    row.level = l;
    row.budget_exponent = expo[l - 1];
    row.value = Natural(1) << (expo[l - 1] - 1);
    row.value_bits = expo[l - 1];
    Event pen = Event::none(sc.space);
    RvPtr full_match, any_match;
    for (const RvPtr& y : sc.family->level_members(l)) {
      Event ey = Event::from_predicate(sc.space, [&](std::size_t i) {
        return bit_length(y->value(i)) == row.value;
      });
      if (!full_match && ey.full()) full_match = y;
      if (!any_match && !ey.empty()) any_match = y;
      pen = join(pen, ey);
    }
    row.penalty = measure(pen);
    const RvPtr& hit = full_match ? full_match : any_match;
    if (hit) {
      row.matched_by = hit->name();
      row.matched_level = sc.family->filtration_level(*hit);
    } else {
      row.note = "no member attains bit length 2^" +
                 std::to_string(expo[l - 1] - 1);
    }
    out.squeeze.push_back(std::move(row));
  }
  return out;
}

}  // namespace kforge
