#pragma once

// Reference semantics used only by tests: direct recursion over the AST
// with its own arithmetic (halving-loop bit length, search-based Cantor
// inverse), sharing nothing with the library beyond the AST types.

#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kforge/logic.hpp"

namespace oracle {

using kforge::Natural;

inline Natural bitlen(Natural v) {
  Natural n = 0;
  while (v > 0) {
    v >>= 1;
    ++n;
  }
  return n;
}

inline Natural pair(const Natural& x, const Natural& y) {
  return (x + y) * (x + y + 1) / 2 + y;
}

// Triangle-row search by doubling plus bisection.
inline std::pair<Natural, Natural> unpair(const Natural& z) {
  auto tri = [](const Natural& w) { return w * (w + 1) / 2; };
  Natural lo = 0, hi = 1;
  while (tri(hi) <= z) hi *= 2;
  while (lo + 1 < hi) {
    Natural mid = (lo + hi) / 2;
    if (tri(mid) <= z)
      lo = mid;
    else
      hi = mid;
  }
  Natural y = z - tri(lo);
  return {lo - y, y};
}

struct Tables {
  // quantifier range value tables, declaration order
  std::vector<std::vector<Natural>> family;
  std::map<std::string, std::vector<Natural>> consts;
};

struct Assign {
  std::map<std::string, Natural> vars;
  const Tables* tables = nullptr;
  std::size_t index = 0;
};

inline Natural eval_term(const kforge::Term& t, const Assign& a) {
  using K = kforge::Term::Kind;
  switch (t.kind) {
    case K::Var:
      return a.vars.at(t.name);
    case K::Literal:
      return t.value;
    case K::RvConst:
      return a.tables->consts.at(t.name)[a.index];
    case K::Apply:
      break;
  }
  std::vector<Natural> args;
  args.reserve(t.args.size());
  for (const auto& s : t.args) args.push_back(eval_term(*s, a));
  switch (t.fn) {
    case kforge::Fn::Add:
      return args[0] + args[1];
    case kforge::Fn::Mul:
      return args[0] * args[1];
    case kforge::Fn::Pair:
      return pair(args[0], args[1]);
    case kforge::Fn::Len:
      return bitlen(args[0]);
    case kforge::Fn::Proj1:
      return unpair(args[0]).first;
    case kforge::Fn::Proj2:
      return unpair(args[0]).second;
  }
  throw std::logic_error("bad term");
}

inline bool holds(const kforge::Formula& f, Assign& a) {
  using K = kforge::Formula::Kind;
  switch (f.kind) {
    case K::Eq:
      return eval_term(*f.lhs, a) == eval_term(*f.rhs, a);
    case K::Le:
      return eval_term(*f.lhs, a) <= eval_term(*f.rhs, a);
    case K::Not:
      return !holds(*f.a, a);
    case K::And:
      return holds(*f.a, a) && holds(*f.b, a);
    case K::Or:
      return holds(*f.a, a) || holds(*f.b, a);
    case K::Implies:
      return !holds(*f.a, a) || holds(*f.b, a);
    case K::Exists:
    case K::Forall: {
      bool ex = (f.kind == K::Exists);
      bool saved_present = a.vars.count(f.var) > 0;
      Natural saved = saved_present ? a.vars[f.var] : Natural(0);
      bool acc = !ex;
      for (const auto& table : a.tables->family) {
        a.vars[f.var] = table[a.index];
        bool h = holds(*f.a, a);
        if (ex)
          acc = acc || h;
        else
          acc = acc && h;
      }
      if (saved_present)
        a.vars[f.var] = saved;
      else
        a.vars.erase(f.var);
      return acc;
    }
  }
  throw std::logic_error("bad formula");
}

inline std::vector<bool> event_of(const kforge::Formula& f, std::size_t n,
                                  const Tables& tables,
                                  const std::map<std::string, Natural>& free = {}) {
  std::vector<bool> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Assign a{free, &tables, i};
    out[i] = holds(f, a);
  }
  return out;
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }
  bool coin(double p = 0.5) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
  }
  Natural value(unsigned bits) {
    std::uniform_int_distribution<unsigned long long> d(
        0, (1ULL << bits) - 1);
    return Natural(d(rng));
  }
};

inline kforge::TermPtr gen_term(Gen& g, unsigned depth,
                                const std::vector<std::string>& vars,
                                const std::vector<std::string>& consts) {
  using kforge::Term;
  if (depth == 0 || g.coin(0.35)) {
    std::size_t options = 1 + (vars.empty() ? 0 : 1) + (consts.empty() ? 0 : 1);
    std::size_t c = g.pick(options);
    if (!vars.empty() && c == 0) return Term::var(vars[g.pick(vars.size())]);
    if (!consts.empty() && c + (vars.empty() ? 1 : 0) == 1)
      return Term::rv_const(consts[g.pick(consts.size())]);
    return Term::literal(Natural(g.pick(4)));
  }
  static const kforge::Fn fns[] = {kforge::Fn::Add,  kforge::Fn::Mul,
                                   kforge::Fn::Pair, kforge::Fn::Len,
                                   kforge::Fn::Proj1, kforge::Fn::Proj2};
  kforge::Fn f = fns[g.pick(6)];
  std::vector<kforge::TermPtr> args;
  for (std::size_t i = 0; i < kforge::fn_arity(f); ++i)
    args.push_back(gen_term(g, depth - 1, vars, consts));
  return Term::apply(f, std::move(args));
}

inline kforge::FormulaPtr gen_open(Gen& g, unsigned depth,
                                   const std::vector<std::string>& vars,
                                   const std::vector<std::string>& consts) {
  using kforge::Formula;
  if (depth == 0 || g.coin(0.4)) {
    auto l = gen_term(g, 2, vars, consts);
    auto r = gen_term(g, 2, vars, consts);
    auto atom = g.coin() ? Formula::eq(l, r) : Formula::le(l, r);
    return g.coin(0.25) ? Formula::negate(atom) : atom;
  }
  switch (g.pick(4)) {
    case 0:
      return Formula::negate(gen_open(g, depth - 1, vars, consts));
    case 1:
      return Formula::conj(gen_open(g, depth - 1, vars, consts),
                           gen_open(g, depth - 1, vars, consts));
    case 2:
      return Formula::disj(gen_open(g, depth - 1, vars, consts),
                           gen_open(g, depth - 1, vars, consts));
    default:
      return Formula::implies(gen_open(g, depth - 1, vars, consts),
                              gen_open(g, depth - 1, vars, consts));
  }
}

// Closed formula with at most `quants` quantifier blocks above an open core.
inline kforge::FormulaPtr gen_closed(Gen& g, unsigned quants,
                                     const std::vector<std::string>& consts) {
  using kforge::Formula;
  std::vector<std::string> scope;
  unsigned q = 0;
  for (; q < quants; ++q) {
    if (q > 0 && g.coin(0.3)) break;
    scope.push_back("q" + std::to_string(q));
  }
  kforge::FormulaPtr f = gen_open(g, 2, scope, consts);
  for (std::size_t i = scope.size(); i > 0; --i) {
    const std::string& v = scope[i - 1];
    f = g.coin() ? Formula::exists(v, f) : Formula::forall(v, f);
  }
  return f;
}

}  // namespace oracle
