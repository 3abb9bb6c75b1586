#include "kforge/logic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace kforge {

std::size_t fn_arity(Fn f) {
  switch (f) {
    case Fn::Add:
    case Fn::Mul:
    case Fn::Pair:
      return 2;
    case Fn::Len:
    case Fn::Proj1:
    case Fn::Proj2:
      return 1;
  }
  return 0;
}

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Add: return "+";
    case Fn::Mul: return "*";
    case Fn::Pair: return "pair";
    case Fn::Len: return "len";
    case Fn::Proj1: return "p1";
    case Fn::Proj2: return "p2";
  }
  return "?";
}

std::optional<Fn> fn_by_name(const std::string& name) {
  if (name == "len") return Fn::Len;
  if (name == "p1") return Fn::Proj1;
  if (name == "p2") return Fn::Proj2;
  if (name == "pair") return Fn::Pair;
  return std::nullopt;
}

TermPtr Term::var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->name = std::move(name);
  return t;
}

TermPtr Term::literal(Natural v) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Literal;
  t->value = std::move(v);
  return t;
}

TermPtr Term::rv_const(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::RvConst;
  t->name = std::move(name);
  return t;
}

TermPtr Term::apply(Fn f, std::vector<TermPtr> args) {
  if (args.size() != fn_arity(f))
    throw Error(std::string("arity mismatch for ") + fn_name(f));
  auto t = std::make_shared<Term>();
  t->kind = Kind::Apply;
  t->fn = f;
  t->args = std::move(args);
  return t;
}

FormulaPtr Formula::eq(TermPtr l, TermPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Eq;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

FormulaPtr Formula::le(TermPtr l, TermPtr r) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Le;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

FormulaPtr Formula::negate(FormulaPtr x) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::Not;
  f->a = std::move(x);
  return f;
}

static FormulaPtr binary(Formula::Kind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->a = std::move(a);
  f->b = std::move(b);
  return f;
}

FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
  return binary(Kind::And, std::move(a), std::move(b));
}
FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) {
  return binary(Kind::Or, std::move(a), std::move(b));
}
FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
  return binary(Kind::Implies, std::move(a), std::move(b));
}

static FormulaPtr quantified(Formula::Kind k, std::string var, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->var = std::move(var);
  f->a = std::move(body);
  return f;
}

FormulaPtr Formula::exists(std::string var, FormulaPtr body) {
  return quantified(Kind::Exists, std::move(var), std::move(body));
}
FormulaPtr Formula::forall(std::string var, FormulaPtr body) {
  return quantified(Kind::Forall, std::move(var), std::move(body));
}

bool structural_equal(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Var:
    case Term::Kind::RvConst:
      return a.name == b.name;
    case Term::Kind::Literal:
      return a.value == b.value;
    case Term::Kind::Apply:
      if (a.fn != b.fn || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structural_equal(*a.args[i], *b.args[i])) return false;
      return true;
  }
  return false;
}

bool structural_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Le:
      return structural_equal(*a.lhs, *b.lhs) && structural_equal(*a.rhs, *b.rhs);
    case Formula::Kind::Not:
      return structural_equal(*a.a, *b.a);
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return structural_equal(*a.a, *b.a) && structural_equal(*a.b, *b.b);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return a.var == b.var && structural_equal(*a.a, *b.a);
  }
  return false;
}

static void hash_mix(std::size_t& h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
}

std::size_t structural_hash(const Term& t) {
  std::size_t h = static_cast<std::size_t>(t.kind) * 31 + 7;
  switch (t.kind) {
    case Term::Kind::Var:
    case Term::Kind::RvConst:
      hash_mix(h, std::hash<std::string>{}(t.name));
      break;
    case Term::Kind::Literal:
      hash_mix(h, std::hash<std::string>{}(t.value.str()));
      break;
    case Term::Kind::Apply:
      hash_mix(h, static_cast<std::size_t>(t.fn));
      for (const auto& a : t.args) hash_mix(h, structural_hash(*a));
      break;
  }
  return h;
}

std::size_t structural_hash(const Formula& f) {
  std::size_t h = static_cast<std::size_t>(f.kind) * 131 + 13;
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Le:
      hash_mix(h, structural_hash(*f.lhs));
      hash_mix(h, structural_hash(*f.rhs));
      break;
    case Formula::Kind::Not:
      hash_mix(h, structural_hash(*f.a));
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      hash_mix(h, structural_hash(*f.a));
      hash_mix(h, structural_hash(*f.b));
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      hash_mix(h, std::hash<std::string>{}(f.var));
      hash_mix(h, structural_hash(*f.a));
      break;
  }
  return h;
}

std::set<std::string> free_variables(const Term& t) {
  std::set<std::string> out;
  switch (t.kind) {
    case Term::Kind::Var:
      out.insert(t.name);
      break;
    case Term::Kind::Apply:
      for (const auto& a : t.args)
        for (auto& v : free_variables(*a)) out.insert(v);
      break;
    default:
      break;
  }
  return out;
}

static void collect_free(const Formula& f, std::set<std::string>& bound,
                         std::set<std::string>& out) {
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Le:
      for (auto& v : free_variables(*f.lhs))
        if (!bound.count(v)) out.insert(v);
      for (auto& v : free_variables(*f.rhs))
        if (!bound.count(v)) out.insert(v);
      break;
    case Formula::Kind::Not:
      collect_free(*f.a, bound, out);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      collect_free(*f.a, bound, out);
      collect_free(*f.b, bound, out);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      bool inserted = bound.insert(f.var).second;
      collect_free(*f.a, bound, out);
      if (inserted) bound.erase(f.var);
      break;
    }
  }
}

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

static void collect_rv_consts(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::RvConst) out.insert(t.name);
  for (const auto& a : t.args) collect_rv_consts(*a, out);
}

static void collect_rv_consts(const Formula& f, std::set<std::string>& out) {
  if (f.lhs) collect_rv_consts(*f.lhs, out);
  if (f.rhs) collect_rv_consts(*f.rhs, out);
  if (f.a) collect_rv_consts(*f.a, out);
  if (f.b) collect_rv_consts(*f.b, out);
}

std::set<std::string> rv_constants(const Formula& f) {
  std::set<std::string> out;
  collect_rv_consts(f, out);
  return out;
}

const char* formula_class_name(FormulaClass c) {
  switch (c) {
    case FormulaClass::Open: return "open";
    case FormulaClass::Existential: return "existential";
    case FormulaClass::Universal: return "universal";
    case FormulaClass::ExistsForallPrefix: return "exists-forall-prefix";
    case FormulaClass::General: return "general";
  }
  return "?";
}

static bool has_quantifier(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return true;
    case Formula::Kind::Eq:
    case Formula::Kind::Le:
      return false;
    case Formula::Kind::Not:
      return has_quantifier(*f.a);
    default:
      return has_quantifier(*f.a) || has_quantifier(*f.b);
  }
}

FormulaClass classify_formula(const Formula& f) {
  std::vector<Formula::Kind> prefix;
  const Formula* cur = &f;
  while (cur->kind == Formula::Kind::Exists || cur->kind == Formula::Kind::Forall) {
    prefix.push_back(cur->kind);
    cur = cur->a.get();
  }
  if (has_quantifier(*cur)) return FormulaClass::General;
  if (prefix.empty()) return FormulaClass::Open;
  bool all_e = true, all_a = true;
  for (auto k : prefix) {
    all_e &= (k == Formula::Kind::Exists);
    all_a &= (k == Formula::Kind::Forall);
  }
  if (all_e) return FormulaClass::Existential;
  if (all_a) return FormulaClass::Universal;
  if (prefix.size() % 2 == 0) {
    bool alt = true;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      auto want = (i % 2 == 0) ? Formula::Kind::Exists : Formula::Kind::Forall;
      alt &= (prefix[i] == want);
    }
    if (alt) return FormulaClass::ExistsForallPrefix;
  }
  return FormulaClass::General;
}

// ---------------------------------------------------------------------
// Tokenizer / parser

namespace {

enum class Tok {
  LParen, RParen, Comma, Ident, Number,
  Eq, Ne, Le, Lt, Amp, Pipe, Arrow, Bang, Plus, Star, End
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line, col;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string t, std::size_t c) {
    out.push_back({k, std::move(t), line, c});
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    std::size_t start_col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      push(Tok::Ident, s.substr(i, j - i), start_col);
      col += j - i;
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      push(Tok::Number, s.substr(i, j - i), start_col);
      col += j - i;
      i = j;
      continue;
    }
    auto two = (i + 1 < s.size()) ? s.substr(i, 2) : std::string();
    if (two == "->") { push(Tok::Arrow, two, start_col); i += 2; col += 2; continue; }
    if (two == "!=") { push(Tok::Ne, two, start_col); i += 2; col += 2; continue; }
    if (two == "<=") { push(Tok::Le, two, start_col); i += 2; col += 2; continue; }
    switch (c) {
      case '(': push(Tok::LParen, "(", start_col); break;
      case ')': push(Tok::RParen, ")", start_col); break;
      case ',': push(Tok::Comma, ",", start_col); break;
      case '=': push(Tok::Eq, "=", start_col); break;
      case '<': push(Tok::Lt, "<", start_col); break;
      case '&': push(Tok::Amp, "&", start_col); break;
      case '|': push(Tok::Pipe, "|", start_col); break;
      case '!': push(Tok::Bang, "!", start_col); break;
      case '+': push(Tok::Plus, "+", start_col); break;
      case '*': push(Tok::Star, "*", start_col); break;
      default:
        throw ParseError(line, start_col, std::string("unexpected character '") + c + "'");
    }
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::set<std::string>* declared)
      : toks_(std::move(toks)), declared_(declared) {}

  FormulaPtr formula_all() {
    auto f = parse_formula();
    expect(Tok::End, "end of input");
    return f;
  }

  TermPtr term_all() {
    auto t = parse_sum();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  std::vector<Token> toks_;
  const std::set<std::string>* declared_;
  std::size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k = 1) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(cur().line, cur().col, msg);
  }
  void expect(Tok k, const char* what) {
    if (cur().kind != k) fail(std::string("expected ") + what);
    ++pos_;
  }
  bool accept(Tok k) {
    if (cur().kind != k) return false;
    ++pos_;
    return true;
  }

  bool at_quantifier() const {
    return cur().kind == Tok::LParen && peek().kind == Tok::Ident &&
           (peek().text == "exists" || peek().text == "forall");
  }

  FormulaPtr parse_formula() { return parse_implies(); }

  FormulaPtr parse_implies() {
    auto l = parse_disj();
    if (accept(Tok::Arrow)) return Formula::implies(std::move(l), parse_implies());
    return l;
  }

  FormulaPtr parse_disj() {
    auto l = parse_conj();
    while (accept(Tok::Pipe)) l = Formula::disj(std::move(l), parse_conj());
    return l;
  }

  FormulaPtr parse_conj() {
    auto l = parse_unary();
    while (accept(Tok::Amp)) l = Formula::conj(std::move(l), parse_unary());
    return l;
  }

  FormulaPtr parse_unary() {
    if (accept(Tok::Bang)) return Formula::negate(parse_unary());
    return parse_primary();
  }

  FormulaPtr parse_quantifier() {
    expect(Tok::LParen, "'('");
    std::string kw = cur().text;
    ++pos_;  // keyword checked by at_quantifier
    if (cur().kind != Tok::Ident) fail("expected variable name");
    std::string var = cur().text;
    if (fn_by_name(var) || var == "exists" || var == "forall")
      fail("'" + var + "' cannot be used as a variable");
    ++pos_;
    expect(Tok::RParen, "')'");
    FormulaPtr body;
    if (at_quantifier()) {
      body = parse_quantifier();
    } else {
      expect(Tok::LParen, "'(' before quantifier body");
      body = parse_formula();
      expect(Tok::RParen, "')' after quantifier body");
    }
    return kw == "exists" ? Formula::exists(var, std::move(body))
                          : Formula::forall(var, std::move(body));
  }

  FormulaPtr parse_primary() {
    if (at_quantifier()) return parse_quantifier();
    // Could be an atom (term rel term) or a parenthesized formula; try the
    // atom first and fall back, keeping the error from whichever attempt
    // got further.
    std::size_t save = pos_;
    try {
      return parse_atom();
    } catch (const ParseError& atom_err) {
      std::size_t atom_pos = pos_;
      pos_ = save;
      if (cur().kind != Tok::LParen) throw;
      try {
        ++pos_;
        auto f = parse_formula();
        expect(Tok::RParen, "')'");
        return f;
      } catch (const ParseError&) {
        if (atom_pos > pos_) throw atom_err;
        throw;
      }
    }
  }

  FormulaPtr parse_atom() {
    auto l = parse_sum();
    switch (cur().kind) {
      case Tok::Eq:
        ++pos_;
        return Formula::eq(std::move(l), parse_sum());
      case Tok::Ne:
        ++pos_;
        return Formula::negate(Formula::eq(std::move(l), parse_sum()));
      case Tok::Le:
        ++pos_;
        return Formula::le(std::move(l), parse_sum());
      case Tok::Lt: {
        ++pos_;
        auto r = parse_sum();
        // a < b is sugar for !(b <= a)
        return Formula::negate(Formula::le(std::move(r), std::move(l)));
      }
      default:
        fail("expected relation (=, !=, <=, <)");
    }
  }

  TermPtr parse_sum() {
    auto l = parse_product();
    while (accept(Tok::Plus)) l = Term::apply(Fn::Add, {std::move(l), parse_product()});
    return l;
  }

  TermPtr parse_product() {
    auto l = parse_factor();
    while (accept(Tok::Star)) l = Term::apply(Fn::Mul, {std::move(l), parse_factor()});
    return l;
  }

  TermPtr parse_factor() {
    if (cur().kind == Tok::Number) {
      Natural v(cur().text);
      ++pos_;
      return Term::literal(std::move(v));
    }
    if (cur().kind == Tok::Ident) {
      std::string name = cur().text;
      if (name == "exists" || name == "forall")
        fail("quantifier keyword in term position");
      if (peek().kind == Tok::LParen) {
        auto fn = fn_by_name(name);
        if (!fn) fail("unknown function symbol '" + name + "'");
        ++pos_;
        ++pos_;  // '('
        std::vector<TermPtr> args;
        args.push_back(parse_sum());
        while (accept(Tok::Comma)) args.push_back(parse_sum());
        expect(Tok::RParen, "')'");
        if (args.size() != fn_arity(*fn))
          fail(std::string("arity mismatch for ") + name);
        return Term::apply(*fn, std::move(args));
      }
      ++pos_;
      if (declared_ && declared_->count(name)) return Term::rv_const(name);
      return Term::var(name);
    }
    if (accept(Tok::LParen)) {
      auto t = parse_sum();
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("expected term");
  }
};

// Replaces occurrences of variable `from` (bound by an enclosing
// quantifier) by `to`, stopping at nested re-binders of `from`.
TermPtr replace_var_term(const TermPtr& t, const std::string& from, const std::string& to) {
  switch (t->kind) {
    case Term::Kind::Var:
      return t->name == from ? Term::var(to) : t;
    case Term::Kind::Apply: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = replace_var_term(a, from, to);
        changed |= (na != a);
        args.push_back(std::move(na));
      }
      return changed ? Term::apply(t->fn, std::move(args)) : t;
    }
    default:
      return t;
  }
}

FormulaPtr replace_var(const FormulaPtr& f, const std::string& from, const std::string& to) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return Formula::eq(replace_var_term(f->lhs, from, to),
                         replace_var_term(f->rhs, from, to));
    case Formula::Kind::Le:
      return Formula::le(replace_var_term(f->lhs, from, to),
                         replace_var_term(f->rhs, from, to));
    case Formula::Kind::Not:
      return Formula::negate(replace_var(f->a, from, to));
    case Formula::Kind::And:
      return Formula::conj(replace_var(f->a, from, to), replace_var(f->b, from, to));
    case Formula::Kind::Or:
      return Formula::disj(replace_var(f->a, from, to), replace_var(f->b, from, to));
    case Formula::Kind::Implies:
      return Formula::implies(replace_var(f->a, from, to), replace_var(f->b, from, to));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (f->var == from) return f;  // inner binder owns these occurrences
      return quantified(f->kind, f->var, replace_var(f->a, from, to));
  }
  return f;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  for (int k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (!used.count(cand)) return cand;
  }
}

// Renames bound variables so that no two binders share a name and no
// bound name collides with a free variable.
FormulaPtr rename_apart(const FormulaPtr& f, std::set<std::string>& used) {
  switch (f->kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Le:
      return f;
    case Formula::Kind::Not:
      return Formula::negate(rename_apart(f->a, used));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      auto a = rename_apart(f->a, used);
      auto b = rename_apart(f->b, used);
      return binary(f->kind, std::move(a), std::move(b));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::string name = f->var;
      FormulaPtr body = f->a;
      if (used.count(name)) {
        std::string nn = fresh_name(name, used);
        body = replace_var(body, name, nn);
        name = nn;
      }
      used.insert(name);
      return quantified(f->kind, name, rename_apart(body, used));
    }
  }
  return f;
}

}  // namespace

FormulaPtr parse_formula(const std::string& text, const std::set<std::string>* declared) {
  Parser p(tokenize(text), declared);
  auto f = p.formula_all();
  auto used = free_variables(*f);
  return rename_apart(f, used);
}

TermPtr parse_term(const std::string& text, const std::set<std::string>* declared) {
  Parser p(tokenize(text), declared);
  return p.term_all();
}

// ---------------------------------------------------------------------
// Printer

namespace {

std::string render_term_prec(const Term& t, int ctx) {
  switch (t.kind) {
    case Term::Kind::Var:
    case Term::Kind::RvConst:
      return t.name;
    case Term::Kind::Literal:
      return t.value.str();
    case Term::Kind::Apply: {
      if (t.fn == Fn::Add || t.fn == Fn::Mul) {
        int prec = (t.fn == Fn::Add) ? 1 : 2;
        std::string s = render_term_prec(*t.args[0], prec) +
                        (t.fn == Fn::Add ? " + " : " * ") +
                        render_term_prec(*t.args[1], prec + 1);
        return prec < ctx ? "(" + s + ")" : s;
      }
      std::string s = std::string(fn_name(t.fn)) + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ", ";
        s += render_term_prec(*t.args[i], 0);
      }
      return s + ")";
    }
  }
  return "?";
}

// ctx: 0 top level / inside delimiters, 1 implies-left, ... atoms are
// parenthesized whenever they sit directly under a connective.
std::string render_prec(const Formula& f, int ctx) {
  switch (f.kind) {
    case Formula::Kind::Eq:
    case Formula::Kind::Le: {
      std::string s = render_term_prec(*f.lhs, 0) +
                      (f.kind == Formula::Kind::Eq ? " = " : " <= ") +
                      render_term_prec(*f.rhs, 0);
      return ctx > 0 ? "(" + s + ")" : s;
    }
    case Formula::Kind::Not: {
      if (f.a->kind == Formula::Kind::Eq) {  // != sugar
        std::string s = render_term_prec(*f.a->lhs, 0) + " != " +
                        render_term_prec(*f.a->rhs, 0);
        return ctx > 0 ? "(" + s + ")" : s;
      }
      return "!(" + render_prec(*f.a, 0) + ")";
    }
    case Formula::Kind::And: {
      std::string s = render_prec(*f.a, 3) + " & " + render_prec(*f.b, 4);
      return 3 < ctx ? "(" + s + ")" : s;
    }
    case Formula::Kind::Or: {
      std::string s = render_prec(*f.a, 2) + " | " + render_prec(*f.b, 3);
      return 2 < ctx ? "(" + s + ")" : s;
    }
    case Formula::Kind::Implies: {
      std::string s = render_prec(*f.a, 2) + " -> " + render_prec(*f.b, 1);
      return 1 < ctx ? "(" + s + ")" : s;
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::string head = (f.kind == Formula::Kind::Exists ? "(exists " : "(forall ") +
                         f.var + ")";
      const Formula& body = *f.a;
      if (body.kind == Formula::Kind::Exists || body.kind == Formula::Kind::Forall)
        return head + render_prec(body, 0);
      return head + "(" + render_prec(body, 0) + ")";
    }
  }
  return "?";
}

}  // namespace

std::string render_term(const Term& t) { return render_term_prec(t, 0); }
std::string render_formula(const Formula& f) { return render_prec(f, 0); }

// ---------------------------------------------------------------------
// Substitution

namespace {

TermPtr subst_term(const TermPtr& t, const std::string& var, const std::string& rv,
                   std::size_t& count) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (t->name == var) {
        ++count;
        return Term::rv_const(rv);
      }
      return t;
    case Term::Kind::Apply: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(subst_term(a, var, rv, count));
      return Term::apply(t->fn, std::move(args));
    }
    default:
      return t;
  }
}

FormulaPtr subst_formula(const FormulaPtr& f, const std::string& var,
                         const std::string& rv, std::size_t& count) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return Formula::eq(subst_term(f->lhs, var, rv, count),
                         subst_term(f->rhs, var, rv, count));
    case Formula::Kind::Le:
      return Formula::le(subst_term(f->lhs, var, rv, count),
                         subst_term(f->rhs, var, rv, count));
    case Formula::Kind::Not:
      return Formula::negate(subst_formula(f->a, var, rv, count));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      auto a = subst_formula(f->a, var, rv, count);
      auto b = subst_formula(f->b, var, rv, count);
      return binary(f->kind, std::move(a), std::move(b));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (f->var == var) return f;
      return quantified(f->kind, f->var, subst_formula(f->a, var, rv, count));
  }
  return f;
}

void collect_all_names(const Formula& f, std::set<std::string>& out) {
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall)
    out.insert(f.var);
  if (f.lhs)
    for (auto& v : free_variables(*f.lhs)) out.insert(v);
  if (f.rhs)
    for (auto& v : free_variables(*f.rhs)) out.insert(v);
  if (f.a) collect_all_names(*f.a, out);
  if (f.b) collect_all_names(*f.b, out);
}

FormulaPtr rename_free_rec(const FormulaPtr& f, const std::string& from,
                           const std::string& to, std::set<std::string>& used) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return Formula::eq(replace_var_term(f->lhs, from, to),
                         replace_var_term(f->rhs, from, to));
    case Formula::Kind::Le:
      return Formula::le(replace_var_term(f->lhs, from, to),
                         replace_var_term(f->rhs, from, to));
    case Formula::Kind::Not:
      return Formula::negate(rename_free_rec(f->a, from, to, used));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      auto a = rename_free_rec(f->a, from, to, used);
      auto b = rename_free_rec(f->b, from, to, used);
      return binary(f->kind, std::move(a), std::move(b));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      if (f->var == from) return f;  // `from` is not free below
      if (f->var == to) {
        // Would capture; rename this binder apart first.
        std::string nn = fresh_name(f->var, used);
        used.insert(nn);
        auto body = replace_var(f->a, f->var, nn);
        return quantified(f->kind, nn, rename_free_rec(body, from, to, used));
      }
      return quantified(f->kind, f->var, rename_free_rec(f->a, from, to, used));
    }
  }
  return f;
}

}  // namespace

SubstResult substitute_const(const FormulaPtr& f, const std::string& var,
                             const std::string& rv_name) {
  std::size_t count = 0;
  auto out = subst_formula(f, var, rv_name, count);
  return {count ? out : f, count};
}

namespace {

TermPtr subst_term_in_term(const TermPtr& t, const std::string& var, const TermPtr& repl) {
  switch (t->kind) {
    case Term::Kind::Var:
      return t->name == var ? repl : t;
    case Term::Kind::Apply: {
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(subst_term_in_term(a, var, repl));
      return Term::apply(t->fn, std::move(args));
    }
    default:
      return t;
  }
}

FormulaPtr subst_term_rec(const FormulaPtr& f, const std::string& var,
                          const TermPtr& repl, const std::set<std::string>& repl_vars) {
  switch (f->kind) {
    case Formula::Kind::Eq:
      return Formula::eq(subst_term_in_term(f->lhs, var, repl),
                         subst_term_in_term(f->rhs, var, repl));
    case Formula::Kind::Le:
      return Formula::le(subst_term_in_term(f->lhs, var, repl),
                         subst_term_in_term(f->rhs, var, repl));
    case Formula::Kind::Not:
      return Formula::negate(subst_term_rec(f->a, var, repl, repl_vars));
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      auto a = subst_term_rec(f->a, var, repl, repl_vars);
      auto b = subst_term_rec(f->b, var, repl, repl_vars);
      return binary(f->kind, std::move(a), std::move(b));
    }
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      if (f->var == var) return f;
      if (repl_vars.count(f->var))
        throw Error("substitution would capture variable '" + f->var + "'");
      return quantified(f->kind, f->var, subst_term_rec(f->a, var, repl, repl_vars));
  }
  return f;
}

}  // namespace

FormulaPtr substitute_term(const FormulaPtr& f, const std::string& var,
                           const TermPtr& t) {
  return subst_term_rec(f, var, t, free_variables(*t));
}

FormulaPtr rename_free(const FormulaPtr& f, const std::string& from,
                       const std::string& to) {
  if (from == to) return f;
  std::set<std::string> used;
  collect_all_names(*f, used);
  used.insert(to);
  return rename_free_rec(f, from, to, used);
}

// ---------------------------------------------------------------------
// Interpretation

Natural eval_function(Fn f, const std::vector<Natural>& args) {
  if (args.size() != fn_arity(f))
    throw Error(std::string("arity mismatch for ") + fn_name(f));
  switch (f) {
    case Fn::Add: return args[0] + args[1];
    case Fn::Mul: return args[0] * args[1];
    case Fn::Pair: return cantor_pair(args[0], args[1]);
    case Fn::Len: return bit_length(args[0]);
    case Fn::Proj1: return cantor_unpair(args[0]).first;
    case Fn::Proj2: return cantor_unpair(args[0]).second;
  }
  throw Error("unknown function symbol");
}

Natural eval_term(const Term& t, const Valuation& v) {
  switch (t.kind) {
    case Term::Kind::Var:
      return v.var(t.name);
    case Term::Kind::Literal:
      return t.value;
    case Term::Kind::RvConst:
      return v.rv_const(t.name);
    case Term::Kind::Apply: {
      std::vector<Natural> args;
      args.reserve(t.args.size());
      for (const auto& a : t.args) args.push_back(eval_term(*a, v));
      return eval_function(t.fn, args);
    }
  }
  throw Error("malformed term");
}

bool eval_open(const Formula& f, const Valuation& v) {
  switch (f.kind) {
    case Formula::Kind::Eq:
      return eval_term(*f.lhs, v) == eval_term(*f.rhs, v);
    case Formula::Kind::Le:
      return eval_term(*f.lhs, v) <= eval_term(*f.rhs, v);
    case Formula::Kind::Not:
      return !eval_open(*f.a, v);
    case Formula::Kind::And:
      return eval_open(*f.a, v) && eval_open(*f.b, v);
    case Formula::Kind::Or:
      return eval_open(*f.a, v) || eval_open(*f.b, v);
    case Formula::Kind::Implies:
      return !eval_open(*f.a, v) || eval_open(*f.b, v);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      throw Error("eval_open: formula is not quantifier-free");
  }
  throw Error("malformed formula");
}

}  // namespace kforge
