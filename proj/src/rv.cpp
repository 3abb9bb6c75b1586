#include "kforge/rv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace kforge {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

int parse_operand(const std::string& tok, unsigned inputs, std::size_t gates_so_far,
                  std::size_t lineno) {
  auto bad = [&](const std::string& why) -> int {
    throw ParseError(lineno, 1, "operand '" + tok + "': " + why);
  };
  if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'g'))
    return bad("expected x<k> or g<j>");
  std::size_t idx;
  try {
    idx = std::stoul(tok.substr(1));
  } catch (...) {
    return bad("expected x<k> or g<j>");
  }
  if (tok[0] == 'x') {
    if (idx >= inputs) return bad("input index out of range");
    return static_cast<int>(idx);
  }
  if (idx >= gates_so_far) return bad("gate reference must precede its use");
  return static_cast<int>(inputs + idx);
}

}  // namespace

Circuit parse_circuit(const std::string& text) {
  Circuit c;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false, have_out = false;
  unsigned declared_outputs = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (!have_header) {
      if (toks.size() != 4 || toks[0] != "inputs" || toks[2] != "outputs")
        throw ParseError(lineno, 1, "expected 'inputs <n> outputs <m>'");
      try {
        c.inputs = std::stoul(toks[1]);
        declared_outputs = std::stoul(toks[3]);
      } catch (...) {
        throw ParseError(lineno, 1, "bad count in circuit header");
      }
      if (c.inputs == 0) throw ParseError(lineno, 1, "circuit needs inputs >= 1");
      have_header = true;
      continue;
    }
    if (have_out)
      throw ParseError(lineno, 1, "content after 'out' line");
    if (toks[0] == "out") {
      if (toks.size() < 3 || toks[1] != "=")
        throw ParseError(lineno, 1, "expected 'out = <operand list>'");
      for (std::size_t i = 2; i < toks.size(); ++i)
        c.outputs.push_back(parse_operand(toks[i], c.inputs, c.gates.size(), lineno));
      if (c.outputs.size() != declared_outputs)
        throw ParseError(lineno, 1, "output count does not match header");
      have_out = true;
      continue;
    }
    // gate line: g<i> = <OP> <operand> [<operand>]
    if (toks.size() < 3 || toks[1] != "=")
      throw ParseError(lineno, 1, "expected 'g<i> = <OP> ...'");
    std::string expect = "g" + std::to_string(c.gates.size());
    if (toks[0] != expect)
      throw ParseError(lineno, 1, "expected gate '" + expect + "', got '" + toks[0] + "'");
    Circuit::Gate g;
    const std::string& op = toks[2];
    std::size_t want;
    if (op == "AND") { g.op = Circuit::Op::And; want = 2; }
    else if (op == "OR") { g.op = Circuit::Op::Or; want = 2; }
    else if (op == "XOR") { g.op = Circuit::Op::Xor; want = 2; }
    else if (op == "NOT") { g.op = Circuit::Op::Not; want = 1; }
    else if (op == "CONST0") { g.op = Circuit::Op::Const0; want = 0; }
    else if (op == "CONST1") { g.op = Circuit::Op::Const1; want = 0; }
    else throw ParseError(lineno, 1, "unknown gate op '" + op + "'");
    if (toks.size() != 3 + want)
      throw ParseError(lineno, 1, "op " + op + " takes " + std::to_string(want) +
                                      " operand(s)");
    if (want >= 1) g.a = parse_operand(toks[3], c.inputs, c.gates.size(), lineno);
    if (want >= 2) g.b = parse_operand(toks[4], c.inputs, c.gates.size(), lineno);
    c.gates.push_back(g);
  }
  if (!have_header) throw ParseError(1, 1, "empty circuit file");
  if (!have_out) throw ParseError(lineno + 1, 1, "missing 'out' line");
  return c;
}

Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open circuit file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_circuit(buf.str());
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

Natural simulate_circuit(const Circuit& c, const Natural& point) {
  std::vector<bool> val(c.inputs + c.gates.size());
  for (unsigned i = 0; i < c.inputs; ++i)
    val[i] = boost::multiprecision::bit_test(point, i);
  for (std::size_t j = 0; j < c.gates.size(); ++j) {
    const auto& g = c.gates[j];
    bool v = false;
    switch (g.op) {
      case Circuit::Op::And: v = val[g.a] && val[g.b]; break;
      case Circuit::Op::Or: v = val[g.a] || val[g.b]; break;
      case Circuit::Op::Xor: v = val[g.a] != val[g.b]; break;
      case Circuit::Op::Not: v = !val[g.a]; break;
      case Circuit::Op::Const0: v = false; break;
      case Circuit::Op::Const1: v = true; break;
    }
    val[c.inputs + j] = v;
  }
  Natural out = 0;
  for (std::size_t k = 0; k < c.outputs.size(); ++k)
    if (val[c.outputs[k]]) boost::multiprecision::bit_set(out, k);
  return out;
}

RvPtr RandomVariable::table(std::string name, SpacePtr space,
                            std::vector<Natural> values) {
  if (values.size() != space->size())
    throw Error("table length " + std::to_string(values.size()) +
                " does not match space size " + std::to_string(space->size()));
  auto rv = std::shared_ptr<RandomVariable>(new RandomVariable());
  rv->name_ = std::move(name);
  rv->space_ = std::move(space);
  rv->backing_ = Backing::Table;
  rv->cache_ = std::move(values);
  return rv;
}

RvPtr RandomVariable::identity(std::string name, SpacePtr space) {
  auto rv = std::shared_ptr<RandomVariable>(new RandomVariable());
  rv->name_ = std::move(name);
  rv->space_ = std::move(space);
  rv->backing_ = Backing::Identity;
  return rv;
}

RvPtr RandomVariable::constant(std::string name, SpacePtr space, Natural value) {
  auto rv = std::shared_ptr<RandomVariable>(new RandomVariable());
  rv->name_ = std::move(name);
  rv->space_ = std::move(space);
  rv->backing_ = Backing::Const;
  rv->const_value_ = std::move(value);
  return rv;
}

RvPtr RandomVariable::circuit(std::string name, SpacePtr space, Circuit c) {
  if (c.inputs != space->n_bits())
    throw Error("circuit has " + std::to_string(c.inputs) + " inputs, space has " +
                std::to_string(space->n_bits()) + " bits");
  auto rv = std::shared_ptr<RandomVariable>(new RandomVariable());
  rv->name_ = std::move(name);
  rv->space_ = std::move(space);
  rv->backing_ = Backing::Circuit;
  rv->circuit_ = std::move(c);
  return rv;
}

RvPtr RandomVariable::synthesized(std::string name, SpacePtr space,
                                  std::vector<Natural> values, std::string provenance) {
  if (values.size() != space->size())
    throw Error("table length does not match space size");
  auto rv = std::shared_ptr<RandomVariable>(new RandomVariable());
  rv->name_ = std::move(name);
  rv->space_ = std::move(space);
  rv->backing_ = Backing::Table;
  rv->synthesized_ = true;
  rv->provenance_ = std::move(provenance);
  rv->cache_ = std::move(values);
  return rv;
}

Natural RandomVariable::value(std::size_t sample_index) const {
  if (sample_index >= space_->size()) throw Error("sample index out of range");
  switch (backing_) {
    case Backing::Identity:
      return space_->point(sample_index);
    case Backing::Const:
      return const_value_;
    default:
      return table_values()[sample_index];
  }
}

const std::vector<Natural>& RandomVariable::table_values() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!cache_) {
    std::vector<Natural> t;
    t.reserve(space_->size());
    for (std::size_t i = 0; i < space_->size(); ++i) {
      switch (backing_) {
        case Backing::Identity: t.push_back(space_->point(i)); break;
        case Backing::Const: t.push_back(const_value_); break;
        case Backing::Circuit: t.push_back(simulate_circuit(*circuit_, space_->point(i))); break;
        case Backing::Table: throw Error("table backing without table");
      }
    }
    cache_ = std::move(t);
  }
  return *cache_;
}

Natural RandomVariable::max_bit_length() const {
  if (backing_ == Backing::Const) return bit_length(const_value_);
  if (backing_ == Backing::Circuit) return circuit_->output_bits();
  Natural best = 0;
  if (backing_ == Backing::Identity) {
    for (const auto& p : space_->points()) best = std::max(best, bit_length(p));
    return best;
  }
  for (const auto& v : table_values()) best = std::max(best, bit_length(v));
  return best;
}

bool RandomVariable::same_table(const RandomVariable& other) const {
  if (this == &other) return true;
  if (space_ != other.space_) return false;
  return table_values() == other.table_values();
}

FamilyPtr Family::make(SpacePtr space, std::vector<RvPtr> members,
                       std::optional<Filtration> filt) {
  auto fam = std::shared_ptr<Family>(new Family());
  fam->space_ = space;
  std::map<std::vector<Natural>, std::size_t> by_table;
  std::map<std::string, std::size_t> by_name;
  for (auto& m : members) {
    if (m->space() != space) throw Error("family member '" + m->name() +
                                         "' on a different sample space");
    auto [it, fresh] = by_table.try_emplace(m->table_values(), fam->members_.size());
    if (fresh) fam->members_.push_back(m);
    auto [nit, name_fresh] = by_name.try_emplace(m->name(), it->second);
    if (!name_fresh && nit->second != it->second)
      throw Error("duplicate member name '" + m->name() + "'");
  }
  if (filt) {
    for (std::size_t k = 0; k < filt->level_names.size(); ++k) {
      std::vector<std::size_t> idx;
      for (const auto& nm : filt->level_names[k]) {
        auto it = by_name.find(nm);
        if (it == by_name.end())
          throw Error("filtration level " + std::to_string(k + 1) +
                      " names unknown member '" + nm + "'");
        idx.push_back(it->second);
      }
      std::sort(idx.begin(), idx.end());
      idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
      if (idx.empty())
        throw Error("filtration level " + std::to_string(k + 1) + " is empty");
      fam->levels_.push_back(std::move(idx));
    }
    for (std::size_t k = 0; k + 1 < fam->levels_.size(); ++k) {
      const auto& outer = fam->levels_[k];
      for (auto i : fam->levels_[k + 1])
        if (!std::binary_search(outer.begin(), outer.end(), i))
          throw Error("filtration level " + std::to_string(k + 2) +
                      " is not contained in level " + std::to_string(k + 1));
    }
  }
  if (!fam->levels_.empty())
    for (auto i : fam->levels_.back()) fam->core_cache_.push_back(fam->members_[i]);
  return fam;
}

std::vector<RvPtr> Family::level_members(std::size_t k) const {
  if (k == 0 || k > levels_.size()) throw Error("filtration level out of range");
  std::vector<RvPtr> out;
  for (auto i : levels_[k - 1]) out.push_back(members_[i]);
  return out;
}

const std::vector<RvPtr>& Family::quantifier_range() const {
  return levels_.empty() ? members_ : core_cache_;
}

RvPtr Family::by_name(const std::string& name) const {
  for (const auto& m : members_)
    if (m->name() == name) return m;
  return nullptr;
}

std::optional<std::size_t> Family::find_by_table(const RandomVariable& rv) const {
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_[i]->same_table(rv)) return i;
  return std::nullopt;
}

std::optional<std::size_t> Family::filtration_level(const RandomVariable& rv) const {
  if (levels_.empty()) throw Error("no filtration declared");
  auto rep = find_by_table(rv);
  if (!rep) return std::nullopt;
  for (std::size_t k = levels_.size(); k >= 1; --k)
    if (std::binary_search(levels_[k - 1].begin(), levels_[k - 1].end(), *rep))
      return k;
  return std::nullopt;
}

Natural PointValuation::var(const std::string& name) const {
  auto it = vars->find(name);
  if (it == vars->end()) throw Error("unbound variable '" + name + "'");
  return it->second->value(index);
}

Natural PointValuation::rv_const(const std::string& name) const {
  auto it = consts->find(name);
  if (it == consts->end()) throw Error("unresolved constant '" + name + "'");
  return it->second->value(index);
}

namespace {

TermPtr rename_term_vars(const TermPtr& t, const std::map<std::string, RvPtr>& env) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = env.find(t->name);
      return it != env.end() ? Term::var(it->second->name()) : t;
    }
    case Term::Kind::Apply: {
      std::vector<TermPtr> args;
      for (const auto& a : t->args) args.push_back(rename_term_vars(a, env));
      return Term::apply(t->fn, std::move(args));
    }
    default:
      return t;
  }
}

SpacePtr common_space(const std::map<std::string, RvPtr>& env) {
  SpacePtr space;
  for (const auto& [name, rv] : env) {
    if (!space) space = rv->space();
    else if (space != rv->space())
      throw Error("rv '" + name + "' on a different sample space");
  }
  return space;
}

}  // namespace

RvPtr apply_term(const TermPtr& term, const std::map<std::string, RvPtr>& env) {
  for (const auto& v : free_variables(*term))
    if (!env.count(v)) throw Error("unbound variable '" + v + "'");
  SpacePtr space = common_space(env);
  if (!space) throw Error("apply_term needs at least one bound rv");
  std::vector<Natural> values;
  values.reserve(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) {
    PointValuation val(env, env, i);
    values.push_back(eval_term(*term, val));
  }
  std::string name = render_term(*rename_term_vars(term, env));
  return RandomVariable::synthesized(name, space, std::move(values),
                                     "pointwise " + render_term(*term));
}

RvPtr case_merge(const RvPtr& alpha, const RvPtr& beta, const FormulaPtr& cond,
                 const std::map<std::string, RvPtr>& consts) {
  if (classify_formula(*cond) != FormulaClass::Open)
    throw Error("case condition must be open");
  auto fv = free_variables(*cond);
  if (fv.size() != 1)
    throw Error("case condition needs exactly one free variable");
  const std::string& x = *fv.begin();
  if (alpha->space() != beta->space())
    throw Error("rvs on different sample spaces");
  for (const auto& c : rv_constants(*cond)) {
    auto it = consts.find(c);
    if (it == consts.end()) throw Error("unresolved constant '" + c + "'");
    if (it->second->space() != alpha->space())
      throw Error("rv '" + c + "' on a different sample space");
  }
  SpacePtr space = alpha->space();
  std::map<std::string, RvPtr> vars{{x, alpha}};
  std::vector<Natural> values;
  values.reserve(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) {
    PointValuation val(vars, consts, i);
    values.push_back(eval_open(*cond, val) ? alpha->value(i) : beta->value(i));
  }
  std::string name = "case(" + alpha->name() + "," + beta->name() + ")";
  std::string prov = "if " + render_formula(*cond) + " with " + x + " := " +
                     alpha->name() + " then " + alpha->name() + " else " +
                     beta->name();
  return RandomVariable::synthesized(name, space, std::move(values), std::move(prov));
}

FamilyPtr term_closure(const FamilyPtr& fam, unsigned depth,
                       const std::vector<Fn>& symbols, std::size_t cap) {
  std::vector<RvPtr> members = fam->members();
  // A term image inherits the shallowest level among its ingredients, so
  // closure members stay visible to quantifiers over the core.
  std::vector<std::optional<std::size_t>> level(members.size());
  if (fam->has_filtration())
    for (std::size_t i = 0; i < members.size(); ++i)
      level[i] = fam->filtration_level(*members[i]);
  std::map<std::vector<Natural>, std::size_t> by_table;
  for (std::size_t i = 0; i < members.size(); ++i)
    by_table.emplace(members[i]->table_values(), i);
  std::vector<std::string> added;
  auto fail_cap = [&]() {
    std::string msg = "term closure exceeded cap " + std::to_string(cap) +
                      " (added " + std::to_string(added.size()) + " so far";
    std::size_t show = std::min<std::size_t>(added.size(), 8);
    for (std::size_t i = 0; i < show; ++i)
      msg += (i ? ", " : ": ") + added[i];
    if (added.size() > show) msg += ", ...";
    throw Error(msg + ")");
  };
  std::size_t N = fam->space()->size();
  for (unsigned round = 0; round < depth; ++round) {
    std::size_t snapshot = members.size();
    auto emit = [&](TermPtr display, std::vector<Natural> values,
                    std::optional<std::size_t> lv) {
      auto it = by_table.find(values);
      if (it != by_table.end()) return;
      if (members.size() + 1 > cap) fail_cap();
      std::string name = render_term(*display);
      auto rv = RandomVariable::synthesized(name, fam->space(), std::move(values),
                                            "closure round " +
                                                std::to_string(round + 1));
      by_table.emplace(rv->table_values(), members.size());
      members.push_back(rv);
      level.push_back(lv);
      added.push_back(std::move(name));
    };
    for (Fn f : symbols) {
      if (fn_arity(f) == 1) {
        for (std::size_t i = 0; i < snapshot; ++i) {
          std::vector<Natural> values;
          values.reserve(N);
          for (std::size_t w = 0; w < N; ++w)
            values.push_back(eval_function(f, {members[i]->value(w)}));
          emit(Term::apply(f, {Term::var(members[i]->name())}), std::move(values),
               level[i]);
        }
      } else {
        for (std::size_t i = 0; i < snapshot; ++i)
          for (std::size_t j = 0; j < snapshot; ++j) {
            std::vector<Natural> values;
            values.reserve(N);
            for (std::size_t w = 0; w < N; ++w)
              values.push_back(
                  eval_function(f, {members[i]->value(w), members[j]->value(w)}));
            std::optional<std::size_t> lv;
            if (level[i] && level[j]) lv = std::min(*level[i], *level[j]);
            emit(Term::apply(f, {Term::var(members[i]->name()),
                                 Term::var(members[j]->name())}),
                 std::move(values), lv);
          }
      }
    }
  }
  std::optional<Filtration> filt;
  if (fam->has_filtration()) {
    Filtration f;
    for (std::size_t k = 1; k <= fam->level_count(); ++k) {
      std::vector<std::string> names;
      for (const auto& m : fam->level_members(k)) names.push_back(m->name());
      f.level_names.push_back(std::move(names));
    }
    std::size_t base = fam->members().size();
    for (std::size_t i = base; i < members.size(); ++i) {
      if (!level[i]) continue;
      for (std::size_t l = 1; l <= *level[i]; ++l)
        f.level_names[l - 1].push_back(members[i]->name());
    }
    filt = std::move(f);
  }
  return Family::make(fam->space(), std::move(members), std::move(filt));
}

}  // namespace kforge
