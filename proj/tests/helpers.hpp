#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kforge/eval.hpp"
#include "kforge/scenario.hpp"

namespace th {

using namespace kforge;

inline SpacePtr ex_space(unsigned n_bits) {
  return SampleSpace::exhaustive(n_bits);
}

inline std::vector<Natural> nat_vec(const std::vector<long long>& v) {
  return std::vector<Natural>(v.begin(), v.end());
}

inline RvPtr tab(const std::string& name, const SpacePtr& s,
                 const std::vector<long long>& vals) {
  return RandomVariable::table(name, s, nat_vec(vals));
}

inline RvPtr cst(const std::string& name, const SpacePtr& s, long long v) {
  return RandomVariable::constant(name, s, Natural(v));
}

inline FamilyPtr fam(const SpacePtr& s, std::vector<RvPtr> members,
                     std::optional<Filtration> f = std::nullopt) {
  return Family::make(s, std::move(members), std::move(f));
}

// Scenario-shaped context: every family member is also a named constant.
inline Context ctx_of(const SpacePtr& s, const FamilyPtr& f, Rational eps = 0,
                      unsigned workers = 1) {
  Context c;
  c.space = s;
  c.family = f;
  if (f)
    for (const auto& m : f->members()) c.consts[m->name()] = m;
  c.eps = eps;
  c.options.workers = workers;
  return c;
}

inline std::set<std::string> const_names(const Context& c) {
  std::set<std::string> out;
  for (const auto& [k, v] : c.consts) out.insert(k);
  return out;
}

inline FormulaPtr fml(const std::string& text) { return parse_formula(text); }

inline FormulaPtr fml(const std::string& text, const Context& c) {
  auto d = const_names(c);
  return parse_formula(text, &d);
}

// bitstr[i] = '1' puts sample i in the event
inline Event ev_bits(const SpacePtr& s, const std::string& bitstr) {
  boost::dynamic_bitset<> b(s->size());
  for (std::size_t i = 0; i < bitstr.size() && i < b.size(); ++i)
    if (bitstr[i] == '1') b.set(i);
  return Event::from_bits(s, std::move(b));
}

inline bool msg_has(const std::exception& e, const std::string& part) {
  return std::string(e.what()).find(part) != std::string::npos;
}

}  // namespace th
