#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "kforge/logic.hpp"
#include "kforge/space.hpp"

namespace kforge {

struct Circuit {
  enum class Op { And, Or, Xor, Not, Const0, Const1 };
  struct Gate {
    Op op;
    // operand encoding: 0..inputs-1 = input bit, inputs + j = gate j
    int a = -1;
    int b = -1;
  };
  unsigned inputs = 0;
  std::vector<Gate> gates;
  std::vector<int> outputs;  // first entry = LSB

  std::size_t size() const { return gates.size(); }
  unsigned output_bits() const { return static_cast<unsigned>(outputs.size()); }
};

Circuit parse_circuit(const std::string& text);
Circuit load_circuit(const std::string& path);
// input bit i = bit i of the sample point
Natural simulate_circuit(const Circuit& c, const Natural& point);

class RandomVariable;
using RvPtr = std::shared_ptr<const RandomVariable>;

class RandomVariable {
 public:
  enum class Backing { Table, Circuit, Identity, Const };

  static RvPtr table(std::string name, SpacePtr space, std::vector<Natural> values);
  static RvPtr identity(std::string name, SpacePtr space);
  static RvPtr constant(std::string name, SpacePtr space, Natural value);
  static RvPtr circuit(std::string name, SpacePtr space, Circuit c);
  // table rv produced by an operation rather than a declaration
  static RvPtr synthesized(std::string name, SpacePtr space,
                           std::vector<Natural> values, std::string provenance);

  const std::string& name() const { return name_; }
  const SpacePtr& space() const { return space_; }
  Backing backing() const { return backing_; }
  bool is_synthesized() const { return synthesized_; }
  const std::string& provenance() const { return provenance_; }

  Natural value(std::size_t sample_index) const;
  // materialized value table; computed once, then cached
  const std::vector<Natural>& table_values() const;
  Natural max_bit_length() const;

  bool same_table(const RandomVariable& other) const;

 private:
  RandomVariable() = default;
  std::string name_;
  SpacePtr space_;
  Backing backing_ = Backing::Table;
  bool synthesized_ = false;
  std::string provenance_;
  Natural const_value_;
  std::optional<Circuit> circuit_;
  mutable std::mutex mu_;
  mutable std::optional<std::vector<Natural>> cache_;
};

struct Filtration {
  // levels[k-1] = names of the members at level k; level L is the core
  std::vector<std::vector<std::string>> level_names;
};

class Family;
using FamilyPtr = std::shared_ptr<const Family>;

class Family {
 public:
  // Deduplicates by value table (first occurrence wins). Filtration
  // names resolve against the member list; nesting level_k ⊇ level_{k+1}
  // is checked here.
  static FamilyPtr make(SpacePtr space, std::vector<RvPtr> members,
                        std::optional<Filtration> filt = std::nullopt);

  const SpacePtr& space() const { return space_; }
  const std::vector<RvPtr>& members() const { return members_; }
  bool has_filtration() const { return !levels_.empty(); }
  std::size_t level_count() const { return levels_.size(); }
  std::vector<RvPtr> level_members(std::size_t k) const;  // 1-based
  // members quantifiers range over: the core level when a filtration is
  // declared, the whole family otherwise
  const std::vector<RvPtr>& quantifier_range() const;

  RvPtr by_name(const std::string& name) const;
  std::optional<std::size_t> find_by_table(const RandomVariable& rv) const;
  bool contains_table(const RandomVariable& rv) const {
    return find_by_table(rv).has_value();
  }
  // deepest level whose subset contains an rv with this table
  std::optional<std::size_t> filtration_level(const RandomVariable& rv) const;

 private:
  Family() = default;
  SpacePtr space_;
  std::vector<RvPtr> members_;
  std::vector<std::vector<std::size_t>> levels_;  // member indices per level
  mutable std::vector<RvPtr> core_cache_;
};

// Per-sample valuation over rv bindings; vars and named constants are
// looked up in separate maps.
struct PointValuation final : Valuation {
  const std::map<std::string, RvPtr>* vars;
  const std::map<std::string, RvPtr>* consts;
  std::size_t index;

  PointValuation(const std::map<std::string, RvPtr>& v,
                 const std::map<std::string, RvPtr>& c, std::size_t i)
      : vars(&v), consts(&c), index(i) {}

  Natural var(const std::string& name) const override;
  Natural rv_const(const std::string& name) const override;
};

// value(ω) = term evaluated pointwise; env binds both variables and
// named constants appearing in the term
RvPtr apply_term(const TermPtr& term, const std::map<std::string, RvPtr>& env);

// γ(ω) = α(ω) if cond holds at ω with x := α, else β(ω)
RvPtr case_merge(const RvPtr& alpha, const RvPtr& beta, const FormulaPtr& cond,
                 const std::map<std::string, RvPtr>& consts);

// Closes the family under pointwise images of terms of nesting depth ≤
// depth built from `symbols`; throws once the member count would pass
// `cap`, listing what had been added so far.
FamilyPtr term_closure(const FamilyPtr& fam, unsigned depth,
                       const std::vector<Fn>& symbols, std::size_t cap);

}  // namespace kforge
