#pragma once

#include <optional>

#include "kforge/scenario.hpp"
#include "kforge/witness.hpp"

namespace kforge {

enum class TypeClass { Open, Existential, Universal, Mixed };
const char* type_class_name(TypeClass c);

// Finite prefix of a type: an ordered list of formulas sharing one free
// variable. make_type renames every member to the first member's
// variable.
struct TypeSpec {
  std::vector<FormulaPtr> members;
  std::string var;
  TypeClass cls = TypeClass::Open;
};

TypeSpec make_type(std::vector<FormulaPtr> members);
// One formula per line, '#' comments and blank lines skipped.
TypeSpec load_type(const std::string& path,
                   const std::set<std::string>* declared = nullptr);
TypeSpec parse_type(const std::string& text, const std::string& display_path,
                    const std::set<std::string>* declared = nullptr);

// A_k = p_1 ∧ … ∧ p_k (left-associated), so A_{k+1} → A_k is valid by
// shape alone.
std::vector<FormulaPtr> conjunction_chain(const TypeSpec& p);

// Per-index record of a realization or check run. Condition flags keep
// the numbering of the stage-selection conjunction: 2 implication
// validity and 3 U_k = ⟦A_k(α_k)⟧ hold by construction, 4 is U-chain
// nesting mod eps (mono_loss ≤ eps), 5 the measure-drop bound
// μ(Û_j) − μ(Û_k) < 1/j + eps for all j ≤ k on the monotonized chain,
// 6 filtration nesting (validated at load, so always true here), 7
// witness membership α_j ∈ F_min(k,L) for all j ≤ k.
struct ChainStep {
  std::size_t k = 0;  // original 1-based chain index
  FormulaPtr chain_formula;  // A_k
  RvPtr witness;             // α_k
  bool witness_in_family = false;
  std::optional<std::size_t> witness_level;
  Rational witness_gap = 0;           // μ(⟦∃xA_k⟧ \ U_k)
  std::optional<Event> exists_event;  // ⟦∃x A_k⟧
  std::optional<Event> raw_event;     // U_k
  std::optional<Event> mono_event;    // Û_k = Û_{k-1} ∩ U_k
  Rational mono_loss = 0;             // μ(U_k \ Û_{k-1})
  bool cond2 = true, cond3 = true, cond4 = true;
  bool cond5 = true, cond6 = true, cond7 = true;
  std::vector<std::string> failed;  // labels "cond4", "cond5", "cond7"

  bool all_pass() const { return failed.empty(); }
  std::string flags() const;  // "ok" or failed labels joined with ';'
};

enum class ReportKind { Check, RealizeOpen, RealizeExistential };

struct ProfileRow {
  std::size_t k = 0;
  Rational lhs_measure;  // μ(⟦∃x A_k⟧)
  Rational rhs_measure;  // μ(⟦A_k(α)⟧) for the final witness α
  Rational gap;
  std::string flags;
};

// Headline lhs/rhs/defect cover the accepted prefix k ≤ max(stage, 1);
// full_* cover the whole chain with the same witness. For the
// existential kind, steps/profile/lhs/rhs live at the reduced z level
// and x_profile carries the original formulas under the projected
// witness.
struct SaturationReport {
  ReportKind kind = ReportKind::Check;
  WitnessPolicy policy = WitnessPolicy::Synthesize;
  std::string var;
  Rational eps = 0;
  std::vector<ChainStep> steps;
  std::size_t stage = 0;   // s: longest all-pass prefix, 0 when none
  std::size_t prefix = 0;  // indices contributing to the headline
  RvPtr witness;           // final α (= α_max(s,1))
  bool witness_in_family = false;
  std::optional<Event> lhs;  // ⋀_{k≤prefix} ⟦∃xA_k⟧
  std::optional<Event> rhs;  // ⋀_{k≤prefix} ⟦A_k(α)⟧
  Rational lhs_measure, rhs_measure, defect;
  bool realized_mod_eps = false;
  std::optional<Event> full_lhs, full_rhs;
  Rational full_lhs_measure, full_rhs_measure, full_defect;
  std::vector<ProfileRow> profile;
  bool thinned = false;
  std::vector<std::size_t> kept;  // original 1-based indices after thinning

  std::vector<FormulaPtr> reduced;  // C_k (existential kind only)
  RvPtr z_witness;
  std::vector<ProfileRow> x_profile;
  std::size_t closure_added = 0;
};

// Evaluates the saturation inequality for the given element: lhs =
// ⋀_k ⟦∃x A_k⟧, rhs = ⋀_k ⟦A_k(u)⟧. lhs ⊇ rhs whenever u lies in the
// quantifier range; otherwise the defect is reported as-is and may be
// negative.
SaturationReport check_satur(Evaluator& ev, const TypeSpec& p, const RvPtr& u);

// Realization procedure for open types: per-k witnesses, the U-chain
// with monotonization, condition checks, stage selection s = longest
// all-pass prefix, final witness α_s (α_1 when s = 0). With thin, a
// greedy subsequence keeping conditions 4-5 under renumbered positions
// is selected first; kept lists the surviving original indices.
SaturationReport realize_open_type(Evaluator& ev, const TypeSpec& p,
                                   WitnessPolicy policy, bool thin = false);

// Existential or open types: members are rewritten to open C_k(z) by
// pairing, the family is closed under pair/p1/p2 to closure_depth, and
// the open procedure runs on the result. The returned witness is
// p1(z-witness) pointwise and the defect equals the z-level defect.
SaturationReport realize_existential_type(Evaluator& ev, const TypeSpec& p,
                                          WitnessPolicy policy,
                                          unsigned closure_depth,
                                          std::size_t closure_cap = 4096,
                                          bool thin = false);

// The open type {A(x, t(x)) : t a term in x, depth(t) ≤ depth},
// deduplicated syntactically, in deterministic generation order.
TypeSpec term_type(const FormulaPtr& A, const std::string& x,
                   const std::string& y, unsigned depth);

struct SqueezeRow {
  std::size_t level = 0;
  unsigned budget_exponent = 0;  // length budget is 2^budget_exponent
  Natural value;                 // v_ℓ = 2^(budget_exponent − 1)
  unsigned value_bits = 0;
  std::string matched_by;  // member whose output length hits v_ℓ, or ""
  std::optional<std::size_t> matched_level;
  Rational penalty;  // μ{ω : some level-ℓ member has bit length v_ℓ at ω}
  std::string note;
};

struct DemoPrefixRow {
  std::size_t k = 0;
  Rational exists_measure;  // μ(⟦∃x A_k⟧)
  Rational lhs_running;     // min over k' ≤ k
};

struct DemoResult {
  Scenario scenario;
  TypeSpec type;
  unsigned n = 0, levels = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  unsigned horizon = 0, depth = 0;
  std::vector<unsigned> budget_exponents;  // per level, 1-based order
  std::size_t family_size = 0, core_size = 0;
  std::vector<DemoPrefixRow> prefix;
  Rational lhs_final;  // LHS_horizon
  std::vector<std::pair<std::string, Rational>> deep_meet;  // per core member
  Rational deep_meet_max;
  std::string deep_meet_argmax;
  std::vector<SqueezeRow> squeeze;
};

// Sampled space of `samples` n-bit points; a level catalog of constants,
// the identity, per-level extremal values v_ℓ and length-witness
// closures, filtered by output-length budgets 2^⌊n^(1/ℓ)⌋; the type
// A_k(x) = len(x)^k ≤ nlen ∧ ∀y(len(y) ≠ x). Reports the truncated
// prefix LHS, the per-core-member deep meets, and the witness-squeeze
// table.
DemoResult build_universal_failure(unsigned n, unsigned levels,
                                   std::size_t samples, std::uint64_t seed,
                                   unsigned horizon, unsigned depth,
                                   unsigned workers);

}  // namespace kforge
