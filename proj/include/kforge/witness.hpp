#pragma once

#include "kforge/eval.hpp"

namespace kforge {

enum class WitnessPolicy { Synthesize, FamilyOnly };
const char* policy_name(WitnessPolicy p);
WitnessPolicy policy_by_name(const std::string& name);

struct WitnessResult {
  RvPtr witness;
  Event event;   // ⟦A(witness)⟧
  Event target;  // ⟦∃xA⟧ (or ⟦∀xA⟧ for the dual)
  Rational gap;  // μ(target Δ event); one side always contains the other
  bool in_family = false;
  std::vector<std::string> trace;  // fold order and conditions
};

// Witness for ∃x A with A open in `var` (other free variables bound by
// env). Synthesize folds the case-merge over the family in declaration
// order, giving ⟦A(γ)⟧ = ⋃_α ⟦A(α)⟧ exactly; family-only picks the
// member maximizing μ(⟦A(α)⟧), first wins on ties.
WitnessResult witness_existential(Evaluator& ev, const FormulaPtr& A,
                                  const std::string& var, WitnessPolicy policy,
                                  const Environment& env = {});

// Dual: ∀y C, fold condition ¬C, meet of events; family-only argmin.
WitnessResult cowitness_universal(Evaluator& ev, const FormulaPtr& C,
                                  const std::string& var, WitnessPolicy policy,
                                  const Environment& env = {});

struct SkolemStage {
  Formula::Kind quant;  // Exists or Forall
  std::string var;
  RvPtr witness;
  bool in_family = false;
  bool table_defined = false;  // stage condition was not an open formula
  Event value;                 // ⟦remainder⟧ with this stage's witness bound
  Rational delta;              // μ(value Δ ⟦A⟧)
  std::vector<std::string> trace;
};

struct SkolemChain {
  FormulaPtr formula;
  Event base;  // ⟦A⟧
  std::vector<SkolemStage> stages;
  Event matrix_event;  // open matrix under all chosen witnesses
};

// Stagewise witnesses for a formula with alternating ∃∀ prefix (or no
// prefix at all); with policy synthesize every stage value equals ⟦A⟧.
SkolemChain skolem_chain(Evaluator& ev, const FormulaPtr& A, WitnessPolicy policy);

// Rewrites existential one-variable formulas A_k(x) = ∃y…B_k into open
// C_k(z) := B_k(p1(z), p1(p2^(k)(z))), k the 1-based position; multi-∃
// blocks are first collapsed into one variable by right-nested pairing.
// Open members map to A(p1(z)).
std::vector<FormulaPtr> pairing_reduce(const std::vector<FormulaPtr>& members);

// Pointwise α := pair(γ, pair(β₁, … pair(β_k, γ)…)); p1(α) = γ.
RvPtr pack_tuple_witness(const RvPtr& gamma, const std::vector<RvPtr>& betas);

}  // namespace kforge
