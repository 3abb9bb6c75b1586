#pragma once

#include "kforge/saturate.hpp"

namespace kforge {

enum class ReportFormat { Text, Json, Csv };
const char* report_format_name(ReportFormat f);
ReportFormat report_format_by_name(const std::string& name);

// Every emitter returns the complete report with a trailing newline and
// byte-stable field order: two runs over equal inputs render equal
// bytes regardless of worker count.

struct EvalReport {
  std::string formula;
  Event event;
  Rational eps;
  bool closed = false;  // no free variables; `valid` is meaningful
  bool valid = false;   // μ(⟦A⟧) ≥ 1 − eps
};
std::string emit_eval(const EvalReport& r, ReportFormat f);

struct WitnessReport {
  std::string formula;
  std::string var;
  WitnessPolicy policy = WitnessPolicy::Synthesize;
  WitnessResult result;
};
std::string emit_witness(const WitnessReport& r, ReportFormat f);

struct SkolemReport {
  WitnessPolicy policy = WitnessPolicy::Synthesize;
  SkolemChain chain;
};
std::string emit_skolem(const SkolemReport& r, ReportFormat f);

std::string emit_saturation(const SaturationReport& r, ReportFormat f);

std::string emit_demo(const DemoResult& d, ReportFormat f);

}  // namespace kforge
