#pragma once

#include <optional>

#include "kforge/eval.hpp"

namespace kforge {

// One loaded experiment description: sample space, rv declarations,
// the quantifier family (optionally filtered), a default eps, and
// named formulas.
struct Scenario {
  SpacePtr space;
  std::vector<RvPtr> decls;             // declaration order
  std::map<std::string, RvPtr> consts;  // every declared rv by name
  std::set<std::string> rv_names;
  FamilyPtr family;                     // null when no family section
  std::vector<std::string> family_names;
  std::optional<Filtration> filtration;
  Rational eps = 0;
  std::vector<std::pair<std::string, FormulaPtr>> formulas;
  std::map<std::string, std::string> circuit_paths;
};

Scenario load_scenario(const std::string& path);
// base_dir resolves relative circuit paths; display_path names the
// source in errors
Scenario parse_scenario(const std::string& text, const std::string& display_path,
                        const std::string& base_dir);
std::string serialize_scenario(const Scenario& s);

// Formula text in the scenario's constant vocabulary; bare names of
// declared scenario formulas resolve to their definition.
FormulaPtr scenario_formula(const Scenario& s, const std::string& text);

Context make_context(const Scenario& s, unsigned workers,
                     std::optional<Rational> eps_override = std::nullopt);

}  // namespace kforge
