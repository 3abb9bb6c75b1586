#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "kforge/report.hpp"

namespace {

using namespace kforge;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

// --formula accepts a formula string, @file, or the name of a formula
// declared in the scenario.
FormulaPtr resolve_formula(const Scenario& s, const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') {
    std::string text = slurp(arg.substr(1));
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
      text.pop_back();
    return scenario_formula(s, text);
  }
  return scenario_formula(s, arg);
}

std::optional<Rational> parse_eps_flag(const std::string& eps_text) {
  if (eps_text.empty()) return std::nullopt;
  Rational eps = parse_rational(eps_text);
  if (eps < 0 || eps > 1) throw Error("eps must lie in [0, 1]");
  return eps;
}

std::string serialize_type(const TypeSpec& p) {
  std::string out;
  for (const auto& m : p.members) out += render_formula(*m) + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boolean-valued structure workbench"};
  app.require_subcommand(1);

  std::string report_name = "text";
  unsigned workers = 1;
  app.add_option("--report", report_name, "output format: text, json, csv")
      ->capture_default_str();
  app.add_option("--workers", workers, "worker threads for evaluation")
      ->capture_default_str()
      ->check(CLI::Range(1u, 256u));

  std::string scenario_path, formula_spec, type_path, var_name, policy_name_s,
      witness_name, eps_text, out_scenario, out_type;
  unsigned closure_depth = 1;
  std::size_t closure_cap = 4096;
  bool thin = false;

  auto add_scenario = [&](CLI::App* cmd) {
    // allow --report/--workers after the subcommand name as well
    cmd->fallthrough();
    cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    cmd->add_option("--eps", eps_text, "tolerance override (rational)");
  };

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate ⟦A⟧");
  add_scenario(eval_cmd);
  eval_cmd->add_option("--formula", formula_spec,
                       "formula text, @file, or declared name")
      ->required();

  CLI::App* wit_cmd =
      app.add_subcommand("witness", "existential witness for an open formula");
  add_scenario(wit_cmd);
  wit_cmd->add_option("--formula", formula_spec,
                      "formula text, @file, or declared name")
      ->required();
  wit_cmd->add_option("--var", var_name, "existential variable");
  wit_cmd->add_option("--policy", policy_name_s, "synthesize or family-only")
      ->capture_default_str();

  CLI::App* sko_cmd =
      app.add_subcommand("skolemize", "stagewise witnesses for an ∃∀ prefix");
  add_scenario(sko_cmd);
  sko_cmd->add_option("--formula", formula_spec,
                      "formula text, @file, or declared name")
      ->required();
  sko_cmd->add_option("--policy", policy_name_s, "synthesize or family-only");

  CLI::App* rea_cmd =
      app.add_subcommand("realize", "realize a type against the family");
  add_scenario(rea_cmd);
  rea_cmd->add_option("--type", type_path, "type file, one formula per line")
      ->required();
  rea_cmd->add_option("--policy", policy_name_s, "synthesize or family-only");
  rea_cmd->add_option("--closure-depth", closure_depth,
                      "pairing closure depth for existential types")
      ->capture_default_str();
  rea_cmd->add_option("--closure-cap", closure_cap,
                      "maximum family size during closure")
      ->capture_default_str();
  rea_cmd->add_flag("--thin", thin,
                    "drop chain indices violating the measure-drop bound");

  CLI::App* chk_cmd =
      app.add_subcommand("check-satur", "saturation inequality for one rv");
  add_scenario(chk_cmd);
  chk_cmd->add_option("--type", type_path, "type file, one formula per line")
      ->required();
  chk_cmd->add_option("--witness", witness_name, "declared rv name")
      ->required();

  CLI::App* demo_cmd = app.add_subcommand("demo", "built-in scenarios");
  demo_cmd->fallthrough();
  demo_cmd->require_subcommand(1);
  unsigned demo_n = 256, demo_levels = 4, demo_horizon = 3, demo_depth = 4;
  std::size_t demo_samples = 1024;
  std::uint64_t demo_seed = 7;
  CLI::App* uf_cmd = demo_cmd->add_subcommand(
      "universal-failure", "length-budget squeeze on sampled bit strings");
  uf_cmd->fallthrough();
  uf_cmd->add_option("--n", demo_n, "sample bit width")->capture_default_str();
  uf_cmd->add_option("--levels", demo_levels, "filtration depth")
      ->capture_default_str();
  uf_cmd->add_option("--samples", demo_samples, "sample count")
      ->capture_default_str();
  uf_cmd->add_option("--seed", demo_seed, "sampling seed")
      ->capture_default_str();
  uf_cmd->add_option("--horizon", demo_horizon, "prefix length K")
      ->capture_default_str();
  uf_cmd->add_option("--depth", demo_depth, "deep meet length D")
      ->capture_default_str();
  uf_cmd->add_option("--out-scenario", out_scenario,
                     "write the generated scenario here");
  uf_cmd->add_option("--out-type", out_type, "write the generated type here");

  CLI11_PARSE(app, argc, argv);

  try {
    ReportFormat format = report_format_by_name(report_name);
    WitnessPolicy policy = policy_name_s.empty()
                               ? WitnessPolicy::Synthesize
                               : policy_by_name(policy_name_s);

    if (uf_cmd->parsed()) {
      DemoResult d = build_universal_failure(demo_n, demo_levels, demo_samples,
                                             demo_seed, demo_horizon,
                                             demo_depth, workers);
      if (!out_scenario.empty())
        write_file(out_scenario, serialize_scenario(d.scenario));
      if (!out_type.empty()) write_file(out_type, serialize_type(d.type));
      std::cout << emit_demo(d, format);
      return 0;
    }

    Scenario sc = load_scenario(scenario_path);
    Context ctx = make_context(sc, workers, parse_eps_flag(eps_text));
    Evaluator ev(ctx);

    if (eval_cmd->parsed()) {
      FormulaPtr f = resolve_formula(sc, formula_spec);
      Event e = ev.truth_value(f);
      bool closed = free_variables(*f).empty();
      EvalReport rep{render_formula(*f), e, ctx.eps, closed,
                     closed && measure(e) >= Rational(1) - ctx.eps};
      std::cout << emit_eval(rep, format);
      return 0;
    }
    if (wit_cmd->parsed()) {
      FormulaPtr f = resolve_formula(sc, formula_spec);
      std::string var = var_name;
      if (var.empty()) {
        if (f->kind != Formula::Kind::Exists)
          throw Error("--var is required unless the formula starts with exists");
        var = f->var;
        f = f->a;
      }
      WitnessReport rep{render_formula(*f), var, policy,
                        witness_existential(ev, f, var, policy)};
      std::cout << emit_witness(rep, format);
      return 0;
    }
    if (sko_cmd->parsed()) {
      FormulaPtr f = resolve_formula(sc, formula_spec);
      SkolemReport rep{policy, skolem_chain(ev, f, policy)};
      std::cout << emit_skolem(rep, format);
      return 0;
    }
    if (rea_cmd->parsed()) {
      TypeSpec p = load_type(type_path, &sc.rv_names);
      SaturationReport rep;
      switch (p.cls) {
        case TypeClass::Open:
          rep = realize_open_type(ev, p, policy, thin);
          break;
        case TypeClass::Existential:
          rep = realize_existential_type(ev, p, policy, closure_depth,
                                         closure_cap, thin);
          break;
        default:
          throw Error(std::string("cannot realize a ") +
                      type_class_name(p.cls) + " type");
      }
      std::cout << emit_saturation(rep, format);
      return 0;
    }
    if (chk_cmd->parsed()) {
      TypeSpec p = load_type(type_path, &sc.rv_names);
      auto it = sc.consts.find(witness_name);
      if (it == sc.consts.end())
        throw Error("unknown rv '" + witness_name + "'");
      std::cout << emit_saturation(check_satur(ev, p, it->second), format);
      return 0;
    }
    throw Error("no subcommand");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
