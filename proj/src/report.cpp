#include "kforge/report.hpp"

#include <sstream>

#include "json.hpp"

namespace kforge {

using ojson = nlohmann::ordered_json;

const char* report_format_name(ReportFormat f) {
  switch (f) {
    case ReportFormat::Text:
      return "text";
    case ReportFormat::Json:
      return "json";
    case ReportFormat::Csv:
      return "csv";
  }
  return "?";
}

ReportFormat report_format_by_name(const std::string& name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw Error("unknown report format '" + name + "'");
}

namespace {

constexpr std::size_t kTableLimit = 256;  // rv value dumps above this size

ojson json_int(const Natural& v) {
  static const Natural max64 = Natural(std::numeric_limits<std::int64_t>::max());
  if (v <= max64 && v >= -max64) return v.convert_to<std::int64_t>();
  return v.str();
}

std::string measure_str(const Rational& r) {
  return rational_str(r) + " ~ " + decimal6(r);
}

ojson measure_json(const Rational& r) {
  ojson j;
  j["num"] = json_int(numerator(r));
  j["den"] = json_int(denominator(r));
  j["approx"] = decimal6(r);
  return j;
}

std::string event_str(const Event& e) {
  std::ostringstream os;
  os << event_hex(e) << " count " << e.count() << "/" << e.size()
     << " measure " << measure_str(measure(e));
  return os.str();
}

ojson event_json(const Event& e) {
  ojson j;
  j["hex"] = event_hex(e);
  j["count"] = e.count();
  j["size"] = e.size();
  j["measure"] = measure_json(measure(e));
  return j;
}

std::string rv_str(const RvPtr& rv) {
  if (!rv) return "(none)";
  return rv->is_synthesized() ? rv->name() + " [synthesized]" : rv->name();
}

ojson rv_json(const RvPtr& rv) {
  ojson j;
  if (!rv) return j;
  j["name"] = rv->name();
  j["synthesized"] = rv->is_synthesized();
  if (rv->is_synthesized()) j["provenance"] = rv->provenance();
  if (rv->space()->size() <= kTableLimit) {
    ojson vals = ojson::array();
    for (std::size_t i = 0; i < rv->space()->size(); ++i)
      vals.push_back(json_int(rv->value(i)));
    j["values"] = vals;
  } else {
    j["values_omitted"] = true;
  }
  return j;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void trace_lines(std::ostringstream& os, const std::vector<std::string>& trace,
                 const char* indent) {
  for (const auto& t : trace) os << indent << t << "\n";
}

ojson profile_json(const std::vector<ProfileRow>& rows) {
  ojson arr = ojson::array();
  for (const auto& r : rows) {
    ojson j;
    j["k"] = r.k;
    j["lhs"] = measure_json(r.lhs_measure);
    j["rhs"] = measure_json(r.rhs_measure);
    j["gap"] = measure_json(r.gap);
    j["flags"] = r.flags;
    arr.push_back(std::move(j));
  }
  return arr;
}

void profile_text(std::ostringstream& os, const std::vector<ProfileRow>& rows) {
  os << "  k | exists | realized | gap | flags\n";
  for (const auto& r : rows)
    os << "  " << r.k << " | " << measure_str(r.lhs_measure) << " | "
       << measure_str(r.rhs_measure) << " | " << measure_str(r.gap) << " | "
       << r.flags << "\n";
}

void profile_csv(std::ostringstream& os, const std::vector<ProfileRow>& rows) {
  os << "k,lhs,rhs,gap,flags\n";
  for (const auto& r : rows)
    os << r.k << "," << rational_str(r.lhs_measure) << ","
       << rational_str(r.rhs_measure) << "," << rational_str(r.gap) << ","
       << csv_cell(r.flags) << "\n";
}

const char* report_kind_name(ReportKind k) {
  switch (k) {
    case ReportKind::Check:
      return "check-satur";
    case ReportKind::RealizeOpen:
      return "realize-open";
    case ReportKind::RealizeExistential:
      return "realize-existential";
  }
  return "?";
}

std::string demo_value_str(const SqueezeRow& row) {
  if (row.value_bits <= 17) return row.value.str();
  return "2^" + std::to_string(row.value_bits - 1);
}

}  // namespace

std::string emit_eval(const EvalReport& r, ReportFormat f) {
  switch (f) {
    case ReportFormat::Text: {
      std::ostringstream os;
      os << "formula: " << r.formula << "\n";
      os << "event: " << event_str(r.event) << "\n";
      if (r.closed)
        os << "valid_mod_eps: " << (r.valid ? "yes" : "no") << " (eps "
           << rational_str(r.eps) << ")\n";
      return os.str();
    }
    case ReportFormat::Json: {
      ojson j;
      j["formula"] = r.formula;
      j["event"] = event_json(r.event);
      if (r.closed) {
        j["eps"] = measure_json(r.eps);
        j["valid_mod_eps"] = r.valid;
      }
      return j.dump(2) + "\n";
    }
    case ReportFormat::Csv: {
      std::ostringstream os;
      os << "formula,count,size,measure,approx,hex\n";
      Rational m = measure(r.event);
      os << csv_cell(r.formula) << "," << r.event.count() << ","
         << r.event.size() << "," << rational_str(m) << "," << decimal6(m)
         << "," << event_hex(r.event) << "\n";
      return os.str();
    }
  }
  throw Error("unknown report format");
}

std::string emit_witness(const WitnessReport& r, ReportFormat f) {
  const WitnessResult& w = r.result;
  switch (f) {
    case ReportFormat::Text: {
      std::ostringstream os;
      os << "formula: " << r.formula << "\n";
      os << "var: " << r.var << "\n";
      os << "policy: " << policy_name(r.policy) << "\n";
      os << "witness: " << rv_str(w.witness)
         << (w.in_family ? " (in family)" : " (not in family)") << "\n";
      os << "target: " << event_str(w.target) << "\n";
      os << "event: " << event_str(w.event) << "\n";
      os << "gap: " << measure_str(w.gap) << "\n";
      if (!w.trace.empty()) {
        os << "trace:\n";
        trace_lines(os, w.trace, "  ");
      }
      return os.str();
    }
    case ReportFormat::Json: {
      ojson j;
      j["formula"] = r.formula;
      j["var"] = r.var;
      j["policy"] = policy_name(r.policy);
      j["witness"] = rv_json(w.witness);
      j["in_family"] = w.in_family;
      j["target"] = event_json(w.target);
      j["event"] = event_json(w.event);
      j["gap"] = measure_json(w.gap);
      j["trace"] = w.trace;
      return j.dump(2) + "\n";
    }
    case ReportFormat::Csv: {
      std::ostringstream os;
      os << "var,policy,witness,in_family,gap,target_measure,event_measure\n";
      os << csv_cell(r.var) << "," << policy_name(r.policy) << ","
         << csv_cell(w.witness ? w.witness->name() : "") << ","
         << (w.in_family ? "yes" : "no") << "," << rational_str(w.gap) << ","
         << rational_str(measure(w.target)) << ","
         << rational_str(measure(w.event)) << "\n";
      return os.str();
    }
  }
  throw Error("unknown report format");
}

std::string emit_skolem(const SkolemReport& r, ReportFormat f) {
  const SkolemChain& c = r.chain;
  switch (f) {
    case ReportFormat::Text: {
      std::ostringstream os;
      os << "formula: " << render_formula(*c.formula) << "\n";
      os << "policy: " << policy_name(r.policy) << "\n";
      os << "base: " << event_str(c.base) << "\n";
      for (std::size_t i = 0; i < c.stages.size(); ++i) {
        const SkolemStage& st = c.stages[i];
        os << "stage " << (i + 1) << ": "
           << (st.quant == Formula::Kind::Exists ? "exists " : "forall ")
           << st.var << "\n";
        os << "  witness: " << rv_str(st.witness)
           << (st.in_family ? " (in family)" : " (not in family)")
           << (st.table_defined ? " (table-defined)" : "") << "\n";
        os << "  value: " << event_str(st.value) << "\n";
        os << "  delta: " << measure_str(st.delta) << "\n";
        trace_lines(os, st.trace, "  ");
      }
      os << "matrix: " << event_str(c.matrix_event) << "\n";
      return os.str();
    }
    case ReportFormat::Json: {
      ojson j;
      j["formula"] = render_formula(*c.formula);
      j["policy"] = policy_name(r.policy);
      j["base"] = event_json(c.base);
      ojson stages = ojson::array();
      for (const auto& st : c.stages) {
        ojson sj;
        sj["quant"] = st.quant == Formula::Kind::Exists ? "exists" : "forall";
        sj["var"] = st.var;
        sj["witness"] = rv_json(st.witness);
        sj["in_family"] = st.in_family;
        sj["table_defined"] = st.table_defined;
        sj["value"] = event_json(st.value);
        sj["delta"] = measure_json(st.delta);
        sj["trace"] = st.trace;
        stages.push_back(std::move(sj));
      }
      j["stages"] = std::move(stages);
      j["matrix"] = event_json(c.matrix_event);
      return j.dump(2) + "\n";
    }
    case ReportFormat::Csv: {
      std::ostringstream os;
      os << "stage,quant,var,witness,in_family,table_defined,delta\n";
      for (std::size_t i = 0; i < c.stages.size(); ++i) {
        const SkolemStage& st = c.stages[i];
        os << (i + 1) << ","
           << (st.quant == Formula::Kind::Exists ? "exists" : "forall") << ","
           << csv_cell(st.var) << ","
           << csv_cell(st.witness ? st.witness->name() : "") << ","
           << (st.in_family ? "yes" : "no") << ","
           << (st.table_defined ? "yes" : "no") << ","
           << rational_str(st.delta) << "\n";
      }
      return os.str();
    }
  }
  throw Error("unknown report format");
}

std::string emit_saturation(const SaturationReport& r, ReportFormat f) {
  switch (f) {
    case ReportFormat::Text: {
      std::ostringstream os;
      os << "kind: " << report_kind_name(r.kind) << "\n";
      if (r.kind != ReportKind::Check)
        os << "policy: " << policy_name(r.policy) << "\n";
      os << "var: " << r.var << "\n";
      os << "eps: " << rational_str(r.eps) << "\n";
      os << "stage: " << r.stage << " of " << r.steps.size() << "\n";
      if (r.thinned) {
        os << "thinned: kept";
        for (std::size_t k : r.kept) os << " " << k;
        os << "\n";
      }
      os << "witness: " << rv_str(r.witness)
         << (r.witness_in_family ? " (in family)" : " (not in family)")
         << "\n";
      if (r.kind == ReportKind::RealizeExistential)
        os << "z_witness: " << rv_str(r.z_witness) << " (closure added "
           << r.closure_added << " members)\n";
      if (r.lhs) os << "lhs: " << event_str(*r.lhs) << "\n";
      if (r.rhs) os << "rhs: " << event_str(*r.rhs) << "\n";
      os << "defect: " << measure_str(r.defect) << "\n";
      os << "realized_mod_eps: " << (r.realized_mod_eps ? "yes" : "no")
         << "\n";
      os << "full: lhs " << measure_str(r.full_lhs_measure) << " rhs "
         << measure_str(r.full_rhs_measure) << " defect "
         << measure_str(r.full_defect) << "\n";
      os << "profile:\n";
      profile_text(os, r.profile);
      if (!r.x_profile.empty()) {
        os << "x_profile:\n";
        profile_text(os, r.x_profile);
      }
      if (!r.reduced.empty()) {
        os << "reduced:\n";
        for (std::size_t k = 0; k < r.reduced.size(); ++k)
          os << "  C" << (k + 1) << ": " << render_formula(*r.reduced[k])
             << "\n";
      }
      os << "steps:\n";
      for (const auto& st : r.steps) {
        os << "  k=" << st.k << " A: " << render_formula(*st.chain_formula)
           << "\n";
        os << "    witness: " << rv_str(st.witness)
           << (st.witness_in_family ? " (in family)" : " (not in family)");
        if (st.witness_level) os << " level " << *st.witness_level;
        os << "\n";
        os << "    gap: " << measure_str(st.witness_gap)
           << " mono_loss: " << measure_str(st.mono_loss)
           << " flags: " << st.flags() << "\n";
        if (st.raw_event) os << "    U: " << event_str(*st.raw_event) << "\n";
        if (st.mono_event && st.mono_loss != 0)
          os << "    U_mono: " << event_str(*st.mono_event) << "\n";
      }
      return os.str();
    }
    case ReportFormat::Json: {
      ojson j;
      j["kind"] = report_kind_name(r.kind);
      if (r.kind != ReportKind::Check) j["policy"] = policy_name(r.policy);
      j["var"] = r.var;
      j["eps"] = measure_json(r.eps);
      j["stage"] = r.stage;
      j["prefix"] = r.prefix;
      j["thinned"] = r.thinned;
      if (r.thinned) j["kept"] = r.kept;
      j["witness"] = rv_json(r.witness);
      j["witness_in_family"] = r.witness_in_family;
      if (r.kind == ReportKind::RealizeExistential) {
        j["z_witness"] = rv_json(r.z_witness);
        j["closure_added"] = r.closure_added;
        ojson red = ojson::array();
        for (const auto& c : r.reduced) red.push_back(render_formula(*c));
        j["reduced"] = std::move(red);
      }
      if (r.lhs) j["lhs"] = event_json(*r.lhs);
      if (r.rhs) j["rhs"] = event_json(*r.rhs);
      j["defect"] = measure_json(r.defect);
      j["realized_mod_eps"] = r.realized_mod_eps;
      j["full_lhs"] = measure_json(r.full_lhs_measure);
      j["full_rhs"] = measure_json(r.full_rhs_measure);
      j["full_defect"] = measure_json(r.full_defect);
      j["profile"] = profile_json(r.profile);
      if (!r.x_profile.empty()) j["x_profile"] = profile_json(r.x_profile);
      ojson steps = ojson::array();
      for (const auto& st : r.steps) {
        ojson sj;
        sj["k"] = st.k;
        sj["formula"] = render_formula(*st.chain_formula);
        sj["witness"] = rv_json(st.witness);
        sj["in_family"] = st.witness_in_family;
        if (st.witness_level) sj["witness_level"] = *st.witness_level;
        sj["gap"] = measure_json(st.witness_gap);
        sj["mono_loss"] = measure_json(st.mono_loss);
        if (st.exists_event) sj["exists"] = event_json(*st.exists_event);
        if (st.raw_event) sj["U"] = event_json(*st.raw_event);
        if (st.mono_event) sj["U_mono"] = event_json(*st.mono_event);
        sj["flags"] = st.flags();
        steps.push_back(std::move(sj));
      }
      j["steps"] = std::move(steps);
      return j.dump(2) + "\n";
    }
    case ReportFormat::Csv: {
      std::ostringstream os;
      profile_csv(os, r.profile);
      return os.str();
    }
  }
  throw Error("unknown report format");
}

std::string emit_demo(const DemoResult& d, ReportFormat f) {
  switch (f) {
    case ReportFormat::Text: {
      std::ostringstream os;
      os << "universal failure demo\n";
      os << "n: " << d.n << " levels: " << d.levels
         << " samples: " << d.samples << " seed: " << d.seed
         << " horizon: " << d.horizon << " depth: " << d.depth << "\n";
      os << "budgets:";
      for (std::size_t l = 1; l <= d.budget_exponents.size(); ++l)
        os << " level" << l << "=2^" << d.budget_exponents[l - 1];
      os << "\n";
      os << "family: " << d.family_size << " members, core " << d.core_size
         << "\n";
      os << "type:\n";
      for (std::size_t k = 0; k < d.type.members.size(); ++k)
        os << "  A" << (k + 1) << ": " << render_formula(*d.type.members[k])
           << "\n";
      os << "prefix:\n";
      os << "  k | exists | LHS_k\n";
      for (const auto& row : d.prefix)
        os << "  " << row.k << " | " << measure_str(row.exists_measure)
           << " | " << measure_str(row.lhs_running) << "\n";
      os << "LHS_" << d.horizon << ": " << measure_str(d.lhs_final) << "\n";
      os << "deep meet (depth " << d.depth
         << "): max " << measure_str(d.deep_meet_max) << " at "
         << d.deep_meet_argmax << "\n";
      for (const auto& [name, m] : d.deep_meet)
        os << "  " << name << ": " << measure_str(m) << "\n";
      os << "squeeze:\n";
      os << "  level | budget | value | bits | matched_by | at_level | "
            "penalty | note\n";
      for (const auto& row : d.squeeze) {
        os << "  " << row.level << " | 2^" << row.budget_exponent << " | "
           << demo_value_str(row) << " | " << row.value_bits << " | "
           << (row.matched_by.empty() ? "-" : row.matched_by) << " | ";
        if (row.matched_level)
          os << *row.matched_level;
        else
          os << "-";
        os << " | " << measure_str(row.penalty) << " | "
           << (row.note.empty() ? "-" : row.note) << "\n";
      }
      return os.str();
    }
    case ReportFormat::Json: {
      ojson j;
      j["n"] = d.n;
      j["levels"] = d.levels;
      j["samples"] = d.samples;
      j["seed"] = d.seed;
      j["horizon"] = d.horizon;
      j["depth"] = d.depth;
      j["budget_exponents"] = d.budget_exponents;
      j["family_size"] = d.family_size;
      j["core_size"] = d.core_size;
      ojson type = ojson::array();
      for (const auto& m : d.type.members) type.push_back(render_formula(*m));
      j["type"] = std::move(type);
      ojson prefix = ojson::array();
      for (const auto& row : d.prefix) {
        ojson pj;
        pj["k"] = row.k;
        pj["exists"] = measure_json(row.exists_measure);
        pj["lhs_running"] = measure_json(row.lhs_running);
        prefix.push_back(std::move(pj));
      }
      j["prefix"] = std::move(prefix);
      j["lhs_final"] = measure_json(d.lhs_final);
      ojson deep = ojson::array();
      for (const auto& [name, m] : d.deep_meet) {
        ojson dj;
        dj["member"] = name;
        dj["measure"] = measure_json(m);
        deep.push_back(std::move(dj));
      }
      j["deep_meet"] = std::move(deep);
      j["deep_meet_max"] = measure_json(d.deep_meet_max);
      j["deep_meet_argmax"] = d.deep_meet_argmax;
      ojson squeeze = ojson::array();
      for (const auto& row : d.squeeze) {
        ojson sj;
        sj["level"] = row.level;
        sj["budget_exponent"] = row.budget_exponent;
        sj["value"] = demo_value_str(row);
        sj["value_bits"] = row.value_bits;
        sj["matched_by"] = row.matched_by;
        if (row.matched_level) sj["matched_level"] = *row.matched_level;
        sj["penalty"] = measure_json(row.penalty);
        if (!row.note.empty()) sj["note"] = row.note;
        squeeze.push_back(std::move(sj));
      }
      j["squeeze"] = std::move(squeeze);
      return j.dump(2) + "\n";
    }
    case ReportFormat::Csv: {
      std::ostringstream os;
      os << "# prefix\n";
      os << "k,exists,lhs_running\n";
      for (const auto& row : d.prefix)
        os << row.k << "," << rational_str(row.exists_measure) << ","
           << rational_str(row.lhs_running) << "\n";
      os << "# deep_meet\n";
      os << "member,measure\n";
      for (const auto& [name, m] : d.deep_meet)
        os << csv_cell(name) << "," << rational_str(m) << "\n";
      os << "# squeeze\n";
      os << "level,budget_exponent,value,value_bits,matched_by,matched_level,"
            "penalty,note\n";
      for (const auto& row : d.squeeze) {
        os << row.level << "," << row.budget_exponent << ","
           << demo_value_str(row) << "," << row.value_bits << ","
           << csv_cell(row.matched_by) << ",";
        if (row.matched_level) os << *row.matched_level;
        os << "," << rational_str(row.penalty) << "," << csv_cell(row.note)
           << "\n";
      }
      return os.str();
    }
  }
  throw Error("unknown report format");
}

}  // namespace kforge
