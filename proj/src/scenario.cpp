#include "kforge/scenario.hpp"

#include <fstream>
#include <sstream>

namespace kforge {

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::vector<Line> content_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream is(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(is, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto end = line.find_last_not_of(" \t\r");
    if (end == std::string::npos) continue;
    line.erase(end + 1);
    auto begin = line.find_first_not_of(" \t");
    out.push_back({no, line.substr(begin)});
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& msg) {
  throw Error(path + ":" + std::to_string(line) + ": " + msg);
}

bool is_natural(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

Natural hex_natural(const std::string& s, const std::string& path, std::size_t line) {
  if (s.empty()) fail(path, line, "empty point");
  Natural v = 0;
  for (char c : s) {
    unsigned nib;
    if (c >= '0' && c <= '9') nib = c - '0';
    else if (c >= 'a' && c <= 'f') nib = 10 + (c - 'a');
    else if (c >= 'A' && c <= 'F') nib = 10 + (c - 'A');
    else fail(path, line, std::string("bad hex digit '") + c + "'");
    v = (v << 4) | nib;
  }
  return v;
}

std::string key_value(const std::string& tok, const std::string& key,
                      const std::string& path, std::size_t line) {
  if (tok.rfind(key + "=", 0) != 0)
    fail(path, line, "expected " + key + "=<value>, got '" + tok + "'");
  return tok.substr(key.size() + 1);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& display_path,
                        const std::string& base_dir) {
  Scenario s;
  auto lines = content_lines(text);

  // pass 1: the space and the declared names
  for (const auto& ln : lines) {
    auto toks = split_ws(ln.text);
    if (toks.empty()) continue;
    if (toks[0] == "space") {
      if (s.space) fail(display_path, ln.number, "duplicate space section");
      if (toks.size() < 3) fail(display_path, ln.number, "incomplete space line");
      std::string nb = key_value(toks[1], "n_bits", display_path, ln.number);
      if (!is_natural(nb)) fail(display_path, ln.number, "bad n_bits value");
      unsigned n_bits = static_cast<unsigned>(std::stoul(nb));
      // only the constructors go through the wrapping catch; fail() is
      // already prefixed
      auto build = [&](auto&& make) {
        try {
          s.space = make();
        } catch (const Error& e) {
          fail(display_path, ln.number, e.what());
        }
      };
      if (toks[2] == "exhaustive") {
        if (toks.size() != 3) fail(display_path, ln.number, "trailing tokens after 'exhaustive'");
        build([&] { return SampleSpace::exhaustive(n_bits); });
      } else if (toks[2] == "points:") {
        std::vector<Natural> pts;
        for (std::size_t i = 3; i < toks.size(); ++i)
          pts.push_back(hex_natural(toks[i], display_path, ln.number));
        build([&] { return SampleSpace::explicit_points(n_bits, std::move(pts)); });
      } else {
        std::string m = key_value(toks[2], "samples", display_path, ln.number);
        if (toks.size() != 4) fail(display_path, ln.number, "expected seed=<s>");
        std::string sd = key_value(toks[3], "seed", display_path, ln.number);
        if (!is_natural(m) || !is_natural(sd))
          fail(display_path, ln.number, "bad samples/seed value");
        build([&] { return SampleSpace::sampled(n_bits, std::stoull(m), std::stoull(sd)); });
      }
    } else if (toks[0] == "rv") {
      if (toks.size() < 3) fail(display_path, ln.number, "incomplete rv line");
      if (!s.rv_names.insert(toks[1]).second)
        fail(display_path, ln.number, "duplicate name '" + toks[1] + "'");
    }
  }
  if (!s.space) throw Error(display_path + ": missing space section");

  // pass 2: everything else, in order
  bool have_eps = false, have_family = false;
  std::map<std::size_t, std::vector<std::string>> levels;
  for (const auto& ln : lines) {
    auto toks = split_ws(ln.text);
    if (toks[0] == "space") continue;
    if (toks[0] == "eps") {
      if (have_eps) fail(display_path, ln.number, "duplicate eps section");
      if (toks.size() != 2) fail(display_path, ln.number, "expected eps <rational>");
      try {
        s.eps = parse_rational(toks[1]);
      } catch (const Error& e) {
        fail(display_path, ln.number, e.what());
      }
      if (s.eps < 0 || s.eps > 1) fail(display_path, ln.number, "eps must lie in [0,1]");
      have_eps = true;
      continue;
    }
    if (toks[0] == "rv") {
      const std::string& name = toks[1];
      const std::string& kind = toks[2];
      auto declare = [&](auto&& make) {
        try {
          s.decls.push_back(make());
        } catch (const Error& e) {
          fail(display_path, ln.number, e.what());
        }
      };
      if (kind == "builtin") {
        if (toks.size() != 4 || toks[3] != "identity")
          fail(display_path, ln.number, "expected 'builtin identity'");
        declare([&] { return RandomVariable::identity(name, s.space); });
      } else if (kind == "table") {
        std::vector<Natural> values;
        for (std::size_t i = 3; i < toks.size(); ++i) {
          if (!is_natural(toks[i]))
            fail(display_path, ln.number, "bad table value '" + toks[i] + "'");
          values.emplace_back(toks[i]);
        }
        declare([&] { return RandomVariable::table(name, s.space, std::move(values)); });
      } else if (kind == "const") {
        if (toks.size() != 4 || !is_natural(toks[3]))
          fail(display_path, ln.number, "expected 'const <value>'");
        declare([&] { return RandomVariable::constant(name, s.space, Natural(toks[3])); });
      } else if (kind == "circuit") {
        if (toks.size() != 4)
          fail(display_path, ln.number, "expected 'circuit <path>'");
        std::string path = toks[3];
        std::string resolved =
            (path.front() == '/' || base_dir.empty()) ? path : base_dir + "/" + path;
        declare([&] { return RandomVariable::circuit(name, s.space, load_circuit(resolved)); });
        s.circuit_paths[name] = path;
      } else {
        fail(display_path, ln.number, "unknown rv backing '" + kind + "'");
      }
      s.consts[name] = s.decls.back();
      continue;
    }
    if (toks[0] == "family" || toks[0] == "family:") {
      have_family = true;
      if (toks[0] == "family:") {
        if (!s.family_names.empty() || !levels.empty())
          fail(display_path, ln.number, "duplicate family section");
        for (std::size_t i = 1; i < toks.size(); ++i) s.family_names.push_back(toks[i]);
        if (s.family_names.empty()) fail(display_path, ln.number, "empty family");
        continue;
      }
      // family level <k>: <names>
      if (toks.size() < 3 || toks[1] != "level")
        fail(display_path, ln.number, "expected 'family: <names>' or 'family level <k>: <names>'");
      std::string kd = toks[2];
      if (!kd.empty() && kd.back() == ':') kd.pop_back();
      if (!is_natural(kd) || kd == "0") fail(display_path, ln.number, "bad level index");
      if (!s.family_names.empty())
        fail(display_path, ln.number, "cannot mix family forms");
      std::size_t k = std::stoul(kd);
      auto& names = levels[k];
      if (!names.empty()) fail(display_path, ln.number, "duplicate level " + kd);
      for (std::size_t i = 3; i < toks.size(); ++i) names.push_back(toks[i]);
      if (names.empty()) fail(display_path, ln.number, "empty level " + kd);
      continue;
    }
    if (toks[0] == "formula") {
      // formula <name> := "<text>"
      auto pos = ln.text.find(":=");
      if (toks.size() < 3 || pos == std::string::npos)
        fail(display_path, ln.number, "expected 'formula <name> := \"<text>\"'");
      std::string name = toks[1];
      auto q1 = ln.text.find('"', pos);
      auto q2 = ln.text.rfind('"');
      if (q1 == std::string::npos || q2 <= q1)
        fail(display_path, ln.number, "formula text must be double-quoted");
      std::string body = ln.text.substr(q1 + 1, q2 - q1 - 1);
      for (const auto& [n, f] : s.formulas)
        if (n == name) fail(display_path, ln.number, "duplicate name '" + name + "'");
      try {
        s.formulas.emplace_back(name, parse_formula(body, &s.rv_names));
      } catch (const ParseError& e) {
        fail(display_path, ln.number, std::string("in formula: ") + e.what());
      }
      continue;
    }
    fail(display_path, ln.number, "unknown section '" + toks[0] + "'");
  }

  if (have_family) {
    std::vector<RvPtr> members;
    auto resolve = [&](const std::string& nm) -> RvPtr {
      auto it = s.consts.find(nm);
      if (it == s.consts.end())
        throw Error(display_path + ": family names undeclared rv '" + nm + "'");
      return it->second;
    };
    try {
      if (!levels.empty()) {
        std::size_t max_level = levels.rbegin()->first;
        Filtration filt;
        for (std::size_t k = 1; k <= max_level; ++k) {
          auto it = levels.find(k);
          if (it == levels.end())
            throw Error("filtration level " + std::to_string(k) + " missing");
          filt.level_names.push_back(it->second);
        }
        for (const auto& nm : filt.level_names[0]) {
          members.push_back(resolve(nm));
          s.family_names.push_back(nm);
        }
        s.filtration = filt;
        s.family = Family::make(s.space, std::move(members), std::move(filt));
      } else {
        for (const auto& nm : s.family_names) members.push_back(resolve(nm));
        s.family = Family::make(s.space, std::move(members));
      }
    } catch (const Error& e) {
      std::string what = e.what();
      if (what.rfind(display_path, 0) == 0) throw;
      throw Error(display_path + ": " + what);
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto slash = path.find_last_of('/');
  std::string dir = (slash == std::string::npos) ? "." : path.substr(0, slash);
  return parse_scenario(buf.str(), path, dir);
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "space n_bits=" << s.space->n_bits();
  switch (s.space->mode()) {
    case SampleSpace::Mode::Exhaustive:
      os << " exhaustive\n";
      break;
    case SampleSpace::Mode::Sampled:
      os << " samples=" << s.space->size() << " seed=" << s.space->seed() << "\n";
      break;
    case SampleSpace::Mode::Explicit: {
      os << " points:";
      for (const auto& p : s.space->points()) {
        std::ostringstream hex;
        hex << std::hex << p;
        os << " " << hex.str();
      }
      os << "\n";
      break;
    }
  }
  os << "eps " << rational_str(s.eps) << "\n";
  for (const auto& rv : s.decls) {
    os << "rv " << rv->name();
    switch (rv->backing()) {
      case RandomVariable::Backing::Identity:
        os << " builtin identity";
        break;
      case RandomVariable::Backing::Const:
        os << " const " << rv->value(0).str();
        break;
      case RandomVariable::Backing::Circuit:
        os << " circuit " << s.circuit_paths.at(rv->name());
        break;
      case RandomVariable::Backing::Table:
        os << " table";
        for (const auto& v : rv->table_values()) os << " " << v.str();
        break;
    }
    os << "\n";
  }
  if (s.filtration) {
    for (std::size_t k = 0; k < s.filtration->level_names.size(); ++k) {
      os << "family level " << (k + 1) << ":";
      for (const auto& nm : s.filtration->level_names[k]) os << " " << nm;
      os << "\n";
    }
  } else if (!s.family_names.empty()) {
    os << "family:";
    for (const auto& nm : s.family_names) os << " " << nm;
    os << "\n";
  }
  for (const auto& [name, f] : s.formulas)
    os << "formula " << name << " := \"" << render_formula(*f) << "\"\n";
  return os.str();
}

FormulaPtr scenario_formula(const Scenario& s, const std::string& text) {
  for (const auto& [name, f] : s.formulas)
    if (name == text) return f;
  return parse_formula(text, &s.rv_names);
}

Context make_context(const Scenario& s, unsigned workers,
                     std::optional<Rational> eps_override) {
  Context ctx;
  ctx.space = s.space;
  ctx.family = s.family;
  ctx.consts = s.consts;
  ctx.eps = eps_override ? *eps_override : s.eps;
  ctx.options.workers = workers;
  return ctx;
}

}  // namespace kforge
