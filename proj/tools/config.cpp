#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace fermibath::cli {

ConfigError::ConfigError(const std::string& message, std::size_t line, std::string key)
    : std::runtime_error(message), line_(line), key_(std::move(key)) {}

namespace {

std::size_t line_of(const YAML::Node& n) { return static_cast<std::size_t>(n.Mark().line + 1); }

[[noreturn]] void fail(const YAML::Node& n, const std::string& key, const std::string& what) {
  const std::size_t line = n.Mark().line >= 0 ? line_of(n) : 0;
  std::ostringstream os;
  if (line) os << "line " << line << ": ";
  os << key << ": " << what;
  throw ConfigError(os.str(), line, key);
}

std::string scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) fail(n, key, "expected a single value");
  return n.Scalar();
}

double to_double(const YAML::Node& n, const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(n, key, "'" + text + "' is not a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) fail(n, key, "'" + text + "' is not a number");
  if (!std::isfinite(v)) fail(n, key, "value must be finite");
  return v;
}

double read_double(const YAML::Node& n, const std::string& key) { return to_double(n, key, scalar(n, key)); }

std::size_t read_count(const YAML::Node& n, const std::string& key) {
  const double v = read_double(n, key);
  if (v < 0 || v != std::floor(v) || v > 9.0e15) fail(n, key, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool read_bool(const YAML::Node& n, const std::string& key) {
  const std::string s = scalar(n, key);
  if (s == "true" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "no" || s == "off") return false;
  fail(n, key, "expected true or false");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<std::string> read_string_list(const YAML::Node& n, const std::string& key) {
  std::vector<std::string> out;
  if (n.IsSequence()) {
    for (const auto& item : n) out.push_back(scalar(item, key));
  } else {
    out = split_list(scalar(n, key));
  }
  if (out.empty()) fail(n, key, "list must not be empty");
  for (const auto& s : out)
    if (s.empty()) fail(n, key, "empty list entry");
  return out;
}

std::vector<double> read_double_list(const YAML::Node& n, const std::string& key) {
  std::vector<double> out;
  if (n.IsSequence()) {
    for (const auto& item : n) out.push_back(read_double(item, key));
    if (out.empty()) fail(n, key, "list must not be empty");
    return out;
  }
  for (const auto& s : read_string_list(n, key)) out.push_back(to_double(n, key, s));
  return out;
}

// shortest representation that reads back identically
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

using Reader = std::function<void(RunConfig&, const YAML::Node&, const std::string&)>;
using Writer = std::function<void(YAML::Emitter&, const RunConfig&)>;

struct Field {
  std::string section;
  std::string key;
  Reader read;
  Writer write;
};

void emit_list(YAML::Emitter& e, const std::vector<double>& v) {
  if (v.size() == 1) {
    e << format_double(v[0]);
    return;
  }
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : v) e << format_double(x);
  e << YAML::EndSeq;
}

void emit_list(YAML::Emitter& e, const std::vector<std::string>& v) {
  if (v.size() == 1) {
    e << v[0];
    return;
  }
  e << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : v) e << x;
  e << YAML::EndSeq;
}

template <class T, class M>
Field number(const char* section, const char* key, M member) {
  return {section, key,
          [member](RunConfig& c, const YAML::Node& n, const std::string& k) {
            if constexpr (std::is_same_v<T, double>)
              member(c) = read_double(n, k);
            else
              member(c) = static_cast<T>(read_count(n, k));
          },
          [member](YAML::Emitter& e, const RunConfig& c) {
            if constexpr (std::is_same_v<T, double>)
              e << format_double(member(c));
            else
              e << std::to_string(member(c));
          }};
}

template <class M>
Field text(const char* section, const char* key, M member) {
  return {section, key,
          [member](RunConfig& c, const YAML::Node& n, const std::string& k) { member(c) = scalar(n, k); },
          [member](YAML::Emitter& e, const RunConfig& c) {
            const std::string& s = member(c);
            if (s.empty())
              e << YAML::DoubleQuoted << s;
            else
              e << s;
          }};
}

template <class M>
Field flag(const char* section, const char* key, M member) {
  return {section, key,
          [member](RunConfig& c, const YAML::Node& n, const std::string& k) { member(c) = read_bool(n, k); },
          [member](YAML::Emitter& e, const RunConfig& c) {
            e << (member(c) ? "true" : "false");
          }};
}

template <class M>
Field numbers(const char* section, const char* key, M member, bool allow_empty = false) {
  return {section, key,
          [member, allow_empty](RunConfig& c, const YAML::Node& n, const std::string& k) {
            if (allow_empty && n.IsSequence() && n.size() == 0)
              member(c).clear();
            else
              member(c) = read_double_list(n, k);
          },
          [member, allow_empty](YAML::Emitter& e, const RunConfig& c) {
            const auto& v = member(c);
            if (v.empty() && allow_empty)
              e << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
            else
              emit_list(e, v);
          }};
}

template <class M>
Field names(const char* section, const char* key, M member) {
  return {section, key,
          [member](RunConfig& c, const YAML::Node& n, const std::string& k) { member(c) = read_string_list(n, k); },
          [member](YAML::Emitter& e, const RunConfig& c) { emit_list(e, member(c)); }};
}

#define FB_MEMBER(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> all = {
      text("", "command", FB_MEMBER(command)),
      number<unsigned>("", "jobs", FB_MEMBER(jobs)),
      numbers("model", "Omega", FB_MEMBER(model.Omega)),
      numbers("model", "g0", FB_MEMBER(model.g0)),
      numbers("model", "gamma", FB_MEMBER(model.gamma)),
      numbers("model", "T", FB_MEMBER(model.T)),
      numbers("model", "mu", FB_MEMBER(model.mu)),
      names("model", "statistics", FB_MEMBER(model.statistics)),
      numbers("model", "n0", FB_MEMBER(model.n0)),
      number<double>("quadrature", "rel_tol", FB_MEMBER(quadrature.rel_tol)),
      number<double>("quadrature", "abs_tol", FB_MEMBER(quadrature.abs_tol)),
      number<std::size_t>("quadrature", "max_panels", FB_MEMBER(quadrature.max_panels)),
      number<double>("quadrature", "panel_scale", FB_MEMBER(quadrature.panel_scale)),
      number<double>("quadrature", "w_max", FB_MEMBER(quadrature.w_max)),
      number<unsigned>("quadrature", "threads", FB_MEMBER(quadrature.threads)),
      number<double>("grid", "t_max", FB_MEMBER(grid.t_max)),
      number<std::size_t>("grid", "points", FB_MEMBER(grid.points)),
      text("grid", "scan", FB_MEMBER(grid.scan)),
      number<double>("grid", "from", FB_MEMBER(grid.from)),
      number<double>("grid", "to", FB_MEMBER(grid.to)),
      number<std::size_t>("grid", "count", FB_MEMBER(grid.count)),
      text("grid", "spacing", FB_MEMBER(grid.spacing)),
      numbers("grid", "values", FB_MEMBER(grid.values), true),
      text("output", "path", FB_MEMBER(output.path)),
      text("output", "format", FB_MEMBER(output.format)),
      flag("output", "transport", FB_MEMBER(output.transport)),
      number<std::size_t>("oracle", "modes", FB_MEMBER(oracle.modes)),
      number<double>("oracle", "w_max", FB_MEMBER(oracle.w_max)),
      text("oracle", "initial", FB_MEMBER(oracle.initial)),
  };
  return all;
}

#undef FB_MEMBER

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

bool is_section(const std::string& name) {
  for (const auto& f : fields())
    if (!f.section.empty() && f.section == name) return true;
  return false;
}

std::string dotted(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

void read_map(RunConfig& c, const YAML::Node& map, const std::string& section) {
  std::set<std::string> seen;
  for (const auto& kv : map) {
    const std::string key = kv.first.Scalar();
    const std::string name = dotted(section, key);
    if (!seen.insert(key).second) fail(kv.first, name, "duplicate key");
    if (section.empty() && is_section(key)) {
      if (!kv.second.IsMap() && !kv.second.IsNull()) fail(kv.second, name, "section must be a mapping");
      if (kv.second.IsMap()) read_map(c, kv.second, key);
      continue;
    }
    const Field* f = find_field(section, key);
    if (!f) fail(kv.first, name, section.empty() ? "unknown key" : "unknown key in section " + section);
    if (kv.second.IsNull()) fail(kv.second, name, "missing value");
    f->read(c, kv.second, name);
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg,
                      static_cast<std::size_t>(e.mark.line + 1));
  }
  RunConfig c;
  if (root.IsNull()) return c;
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping of sections", 1);
  read_map(c, root, "");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what(), e.line(), e.key());
  }
}

std::string serialize_config(const RunConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  std::string open;
  for (const auto& f : fields()) {
    if (f.section != open) {
      if (!open.empty()) e << YAML::EndMap;
      open = f.section;
      e << YAML::Key << open << YAML::Value << YAML::BeginMap;
    }
    e << YAML::Key << f.key << YAML::Value;
    f.write(e, c);
  }
  if (!open.empty()) e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--set expects section.key=value, got '" + assignment + "'");
  const std::string name = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  const auto dot = name.find('.');
  const std::string section = dot == std::string::npos ? "" : name.substr(0, dot);
  const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
  const Field* f = find_field(section, key);
  if (!f) throw ConfigError("--set " + name + ": unknown key", 0, name);
  YAML::Node node;
  try {
    node = YAML::Load(value);
  } catch (const YAML::ParserException& ex) {
    throw ConfigError("--set " + name + ": " + ex.msg, 0, name);
  }
  if (node.IsNull()) node = YAML::Node(value);
  try {
    f->read(c, node, name);
  } catch (const ConfigError& ex) {
    throw ConfigError(std::string("--set ") + ex.what(), 0, name);
  }
}

void apply_oracle_flag(RunConfig& c, const std::string& flag) {
  for (const auto& item : split_list(flag)) {
    const auto eq = item.find('=');
    const std::string key = eq == std::string::npos ? "N" : item.substr(0, eq);
    const std::string value = eq == std::string::npos ? item : item.substr(eq + 1);
    if (key == "N" || key == "modes")
      apply_override(c, "oracle.modes=" + value);
    else if (key == "w_max")
      apply_override(c, "oracle.w_max=" + value);
    else if (key == "initial")
      apply_override(c, "oracle.initial=" + value);
    else
      throw ConfigError("--with-oracle: unknown entry '" + item + "' (expected N=..., w_max=..., initial=...)");
  }
  if (c.oracle.modes == 0) throw ConfigError("--with-oracle: N must be positive");
}

void check_config(const RunConfig& c) {
  auto need = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key + ": " + what, 0, key);
  };
  static const std::set<std::string> commands{"", "evolve", "scan", "oracle-compare", "kernel-dump"};
  need(commands.count(c.command) > 0, "command", "unknown command '" + c.command + "'");
  need(c.jobs >= 1, "jobs", "must be >= 1");
  for (const auto& s : c.model.statistics)
    need(s == "fermi" || s == "bose", "model.statistics", "unknown statistics '" + s + "' (fermi or bose)");
  need(c.grid.t_max > 0, "grid.t_max", "must be > 0");
  need(c.grid.scan == "T" || c.grid.scan == "g0" || c.grid.scan == "mu", "grid.scan", "must be T, g0 or mu");
  need(c.grid.spacing == "linear" || c.grid.spacing == "log", "grid.spacing", "must be linear or log");
  if (c.grid.values.empty()) {
    need(c.grid.count >= 1, "grid.count", "must be >= 1");
    if (c.grid.spacing == "log")
      need(c.grid.from > 0 && c.grid.to > 0, "grid.from", "log spacing needs positive bounds");
  }
  need(c.output.format == "csv" || c.output.format == "json", "output.format", "must be csv or json");
  need(!c.output.path.empty(), "output.path", "must not be empty");
  need(c.oracle.initial == "product" || c.oracle.initial == "dressed", "oracle.initial",
       "must be product or dressed");
  need(c.oracle.w_max >= 0, "oracle.w_max", "must be >= 0");
  need(c.quadrature.rel_tol > 0, "quadrature.rel_tol", "must be > 0");
  need(c.quadrature.abs_tol > 0, "quadrature.abs_tol", "must be > 0");
  need(c.quadrature.panel_scale > 0, "quadrature.panel_scale", "must be > 0");
  need(c.quadrature.w_max >= 0, "quadrature.w_max", "must be >= 0");
  need(c.quadrature.max_panels >= 4, "quadrature.max_panels", "must be >= 4");
}

std::vector<Combination> expand_model(const ModelBlock& m, const std::string& skip, bool statistics_fixed) {
  struct Axis {
    std::string name;
    std::size_t size;
  };
  auto len = [&](const std::string& name, std::size_t n) { return name == skip ? std::size_t(1) : n; };
  const std::vector<Axis> axes = {
      {"Omega", len("Omega", m.Omega.size())}, {"g0", len("g0", m.g0.size())},
      {"gamma", len("gamma", m.gamma.size())}, {"T", len("T", m.T.size())},
      {"mu", len("mu", m.mu.size())},
      {"statistics", statistics_fixed ? std::size_t(1) : m.statistics.size()},
      {"n0", len("n0", m.n0.size())}};
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size;

  std::vector<Combination> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t idx[7];
    std::size_t rest = flat;
    for (int k = 6; k >= 0; --k) {
      idx[k] = rest % axes[k].size;
      rest /= axes[k].size;
    }
    Combination c;
    fb_default_params(&c.params);
    c.params.omega = m.Omega[idx[0]];
    c.params.g0 = m.g0[idx[1]];
    c.params.gamma = m.gamma[idx[2]];
    c.params.temperature = m.T[idx[3]];
    c.params.mu = m.mu[idx[4]];
    c.params.statistics = m.statistics[idx[5]] == "bose" ? FB_BOSE : FB_FERMI;
    c.params.n0 = m.n0[idx[6]];
    const std::string values[7] = {format_double(c.params.omega), format_double(c.params.g0),
                                   format_double(c.params.gamma), format_double(c.params.temperature),
                                   format_double(c.params.mu), m.statistics[idx[5]],
                                   format_double(c.params.n0)};
    for (int k = 0; k < 7; ++k)
      if (axes[k].size > 1) c.varying.push_back(axes[k].name + "=" + values[k]);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> scan_values(const GridBlock& g) {
  if (!g.values.empty()) return g.values;
  std::vector<double> out(g.count);
  if (g.count == 1) {
    out[0] = g.from;
    return out;
  }
  for (std::size_t i = 0; i < g.count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(g.count - 1);
    out[i] = g.spacing == "log" ? g.from * std::pow(g.to / g.from, f) : g.from + (g.to - g.from) * f;
  }
  out.back() = g.to;
  return out;
}

fb_quadrature to_quadrature(const QuadratureBlock& q) {
  fb_quadrature out;
  fb_default_quadrature(&out);
  out.rel_tol = q.rel_tol;
  out.abs_tol = q.abs_tol;
  out.max_panels = q.max_panels;
  out.panel_scale = q.panel_scale;
  out.w_max = q.w_max;
  out.threads = q.threads;
  return out;
}

}  // namespace fermibath::cli
