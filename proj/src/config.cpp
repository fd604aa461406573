#include "qlcontrol/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qlc {

namespace pt = boost::property_tree;

const char *to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::State: return "state";
    case ExperimentKind::Control: return "control";
    case ExperimentKind::Relax: return "relax";
    case ExperimentKind::GapDemo: return "gap-demo";
    case ExperimentKind::VerifyHypotheses: return "verify-hypotheses";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string &s) {
  for (auto k : {ExperimentKind::State, ExperimentKind::Control, ExperimentKind::Relax,
                 ExperimentKind::GapDemo, ExperimentKind::VerifyHypotheses})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

namespace {

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string &key, const std::string &v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

template <class Int>
Int to_int(const std::string &key, const std::string &v) {
  Int x{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return x;
}

struct Field {
  std::function<std::string(const ExperimentConfig &)> get;
  std::function<void(ExperimentConfig &, const std::string &key, const std::string &)> set;
};

#define QLC_STR(path, member)                                                   \
  {                                                                             \
    path, Field {                                                               \
      [](const ExperimentConfig &c) { return c.member; },                       \
          [](ExperimentConfig &c, const std::string &, const std::string &v) { \
            c.member = v;                                                       \
          }                                                                     \
    }                                                                           \
  }
#define QLC_NUM(path, member)                                                   \
  {                                                                             \
    path, Field {                                                               \
      [](const ExperimentConfig &c) { return fmt(c.member); },                  \
          [](ExperimentConfig &c, const std::string &k, const std::string &v) { \
            c.member = to_double(k, v);                                         \
          }                                                                     \
    }                                                                           \
  }
#define QLC_INT(path, member)                                                   \
  {                                                                             \
    path, Field {                                                               \
      [](const ExperimentConfig &c) { return std::to_string(c.member); },       \
          [](ExperimentConfig &c, const std::string &k, const std::string &v) { \
            c.member = to_int<decltype(c.member)>(k, v);                        \
          }                                                                     \
    }                                                                           \
  }

// Ordered table of every accepted key.
const std::vector<std::pair<std::string, Field>> &fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"experiment.kind",
       {[](const ExperimentConfig &c) { return std::string(to_string(c.kind)); },
        [](ExperimentConfig &c, const std::string &, const std::string &v) {
          c.kind = parse_kind(v);
        }}},
      QLC_STR("experiment.instance", instance),
      QLC_INT("experiment.seed", seed),
      QLC_STR("experiment.out", out),
      QLC_INT("mesh.dimension", spec.dimension),
      QLC_INT("mesh.cells", spec.cells),
      QLC_STR("coefficients.regime", spec.regime),
      QLC_STR("coefficients.lower", spec.lower),
      QLC_NUM("coefficients.kappa", spec.kappa),
      QLC_NUM("coefficients.omega", spec.omega),
      {"coefficients.b",
       {[](const ExperimentConfig &c) {
          return c.spec.zero_order ? fmt(*c.spec.zero_order) : std::string("default");
        },
        [](ExperimentConfig &c, const std::string &k, const std::string &v) {
          if (v == "default")
            c.spec.zero_order.reset();
          else
            c.spec.zero_order = to_double(k, v);
        }}},
      QLC_STR("coefficients.flux", spec.flux),
      QLC_NUM("coefficients.a0", spec.a0),
      QLC_NUM("coefficients.lg", spec.lg),
      QLC_STR("coefficients.energy", spec.energy),
      QLC_NUM("coefficients.radius", spec.radius),
      QLC_NUM("coefficients.delta", spec.delta),
      QLC_NUM("coefficients.source_value", spec.source_value),
      QLC_STR("coefficients.source", spec.source),
      QLC_NUM("coefficients.source_scale", spec.source_scale),
      QLC_INT("coefficients.state_atoms", spec.state_atoms),
      QLC_INT("coefficients.control_atoms", spec.control_atoms),
      QLC_STR("cost.integrand", spec.cost),
      QLC_NUM("cost.cap", spec.cap),
      QLC_STR("cost.target", spec.target),
      QLC_NUM("cost.target_value", spec.target_value),
      QLC_STR("cost.regularizer", spec.regularizer),
      QLC_NUM("cost.M", spec.tychonov),
      QLC_NUM("solver.tolerance", solver.tolerance),
      QLC_INT("solver.max_iterations", solver.max_iterations),
      QLC_INT("solver.outer_iterations", solver.outer_iterations),
      QLC_INT("solver.line_search", solver.line_search),
      QLC_INT("solver.samples", solver.samples),
      QLC_INT("solver.starts", solver.starts),
      QLC_INT("solver.trials", solver.trials),
      QLC_NUM("solver.control_value", solver.control_value),
      {"solver.j_list",
       {[](const ExperimentConfig &c) {
          std::string s;
          for (std::size_t i = 0; i < c.solver.j_list.size(); ++i)
            s += (i ? "," : "") + std::to_string(c.solver.j_list[i]);
          return s;
        },
        [](ExperimentConfig &c, const std::string &k, const std::string &v) {
          c.solver.j_list.clear();
          std::stringstream ss(v);
          std::string item;
          while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(' ');
            const auto e = item.find_last_not_of(' ');
            if (b == std::string::npos) throw ConfigError(k + ": empty entry");
            c.solver.j_list.push_back(to_int<int>(k, item.substr(b, e - b + 1)));
          }
        }}},
  };
  return table;
}

#undef QLC_STR
#undef QLC_NUM
#undef QLC_INT

const Field *find_field(const std::string &path) {
  for (const auto &[k, f] : fields())
    if (k == path) return &f;
  return nullptr;
}

bool known_section(const std::string &s) {
  for (const auto &[k, f] : fields())
    if (k.compare(0, s.size() + 1, s + ".") == 0) return true;
  return false;
}

}  // namespace

ExperimentConfig parse_config(const std::string &text, const std::vector<std::string> &overrides) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  // Flatten to section.key and validate names.
  std::map<std::string, std::string> values;
  for (const auto &[section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside of any section");
    if (!known_section(section)) throw ConfigError("unknown section '" + section + "'");
    for (const auto &[key, leaf] : body) {
      const std::string path = section + "." + key;
      if (!find_field(path)) throw ConfigError("unknown key '" + path + "'");
      values[path] = leaf.data();
    }
  }
  for (const std::string &o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string path = trim(o.substr(0, eq));
    if (!find_field(path)) throw ConfigError("unknown key '" + path + "'");
    values[path] = trim(o.substr(eq + 1));
  }

  ExperimentConfig c;
  if (auto it = values.find("experiment.instance"); it != values.end()) c.instance = it->second;
  try {
    c.spec = builtin_spec(c.instance);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  for (const auto &[path, f] : fields())
    if (auto it = values.find(path); it != values.end()) f.set(c, path, it->second);
  return c;
}

ExperimentConfig load_config(const std::string &path, const std::vector<std::string> &overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string serialize_config(const ExperimentConfig &c) {
  std::ostringstream os;
  std::string section;
  for (const auto &[path, f] : fields()) {
    const auto dot = path.find('.');
    const std::string s = path.substr(0, dot);
    if (s != section) {
      if (!section.empty()) os << '\n';
      os << '[' << s << "]\n";
      section = s;
    }
    os << path.substr(dot + 1) << " = " << f.get(c) << '\n';
  }
  return os.str();
}

}  // namespace qlc
