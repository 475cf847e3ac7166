#include "imcflab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "imcflab/common.hpp"

namespace imcf {

namespace pt = boost::property_tree;

std::vector<double> SequenceSpec::expand() const {
  std::vector<double> v;
  if (law == "list") return values;
  for (int i = 1; i <= members; ++i) {
    if (law == "inverse")
      v.push_back(scale / std::pow(i, power));
    else if (law == "geometric")
      v.push_back(scale * std::pow(ratio, i - 1));
    else
      throw InputError("unknown sequence law '" + law + "'");
  }
  return v;
}

FamilyParams ExperimentConfig::member(int i) const {
  const auto vals = sequence.expand();
  require(i >= 0 && i < static_cast<int>(vals.size()), "member index out of range");
  FamilyParams p = family;
  const std::string& k = sequence.parameter;
  if (k == "m")
    p.m = vals[i];
  else if (k == "well_depth")
    p.well_depth = vals[i];
  else if (k == "well_width")
    p.well_width = vals[i];
  else if (k != "none")
    throw InputError("unknown sequence parameter '" + k + "'");
  return p;
}

ClassBounds ExperimentConfig::class_bounds() const {
  ClassBounds b;
  b.r0 = family.r0;
  b.T = T;
  b.H0 = H0;
  b.H1 = H1 > 0 ? H1 : std::numeric_limits<double>::infinity();
  b.A1 = A1 > 0 ? A1 : std::numeric_limits<double>::infinity();
  return b;
}

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> g.n_theta >> c1 >> g.n_phi >> c2 >> g.n_t) || c1 != ',' || c2 != ',' ||
      !(in >> std::ws).eof())
    throw InputError("grid must look like n_theta,n_phi,n_t: '" + s + "'");
  require(g.n_theta >= 4 && g.n_phi >= 8 && g.n_phi % 2 == 0 && g.n_t >= 2,
          "grid needs n_theta >= 4, even n_phi >= 8, n_t >= 2");
  return g;
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"experiment", {"name"}},
      {"family",
       {"kind", "r0", "T", "m", "well_depth", "well_width", "well_start", "well_recovery",
        "well_recovery_width"}},
      {"sequence", {"parameter", "law", "members", "scale", "power", "ratio", "values"}},
      {"grid", {"n_theta", "n_phi", "n_t"}},
      {"collar", {"scale", "k_min", "k_max", "report_k"}},
      {"bounds", {"H0", "H1", "A1"}},
      {"samples", {"directions", "levels", "random_points", "excision_directions",
                   "excision_levels"}},
      {"tolerances", {"gap_slack", "scalar_curvature"}},
      {"output", {"dir", "name", "format"}},
      {"rng", {"seed"}},
      {"geodesic", {"graph_refinement"}},
      {"compare", {"reference"}},
  };
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  size_t used = 0;
  double x;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw InputError(key + ": not a number: '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) throw InputError(key + ": not a finite number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  size_t used = 0;
  long long x;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw InputError(key + ": not an integer: '" + v + "'");
  }
  if (used != v.size()) throw InputError(key + ": not an integer: '" + v + "'");
  return x;
}

struct Reader {
  const pt::ptree& root;
  const std::string* get(const std::string& sec, const std::string& key) const {
    const auto s = root.get_child_optional(sec);
    if (!s) return nullptr;
    const auto it = s->find(key);
    if (it == s->not_found()) return nullptr;
    return &it->second.data();
  }
  void str(const char* sec, const char* key, std::string& out) const {
    if (auto v = get(sec, key)) out = *v;
  }
  void num(const char* sec, const char* key, double& out) const {
    if (auto v = get(sec, key)) out = to_double(std::string(sec) + "." + key, *v);
  }
  void integer(const char* sec, const char* key, int& out) const {
    if (auto v = get(sec, key)) {
      const long long x = to_int(std::string(sec) + "." + key, *v);
      require(x >= -(1LL << 31) && x < (1LL << 31), std::string(sec) + "." + key + " out of range");
      out = static_cast<int>(x);
    }
  }
};

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree root;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  for (const auto& [sec, body] : root) {
    const auto it = schema().find(sec);
    if (it == schema().end()) {
      if (body.empty()) throw InputError("config: key outside any section: '" + sec + "'");
      throw InputError("config: unknown section [" + sec + "]");
    }
    for (const auto& [key, val] : body)
      if (!it->second.count(key)) throw InputError("config: unknown key " + sec + "." + key);
  }

  const Reader r{root};
  ExperimentConfig c;
  r.str("experiment", "name", c.name);
  std::string kind = to_string(c.family.kind);
  r.str("family", "kind", kind);
  c.family.kind = family_kind_from_string(kind);
  r.num("family", "r0", c.family.r0);
  r.num("family", "T", c.T);
  r.num("family", "m", c.family.m);
  r.num("family", "well_depth", c.family.well_depth);
  r.num("family", "well_width", c.family.well_width);
  r.num("family", "well_start", c.family.well_start);
  r.num("family", "well_recovery", c.family.well_recovery);
  r.num("family", "well_recovery_width", c.family.well_recovery_width);

  r.str("sequence", "parameter", c.sequence.parameter);
  r.str("sequence", "law", c.sequence.law);
  r.integer("sequence", "members", c.sequence.members);
  r.num("sequence", "scale", c.sequence.scale);
  r.num("sequence", "power", c.sequence.power);
  r.num("sequence", "ratio", c.sequence.ratio);
  if (auto v = r.get("sequence", "values")) {
    std::istringstream vs(*v);
    std::string item;
    while (std::getline(vs, item, ',')) {
      const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
      if (b == std::string::npos) throw InputError("sequence.values has an empty entry");
      c.sequence.values.push_back(to_double("sequence.values", item.substr(b, e - b + 1)));
    }
  }
  if (c.sequence.law == "list") c.sequence.members = static_cast<int>(c.sequence.values.size());

  r.integer("grid", "n_theta", c.grid.n_theta);
  r.integer("grid", "n_phi", c.grid.n_phi);
  r.integer("grid", "n_t", c.grid.n_t);

  r.num("collar", "scale", c.collar.scale);
  r.integer("collar", "k_min", c.collar.k_min);
  r.integer("collar", "k_max", c.collar.k_max);
  r.integer("collar", "report_k", c.collar.report_k);

  r.num("bounds", "H0", c.H0);
  r.num("bounds", "H1", c.H1);
  r.num("bounds", "A1", c.A1);

  r.integer("samples", "directions", c.sample_dirs);
  r.integer("samples", "levels", c.sample_levels);
  r.integer("samples", "random_points", c.random_points);
  r.integer("samples", "excision_directions", c.excision_dirs);
  r.integer("samples", "excision_levels", c.excision_levels);

  r.num("tolerances", "gap_slack", c.gap_slack);
  r.num("tolerances", "scalar_curvature", c.scalar_tol);

  r.str("output", "dir", c.out_dir);
  r.str("output", "name", c.out_name);
  r.str("output", "format", c.format);

  if (auto v = r.get("rng", "seed")) {
    const long long s = to_int("rng.seed", *v);
    require(s >= 0, "rng.seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  }
  r.integer("geodesic", "graph_refinement", c.graph_refinement);
  r.str("compare", "reference", c.reference);
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
  require(!c.name.empty(), "experiment.name must not be empty");
  require(std::isfinite(c.T) && c.T > 0, "family.T must be > 0");
  require(c.grid.n_theta >= 4 && c.grid.n_phi >= 8 && c.grid.n_phi % 2 == 0 && c.grid.n_t >= 2,
          "grid needs n_theta >= 4, even n_phi >= 8, n_t >= 2");
  const auto& s = c.sequence;
  require(s.law == "inverse" || s.law == "geometric" || s.law == "list",
          "sequence.law must be inverse, geometric or list");
  require(s.parameter == "m" || s.parameter == "well_depth" || s.parameter == "well_width" ||
              s.parameter == "none",
          "sequence.parameter must be m, well_depth, well_width or none");
  require(s.law != "list" || !s.values.empty(), "sequence.values is empty");
  require(s.members >= 1, "sequence.members must be >= 1");
  const auto& k = c.collar;
  require(k.scale > 1, "collar.scale must be > 1 so that t1 < t2");
  require(1 <= k.k_min && k.k_min <= k.k_max, "need 1 <= collar.k_min <= collar.k_max");
  require(k.k_min <= k.report_k && k.report_k <= k.k_max,
          "collar.report_k must lie in [k_min, k_max]");
  require(c.H0 >= 0 && c.H1 >= 0 && c.A1 >= 0, "bounds must be >= 0");
  require(c.H1 == 0 || c.H1 > c.H0, "bounds.H1 must exceed bounds.H0");
  require(c.sample_dirs >= 2 && c.sample_levels >= 2 && c.random_points >= 0,
          "samples need >= 2 directions and levels");
  require(c.excision_dirs >= 2 && c.excision_levels >= 2,
          "excision samples need >= 2 directions and levels");
  require(c.gap_slack >= 0 && c.scalar_tol >= 0, "tolerances must be >= 0");
  require(c.format == "csv" || c.format == "json" || c.format == "both",
          "output.format must be csv, json or both");
  require(!c.out_name.empty(), "output.name must not be empty");
  require(c.graph_refinement >= 1, "geodesic.graph_refinement must be >= 1");
  require(c.reference == "delta", "compare.reference must be delta");
  require(c.jobs >= 1, "jobs must be >= 1");
  require(static_cast<int>(s.expand().size()) == s.members || s.law == "list",
          "sequence size mismatch");
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[experiment]\nname = " << c.name << "\n\n";
  o << "[family]\nkind = " << to_string(c.family.kind) << "\nr0 = " << fmt(c.family.r0)
    << "\nT = " << fmt(c.T) << "\nm = " << fmt(c.family.m)
    << "\nwell_depth = " << fmt(c.family.well_depth)
    << "\nwell_width = " << fmt(c.family.well_width)
    << "\nwell_start = " << fmt(c.family.well_start)
    << "\nwell_recovery = " << fmt(c.family.well_recovery)
    << "\nwell_recovery_width = " << fmt(c.family.well_recovery_width) << "\n\n";
  o << "[sequence]\nparameter = " << c.sequence.parameter << "\nlaw = " << c.sequence.law
    << "\nmembers = " << c.sequence.members << "\nscale = " << fmt(c.sequence.scale)
    << "\npower = " << fmt(c.sequence.power) << "\nratio = " << fmt(c.sequence.ratio) << "\n";
  if (!c.sequence.values.empty()) {
    o << "values = ";
    for (size_t i = 0; i < c.sequence.values.size(); ++i)
      o << (i ? ", " : "") << fmt(c.sequence.values[i]);
    o << "\n";
  }
  o << "\n[grid]\nn_theta = " << c.grid.n_theta << "\nn_phi = " << c.grid.n_phi
    << "\nn_t = " << c.grid.n_t << "\n\n";
  o << "[collar]\nscale = " << fmt(c.collar.scale) << "\nk_min = " << c.collar.k_min
    << "\nk_max = " << c.collar.k_max << "\nreport_k = " << c.collar.report_k << "\n\n";
  o << "[bounds]\nH0 = " << fmt(c.H0) << "\nH1 = " << fmt(c.H1) << "\nA1 = " << fmt(c.A1)
    << "\n\n";
  o << "[samples]\ndirections = " << c.sample_dirs << "\nlevels = " << c.sample_levels
    << "\nrandom_points = " << c.random_points
    << "\nexcision_directions = " << c.excision_dirs
    << "\nexcision_levels = " << c.excision_levels << "\n\n";
  o << "[tolerances]\ngap_slack = " << fmt(c.gap_slack)
    << "\nscalar_curvature = " << fmt(c.scalar_tol) << "\n\n";
  o << "[output]\ndir = " << c.out_dir << "\nname = " << c.out_name << "\nformat = " << c.format
    << "\n\n";
  o << "[rng]\nseed = " << c.seed << "\n\n";
  o << "[geodesic]\ngraph_refinement = " << c.graph_refinement << "\n\n";
  o << "[compare]\nreference = " << c.reference << "\n";
  return o.str();
}

}  // namespace imcf
