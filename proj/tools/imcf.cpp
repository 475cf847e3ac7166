// imcf: command line front end for imcflab.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "imcflab/common.hpp"
#include "imcflab/config.hpp"
#include "imcflab/diagnostics.hpp"
#include "imcflab/distance.hpp"
#include "imcflab/estimators.hpp"
#include "imcflab/experiment.hpp"
#include "imcflab/geodesic.hpp"
#include "imcflab/leaf.hpp"
#include "imcflab/profile.hpp"

namespace fs = std::filesystem;
using namespace imcf;

namespace {

struct Common {
  std::string config, out, grid, format;
  long long seed = -1;
  int jobs = 0;
};

ExperimentConfig resolve(const Common& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.out.empty()) c.out_dir = o.out;
  if (!o.grid.empty()) c.grid = parse_grid(o.grid);
  if (!o.format.empty()) c.format = o.format;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (o.jobs > 0) c.jobs = o.jobs;
  validate_config(c);
  return c;
}

AnnulusPoint parse_point(const std::string& s) {
  AnnulusPoint p;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> p.t >> c1 >> p.theta >> c2 >> p.phi) || c1 != ',' || c2 != ',' ||
      !(in >> std::ws).eof())
    throw InputError("point must look like t,theta,phi: '" + s + "'");
  return p;
}

// Prints key/value pairs as one JSON object or as a two-line CSV.
void print_record(const nlohmann::ordered_json& j, const std::string& format) {
  if (format == "json") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::string head, vals;
  for (auto it = j.begin(); it != j.end(); ++it) {
    head += (head.empty() ? "" : ",") + it.key();
    std::ostringstream v;
    if (it->is_number_float()) {
      v.precision(17);
      v << it->get<double>();
    } else if (it->is_string()) {
      v << it->get<std::string>();
    } else {
      v << it->dump();
    }
    vals += (vals.empty() ? "" : ",") + v.str();
  }
  std::cout << head << '\n' << vals << '\n';
}

struct Member {
  RotSymProfile prof;
  AnnulusField field;
};

Member build_member(const ExperimentConfig& c, int index) {
  Member m;
  m.prof = make_profile_for_time(c.member(index - 1), c.T);
  m.field = reparam_to_imcf_time(m.prof, c.T, c.grid);
  return m;
}

int cmd_flow(const Common& o, int index) {
  const auto c = resolve(o);
  const Member m = build_member(c, index);
  fs::create_directories(c.out_dir);
  const std::string stem = (fs::path(c.out_dir) / (c.out_name + "_member" + std::to_string(index))).string();
  save_field(m.field, stem + ".field");
  write_profile_csv(m.prof, stem + "_profile.csv");
  const auto curv = curvature_from_profile(m.field, m.prof);
  write_gotozero_csv(gotozero_report(m.field, curv), stem + "_gotozero.csv");
  nlohmann::ordered_json j;
  j["member"] = index;
  j["label"] = m.field.label;
  j["field"] = stem + ".field";
  j["hawking_mass_T"] = hawking_mass(m.field, m.field.time.n_t - 1);
  print_record(j, c.format == "json" ? "json" : "csv");
  return 0;
}

int cmd_geodesic(const Common& o, int index, const std::string& from, const std::string& to) {
  const auto c = resolve(o);
  const Member m = build_member(c, index);
  ShootOptions so;
  so.graph_refinement = c.graph_refinement;
  const auto r = shoot_distance(m.field, parse_point(from), parse_point(to), so);
  nlohmann::ordered_json j;
  j["member"] = index;
  j["distance"] = r.distance;
  j["method"] = r.method;
  j["fallback"] = r.fallback;
  j["local_min"] = r.local_min;
  print_record(j, c.format == "json" ? "json" : "csv");
  return 0;
}

int cmd_compare(const Common& o, const std::string& a_path, const std::string& b_path) {
  const auto c = resolve(o);
  const AnnulusField a = load_field(a_path), b = load_field(b_path);
  require(same_grid(a, b), "compare: fields live on different grids");
  std::vector<double> levels;
  for (int l = 0; l < c.sample_levels; ++l) levels.push_back(a.time.T * l / (c.sample_levels - 1));
  auto pts = fibonacci_points(c.sample_dirs, levels);
  if (c.random_points > 0) {
    const auto extra = random_points(c.random_points, 0, a.time.T, c.seed);
    pts.insert(pts.end(), extra.begin(), extra.end());
  }
  ShootOptions so;
  so.graph_refinement = c.graph_refinement;
  const auto da = shooting_sample(a, pts, so), db = shooting_sample(b, pts, so);
  const auto ud = uniform_distance(da, db);
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["uniform_distance"] = ud.value;
  j["l2_metric_gap"] = l2_metric_gap(a, b, 0, a.time.T);
  j["diam_a"] = da.max();
  j["diam_b"] = db.max();
  j["gh_bound"] = 2 * ud.value;
  j["volume_a"] = annulus_volume(a, 0, a.time.T);
  j["volume_b"] = annulus_volume(b, 0, b.time.T);
  j["fallback"] = da.any_fallback || db.any_fallback;
  if (a.rotsym && b.rotsym && a.time.T > 0) {
    const double T = a.time.T;
    const auto e = excision_bound_for(a, b, c.collar.t1(T, c.collar.report_k),
                                      c.collar.t2(T, c.collar.report_k), c.excision_dirs,
                                      c.excision_levels);
    j["swif_excision"] = e.bound.total;
  }
  print_record(j, c.format == "json" ? "json" : "csv");
  return 0;
}

int cmd_sequence(const Common& o) {
  const auto c = resolve(o);
  const auto rep = run_sequence(c);
  for (const auto& p : emit_report(rep, c.out_dir, c.out_name, c.format)) std::cout << p << '\n';
  for (const auto& r : rep.rows)
    if (!r.ok())
      std::cerr << "member " << r.index << ": status=" << r.status << " class_ok=" << r.class_ok
                << " scalar_nonneg=" << r.scalar_nonneg << '\n';
  return rep.all_ok() ? 0 : 1;
}

int cmd_check(const Common& o) {
  const auto c = resolve(o);
  const auto bounds = c.class_bounds();
  const int n = static_cast<int>(c.sequence.expand().size());
  bool ok = true;
  std::cout << "member,check,pass,worst,margin\n";
  std::cout.precision(10);
  for (int i = 1; i <= n; ++i) {
    try {
      const Member m = build_member(c, i);
      const auto rep = validate_class_membership(m.field, bounds);
      for (const auto& e : rep.checks) {
        std::cout << i << ',' << e.name << ',' << e.pass << ',' << e.worst << ',' << e.margin << '\n';
        ok = ok && e.pass;
      }
      const auto curv = curvature_from_profile(m.field, m.prof);
      double rmin = 0;
      for (double R : curv.R) rmin = std::min(rmin, R);
      const bool rok = rmin >= -c.scalar_tol;
      std::cout << i << ",scalar_nonneg," << rok << ',' << rmin << ',' << rmin + c.scalar_tol << '\n';
      ok = ok && rok;
    } catch (const InputError& e) {
      std::cout << i << ",construction,0,nan,nan\n";
      std::cerr << "member " << i << ": " << e.what() << '\n';
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imcf: annulus flow diagnostics and convergence experiments"};
  app.require_subcommand(1);
  Common o;
  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", o.config, "INI experiment config");
    s->add_option("--out", o.out, "output directory");
    s->add_option("--seed", o.seed, "rng seed")->check(CLI::NonNegativeNumber);
    s->add_option("--grid", o.grid, "n_theta,n_phi,n_t");
    s->add_option("--format", o.format, "csv, json or both");
    s->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  int member = 1;
  std::string from, to, fa, fb;
  auto* flow = app.add_subcommand("flow", "build one member and dump its fields");
  add_common(flow);
  flow->add_option("--member", member, "1-based member index")->check(CLI::PositiveNumber);
  auto* geo = app.add_subcommand("geodesic", "distance between two points of one member");
  add_common(geo);
  geo->add_option("--member", member, "1-based member index")->check(CLI::PositiveNumber);
  geo->add_option("--from", from, "t,theta,phi")->required();
  geo->add_option("--to", to, "t,theta,phi")->required();
  auto* cmp = app.add_subcommand("compare", "all estimators between two saved fields");
  add_common(cmp);
  cmp->add_option("a", fa, "first field file")->required();
  cmp->add_option("b", fb, "second field file")->required();
  auto* seq = app.add_subcommand("sequence", "run the full sequence experiment");
  add_common(seq);
  auto* chk = app.add_subcommand("check", "class membership and hypothesis audit");
  add_common(chk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*flow) return cmd_flow(o, member);
    if (*geo) return cmd_geodesic(o, member, from, to);
    if (*cmp) return cmd_compare(o, fa, fb);
    if (*seq) return cmd_sequence(o);
    if (*chk) return cmd_check(o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
