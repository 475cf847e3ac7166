#include "imcflab/experiment.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "imcflab/common.hpp"
#include "imcflab/diagnostics.hpp"
#include "imcflab/distance.hpp"
#include "imcflab/estimators.hpp"
#include "imcflab/leaf.hpp"

namespace imcf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

struct Shared {
  AnnulusField delta;
  std::vector<AnnulusPoint> pts;
  DistanceSample delta_sample;
};

MemberRow run_member(const ExperimentConfig& c, const Shared& sh, int i, double value) {
  MemberRow row;
  row.index = i + 1;
  row.parameter = c.sequence.parameter == "none" ? 0.0 : value;
  const int n_k = c.collar.k_max - c.collar.k_min + 1;
  try {
    const FamilyParams p = c.member(i);
    const RotSymProfile prof = make_profile_for_time(p, c.T);
    const AnnulusField f = reparam_to_imcf_time(prof, c.T, c.grid);
    const CurvatureFields curv = curvature_from_profile(f, prof);

    row.hawking_mass_T = hawking_mass(f, f.time.n_t - 1);
    row.class_ok = validate_class_membership(f, c.class_bounds()).all_pass();
    double rmin = 0;
    for (double R : curv.R) rmin = std::min(rmin, R);
    row.scalar_nonneg = rmin >= -c.scalar_tol;
    row.gotozero_gaps = gotozero_report(f, curv).max_gaps();

    ShootOptions so;
    so.graph_refinement = c.graph_refinement;
    const DistanceSample d = shooting_sample(f, sh.pts, so);
    row.shooting_exact = !d.any_fallback && !sh.delta_sample.any_fallback;
    row.uniform_distance = uniform_distance(d, sh.delta_sample).value;
    row.l2_metric_gap = l2_metric_gap(f, sh.delta, 0, c.T);
    row.sup_metric_gap = sup_metric_gap(f, sh.delta);

    for (int k = c.collar.k_min; k <= c.collar.k_max; ++k) {
      const auto e = excision_bound_for(f, sh.delta, c.collar.t1(c.T, k), c.collar.t2(c.T, k),
                                        c.excision_dirs, c.excision_levels);
      row.swif_by_k.push_back(e.bound.total);
    }
    row.swif_excision = row.swif_by_k[c.collar.report_k - c.collar.k_min];
  } catch (const std::exception& e) {
    row.status = e.what();
    row.hawking_mass_T = row.uniform_distance = row.l2_metric_gap = row.sup_metric_gap =
        row.swif_excision = kNaN;
    row.gotozero_gaps.assign(GoToZeroReport::names().size(), kNaN);
    row.swif_by_k.assign(n_k, kNaN);
    row.class_ok = row.scalar_nonneg = row.shooting_exact = false;
  }
  return row;
}

std::string num(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch == '\n' ? ' ' : ch;
  }
  return q + "\"";
}

nlohmann::json jnum(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }
double from_jnum(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

bool same_row(const MemberRow& a, const MemberRow& b) {
  auto same_vec = [](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
      if (!same(x[i], y[i])) return false;
    return true;
  };
  return a.index == b.index && same(a.parameter, b.parameter) && a.status == b.status &&
         same(a.hawking_mass_T, b.hawking_mass_T) && same(a.uniform_distance, b.uniform_distance) &&
         same(a.l2_metric_gap, b.l2_metric_gap) &&
         same(a.sup_metric_gap, b.sup_metric_gap) && same_vec(a.gotozero_gaps, b.gotozero_gaps) &&
         same(a.swif_excision, b.swif_excision) && same_vec(a.swif_by_k, b.swif_by_k) &&
         a.class_ok == b.class_ok && a.scalar_nonneg == b.scalar_nonneg &&
         a.shooting_exact == b.shooting_exact;
}

bool ConvergenceReport::all_ok() const {
  for (const auto& r : rows)
    if (!r.ok()) return false;
  return true;
}

bool ConvergenceReport::operator==(const ConvergenceReport& o) const {
  if (name != o.name || seed != o.seed || grid.n_theta != o.grid.n_theta ||
      grid.n_phi != o.grid.n_phi || grid.n_t != o.grid.n_t || k_min != o.k_min ||
      k_max != o.k_max || report_k != o.report_k || gap_names != o.gap_names ||
      rows.size() != o.rows.size())
    return false;
  for (size_t i = 0; i < rows.size(); ++i)
    if (!same_row(rows[i], o.rows[i])) return false;
  return true;
}

ConvergenceReport run_sequence(const ExperimentConfig& c) {
  validate_config(c);
  ConvergenceReport rep;
  rep.name = c.name;
  rep.seed = c.seed;
  rep.grid = c.grid;
  rep.k_min = c.collar.k_min;
  rep.k_max = c.collar.k_max;
  rep.report_k = c.collar.report_k;
  rep.gap_names = GoToZeroReport::names();

  Shared sh;
  sh.delta = build_delta(c.family.r0, c.T, c.grid);
  std::vector<double> levels;
  for (int l = 0; l < c.sample_levels; ++l) levels.push_back(c.T * l / (c.sample_levels - 1));
  sh.pts = fibonacci_points(c.sample_dirs, levels);
  if (c.random_points > 0) {
    const auto extra = random_points(c.random_points, 0, c.T, c.seed);
    sh.pts.insert(sh.pts.end(), extra.begin(), extra.end());
  }
  ShootOptions so;
  so.graph_refinement = c.graph_refinement;
  sh.delta_sample = shooting_sample(sh.delta, sh.pts, so);

  const std::vector<double> values = c.sequence.expand();
  const int n = static_cast<int>(values.size());
  rep.rows.resize(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) rep.rows[i] = run_member(c, sh, i, values[i]);
  };
  const int jobs = std::min(c.jobs, std::max(n, 1));
  std::vector<std::thread> pool;
  for (int w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rep;
}

std::string report_csv(const ConvergenceReport& r) {
  std::ostringstream o;
  o << "# name," << csv_field(r.name) << "\n# seed," << r.seed << "\n# grid," << r.grid.n_theta
    << ',' << r.grid.n_phi << ',' << r.grid.n_t << "\n# collar_k," << r.k_min << ',' << r.k_max
    << ',' << r.report_k << '\n';
  o << "index,parameter,status,hawking_mass_T,uniform_distance,l2_metric_gap,sup_metric_gap";
  for (const auto& g : r.gap_names) o << ",gap_" << g;
  o << ",swif_excision";
  for (int k = r.k_min; k <= r.k_max; ++k) o << ",swif_k" << k;
  o << ",class_ok,scalar_nonneg,shooting_exact\n";
  for (const auto& m : r.rows) {
    o << m.index << ',' << num(m.parameter) << ',' << csv_field(m.status) << ','
      << num(m.hawking_mass_T) << ',' << num(m.uniform_distance) << ',' << num(m.l2_metric_gap)
      << ',' << num(m.sup_metric_gap);
    for (double g : m.gotozero_gaps) o << ',' << num(g);
    o << ',' << num(m.swif_excision);
    for (double s : m.swif_by_k) o << ',' << num(s);
    o << ',' << m.class_ok << ',' << m.scalar_nonneg << ',' << m.shooting_exact << '\n';
  }
  return o.str();
}

std::string report_json(const ConvergenceReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["seed"] = r.seed;
  j["grid"] = {r.grid.n_theta, r.grid.n_phi, r.grid.n_t};
  j["collar"] = {{"k_min", r.k_min}, {"k_max", r.k_max}, {"report_k", r.report_k}};
  j["gap_names"] = r.gap_names;
  j["members"] = nlohmann::json::array();
  for (const auto& m : r.rows) {
    nlohmann::json row;
    row["index"] = m.index;
    row["parameter"] = jnum(m.parameter);
    row["status"] = m.status;
    row["hawking_mass_T"] = jnum(m.hawking_mass_T);
    row["uniform_distance"] = jnum(m.uniform_distance);
    row["l2_metric_gap"] = jnum(m.l2_metric_gap);
    row["sup_metric_gap"] = jnum(m.sup_metric_gap);
    row["gotozero_gaps"] = nlohmann::json::array();
    for (double g : m.gotozero_gaps) row["gotozero_gaps"].push_back(jnum(g));
    row["swif_excision"] = jnum(m.swif_excision);
    row["swif_by_k"] = nlohmann::json::array();
    for (double s : m.swif_by_k) row["swif_by_k"].push_back(jnum(s));
    row["class_ok"] = m.class_ok;
    row["scalar_nonneg"] = m.scalar_nonneg;
    row["shooting_exact"] = m.shooting_exact;
    j["members"].push_back(row);
  }
  return j.dump(2) + "\n";
}

ConvergenceReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    ConvergenceReport r;
    r.name = j.at("name").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& g = j.at("grid");
    r.grid = {g.at(0).get<int>(), g.at(1).get<int>(), g.at(2).get<int>()};
    r.k_min = j.at("collar").at("k_min").get<int>();
    r.k_max = j.at("collar").at("k_max").get<int>();
    r.report_k = j.at("collar").at("report_k").get<int>();
    r.gap_names = j.at("gap_names").get<std::vector<std::string>>();
    for (const auto& row : j.at("members")) {
      MemberRow m;
      m.index = row.at("index").get<int>();
      m.parameter = from_jnum(row.at("parameter"));
      m.status = row.at("status").get<std::string>();
      m.hawking_mass_T = from_jnum(row.at("hawking_mass_T"));
      m.uniform_distance = from_jnum(row.at("uniform_distance"));
      m.l2_metric_gap = from_jnum(row.at("l2_metric_gap"));
      m.sup_metric_gap = from_jnum(row.at("sup_metric_gap"));
      for (const auto& x : row.at("gotozero_gaps")) m.gotozero_gaps.push_back(from_jnum(x));
      m.swif_excision = from_jnum(row.at("swif_excision"));
      for (const auto& x : row.at("swif_by_k")) m.swif_by_k.push_back(from_jnum(x));
      m.class_ok = row.at("class_ok").get<bool>();
      m.scalar_nonneg = row.at("scalar_nonneg").get<bool>();
      m.shooting_exact = row.at("shooting_exact").get<bool>();
      r.rows.push_back(std::move(m));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report json: ") + e.what());
  }
}

std::vector<std::string> emit_report(const ConvergenceReport& r, const std::string& dir,
                                     const std::string& name, const std::string& format) {
  require(format == "csv" || format == "json" || format == "both",
          "format must be csv, json or both");
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  auto write = [&](const std::string& ext, const std::string& body) {
    const std::string path = (std::filesystem::path(dir) / (name + ext)).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
    paths.push_back(path);
  };
  if (format != "json") write(".csv", report_csv(r));
  if (format != "csv") write(".json", report_json(r));
  return paths;
}

}  // namespace imcf
