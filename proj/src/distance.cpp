#include "imcflab/distance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "imcflab/common.hpp"
#include "imcflab/graph.hpp"

namespace imcf {

double DistanceSample::max() const {
  double m = 0;
  for (double v : matrix) m = std::max(m, v);
  return m;
}

std::vector<AnnulusPoint> fibonacci_points(int n_dirs, const std::vector<double>& t_levels) {
  require(n_dirs >= 1, "need at least one direction");
  const double golden = kPi * (3 - std::sqrt(5.0));
  std::vector<AnnulusPoint> out;
  for (double t : t_levels)
    for (int d = 0; d < n_dirs; ++d) {
      const double z = 1 - (2.0 * d + 1) / n_dirs;
      out.push_back({t, std::acos(z), std::fmod(golden * d, 2 * kPi)});
    }
  return out;
}

std::vector<AnnulusPoint> random_points(int n, double t_lo, double t_hi, std::uint64_t seed) {
  require(n >= 0 && t_lo <= t_hi, "bad random point request");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<AnnulusPoint> out;
  for (int k = 0; k < n; ++k) {
    const double t = t_lo + (t_hi - t_lo) * U(rng);
    const double th = std::acos(1 - 2 * U(rng));
    out.push_back({t, th, 2 * kPi * U(rng)});
  }
  return out;
}

DistanceSample shooting_sample(const Shooter& sh, const std::vector<AnnulusPoint>& pts) {
  DistanceSample ds;
  ds.points = pts;
  ds.method = "shooting";
  ds.mesh = sh.reduced() ? "clairaut" : "nelder-mead";
  const size_t n = pts.size();
  ds.matrix.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const ShootResult r = sh.distance(pts[i], pts[j]);
      ds.matrix[i * n + j] = ds.matrix[j * n + i] = r.distance;
      ds.any_fallback = ds.any_fallback || r.fallback;
      ds.any_local_min = ds.any_local_min || r.local_min;
    }
  return ds;
}

DistanceSample shooting_sample(const AnnulusField& f, const std::vector<AnnulusPoint>& pts,
                               const ShootOptions& opt) {
  const Shooter sh(f, opt);
  return shooting_sample(sh, pts);
}

DistanceSample graph_sample(const AnnulusField& f, const std::vector<AnnulusPoint>& pts,
                            int refinement, double t_lo, double t_hi) {
  if (t_hi < 0) t_hi = f.time.T;
  const GridGraph g(f, refinement, {t_lo, t_hi});
  DistanceSample ds;
  ds.points = pts;
  ds.method = "graph";
  std::ostringstream mesh;
  mesh << "refinement=" << refinement << " h=" << g.h();
  ds.mesh = mesh.str();
  const size_t n = pts.size();
  ds.matrix.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const std::vector<AnnulusPoint> rest(pts.begin() + i + 1, pts.end());
    const auto d = g.distances(pts[i], rest, t_lo, t_hi);
    for (size_t j = i + 1; j < n; ++j) ds.matrix[i * n + j] = ds.matrix[j * n + i] = d[j - i - 1];
  }
  return ds;
}

double triangle_excess(const DistanceSample& ds) {
  const int n = ds.n();
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        worst = std::max(worst, ds.at(i, j) - ds.at(i, k) - ds.at(k, j));
  return n ? worst : 0.0;
}

void write_distance_csv(const DistanceSample& ds, const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot open " + path);
  out.precision(17);
  out << "# method," << ds.method << "\n# mesh," << ds.mesh << "\n";
  out << "# fallback," << ds.any_fallback << "\n# local_min," << ds.any_local_min << "\n";
  out << "points," << ds.n() << "\nt,theta,phi\n";
  for (const auto& p : ds.points) out << p.t << ',' << p.theta << ',' << p.phi << '\n';
  out << "matrix," << ds.n() << '\n';
  for (int i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.n(); ++j) out << (j ? "," : "") << ds.at(i, j);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw InputError("bad number in distance file: '" + s + "'");
  }
  require(pos == s.size(), "bad number in distance file: '" + s + "'");
  return v;
}

}  // namespace

DistanceSample read_distance_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open " + path);
  DistanceSample ds;
  std::string line;
  auto next = [&]() {
    while (std::getline(in, line)) {
      if (line.rfind("# ", 0) == 0) {
        const auto c = split_csv(line.substr(2));
        if (c.size() == 2 && c[0] == "method") ds.method = c[1];
        if (c.size() == 2 && c[0] == "mesh") ds.mesh = c[1];
        if (c.size() == 2 && c[0] == "fallback") ds.any_fallback = c[1] == "1";
        if (c.size() == 2 && c[0] == "local_min") ds.any_local_min = c[1] == "1";
        continue;
      }
      return true;
    }
    throw InputError("truncated distance file " + path);
  };
  next();
  auto head = split_csv(line);
  require(head.size() == 2 && head[0] == "points", "distance file: expected points block");
  const int n = static_cast<int>(to_double(head[1]));
  require(n >= 0, "distance file: negative point count");
  next();  // column names
  for (int k = 0; k < n; ++k) {
    next();
    const auto c = split_csv(line);
    require(c.size() == 3, "distance file: point row needs 3 columns");
    ds.points.push_back({to_double(c[0]), to_double(c[1]), to_double(c[2])});
  }
  next();
  head = split_csv(line);
  require(head.size() == 2 && head[0] == "matrix" && to_double(head[1]) == n,
          "distance file: expected matrix block");
  for (int i = 0; i < n; ++i) {
    next();
    const auto c = split_csv(line);
    require(static_cast<int>(c.size()) == n, "distance file: matrix row has wrong width");
    for (const auto& s : c) ds.matrix.push_back(to_double(s));
  }
  return ds;
}

}  // namespace imcf
