// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "imcflab/christoffel.hpp"
#include "imcflab/common.hpp"
#include "imcflab/config.hpp"
#include "imcflab/diagnostics.hpp"
#include "imcflab/distance.hpp"
#include "imcflab/estimators.hpp"
#include "imcflab/experiment.hpp"
#include "imcflab/geodesic.hpp"
#include "imcflab/graph.hpp"
#include "imcflab/leaf.hpp"
#include "imcflab/profile.hpp"

using namespace imcf;
namespace fs = std::filesystem;

namespace {

const GridSpec kDefault{};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

AnnulusPoint random_point(std::mt19937_64& rng, double t_lo, double t_hi) {
  std::uniform_real_distribution<double> U(0, 1);
  return {t_lo + (t_hi - t_lo) * U(rng), std::acos(1 - 2 * U(rng)), 2 * kPi * U(rng)};
}

FamilyParams schw(double m, double r0) {
  FamilyParams p;
  p.kind = FamilyKind::schwarzschild;
  p.m = m;
  p.r0 = r0;
  return p;
}

AnnulusField schw_field(double m, double r0, double T, const GridSpec& gs) {
  return reparam_to_imcf_time(make_profile_for_time(schw(m, r0), T), T, gs);
}

// 1. Hawking mass of Schwarzschild and delta leaves.
Outcome hawking_mass_exactness() {
  const double T = 2 * std::log(2.0);
  const AnnulusField s = schw_field(1.0, 3.0, T, kDefault);
  const AnnulusField d = build_delta(1.0, T, kDefault);
  double ws = 0, wd = 0;
  for (int k = 0; k < s.time.n_t; ++k) {
    ws = std::max(ws, std::abs(hawking_mass(s, k) - 1));
    wd = std::max(wd, std::abs(hawking_mass(d, k)));
  }
  return {ws < 1e-8 && wd < 1e-10,
          fmt("Schwarzschild m=1 r0=3 max|m_H-1| = %.2e (tol 1e-8); delta max|m_H| = %.2e (tol 1e-10)",
              ws, wd)};
}

// 2. Geroch monotonicity on random wells with R >= 0 and f' > 0.
Outcome geroch() {
  std::mt19937_64 rng(20240602);
  std::uniform_real_distribution<double> U(0, 1);
  int kept = 0, tried = 0;
  double worst = 0;
  while (kept < 50) {
    ++tried;
    FamilyParams w;
    w.kind = FamilyKind::gravity_well;
    w.r0 = 0.5 + U(rng);
    w.well_depth = 0.9 * U(rng);
    w.well_width = 0.1 + U(rng);
    w.well_start = U(rng);
    w.well_recovery = 0.3 * U(rng);
    w.well_recovery_width = 1 + 3 * U(rng);
    RotSymProfile pr;
    try {
      pr = make_profile(w, 4.0);
    } catch (const InputError&) {
      continue;
    }
    const auto R = scalar_curvature_profile(pr);
    if (*std::min_element(R.begin(), R.end()) < 0) continue;
    if (*std::min_element(pr.fp.begin(), pr.fp.end()) <= 0) continue;
    ++kept;
    const auto m = hawking_mass_profile(pr);
    for (size_t i = 1; i < m.size(); ++i) worst = std::max(worst, m[i - 1] - m[i]);
  }
  return {worst <= 1e-10, fmt("%d admissible wells (%d drawn); max decrease of m_H = %.2e (tol 1e-10)",
                              kept, tried, worst)};
}

// 3. Christoffel symbols of delta at every interior node.
Outcome christoffel() {
  const AnnulusField d = build_delta(1.0, 1.0, kDefault);
  const ChristoffelEvaluator ev(d);
  double worst = 0;
  long n = 0;
  for (int k = 1; k + 1 < d.time.n_t; ++k)
    for (int i = 0; i < d.sphere.n_theta; ++i) {
      const double s2 = d.sphere.sin_theta[i] * d.sphere.sin_theta[i];
      for (int j = 0; j < d.sphere.n_phi; ++j, ++n) {
        const ChristoffelAt c = ev.at(k, i, j);
        worst = std::max({worst, std::abs(c.G000 - 0.5), std::abs(c.G0i0[0]), std::abs(c.G0i0[1]),
                          std::abs(c.G0ij.xx + 2), std::abs(c.G0ij.xy), std::abs(c.G0ij.yy + 2 * s2),
                          std::abs(c.Gki0[0][0] - 0.5), std::abs(c.Gki0[1][1] - 0.5),
                          std::abs(c.Gki0[0][1]), std::abs(c.Gki0[1][0]), std::abs(c.Gk00[0]),
                          std::abs(c.Gk00[1])});
      }
    }
  return {worst < 1e-8, fmt("%ld interior nodes, max deviation %.2e (tol 1e-8)", n, worst)};
}

// 4. Shooting against the graph oracle, plus radial and antipodal closed forms.
Outcome geodesics() {
  const double T = 1;
  const GridSpec gs{32, 64, 129};
  const AnnulusField fl = build_delta(1.0, T, gs);
  const AnnulusField sw = schw_field(0.1, 1.0, T, gs);
  std::mt19937_64 rng(11);
  int bad = 0, pairs = 0;
  double worst_ratio = 0;
  for (const AnnulusField* f : {&fl, &sw}) {
    const Shooter sh(*f);
    const GridGraph g(*f, 2);
    std::vector<std::pair<AnnulusPoint, AnnulusPoint>> pq;
    for (int n = 0; n < 100; ++n) pq.push_back({random_point(rng, 0, T), random_point(rng, 0, T)});
    std::vector<double> a(pq.size());
    double diam = 0;
    for (size_t n = 0; n < pq.size(); ++n) {
      a[n] = sh.distance(pq[n].first, pq[n].second).distance;
      diam = std::max(diam, a[n]);
    }
    diam = std::max(diam, shooting_sample(sh, fibonacci_points(12, {0.0, T / 2, T})).max());
    for (size_t n = 0; n < pq.size(); ++n) {
      const double b = g.distance(pq[n].first, pq[n].second);
      const double tol = 3 * g.h() * diam;
      worst_ratio = std::max(worst_ratio, std::abs(a[n] - b) / tol);
      bad += std::abs(a[n] - b) > tol;
      ++pairs;
    }
  }

  // radial: e^{T/2} - 1 in delta; antipodal on the inner sphere: pi
  const double Tr = 2 * std::log(2.0);
  const AnnulusField d = build_delta(1.0, Tr, GridSpec{32, 64, 129});
  const Shooter shd(d);
  double rad_err = 0;
  std::mt19937_64 r2(12);
  for (int n = 0; n < 10; ++n) {
    const AnnulusPoint p = random_point(r2, 0, 0);
    rad_err = std::max(rad_err, std::abs(shd.distance(p, {Tr, p.theta, p.phi}).distance - 1));
  }
  std::vector<double> mean;
  bool anti_ok = true;
  for (int r : {1, 2, 4}) {
    const GridGraph g(d, r);
    std::mt19937_64 r3(13);
    double m = 0;
    for (int n = 0; n < 10; ++n) {
      const AnnulusPoint p = random_point(r3, 0, 0);
      const double e = std::abs(g.distance(p, {0, kPi - p.theta, p.phi + kPi}) - kPi);
      anti_ok = anti_ok && e < 3 * g.h();
      m += e / 10;
    }
    mean.push_back(m);
  }
  const bool first_order = mean[1] < 0.75 * mean[0] && mean[2] < 0.75 * mean[1];
  return {bad == 0 && rad_err < 1e-6 && anti_ok && first_order,
          fmt("%d/%d pairs outside 3 h diam (worst |diff|/tol %.2f); radial err %.2e (tol 1e-6); "
              "antipodal mean err %.3g, %.3g, %.3g for refinement 1, 2, 4",
              bad, pairs, worst_ratio, rad_err, mean[0], mean[1], mean[2])};
}

// 5. Length gap in the dt direction on perturbed fields.
Outcome length_gap() {
  const double T = 1, r0 = 1;
  const GridSpec gs{16, 32, 65};
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> U(0, 1);
  int violations = 0, curves = 0;
  double worst = 0;
  for (int f = 0; f < 10; ++f) {
    const double eps = 0.4 * (U(rng) - 0.5), a = U(rng), b = U(rng), w = 1 + 5 * U(rng);
    const AnnulusField fld = field_from_function(
        r0, T, gs,
        [=](double t, double th, double ph) {
          const double x = std::sin(th) * std::cos(ph), z = std::cos(th);
          const double inv = 0.25 * r0 * r0 * std::exp(t) *
                             (1 + eps * (a * z + b * x) * (0.5 + 0.5 * std::sin(w * t)));
          const double H = 1 / std::sqrt(inv);
          const Sym2 g = round_metric(std::sin(th)) * (r0 * r0 * std::exp(t));
          return NodeValues{H, g, g * (H / 2)};
        },
        "perturbed");
    for (int c = 0; c < 50; ++c) {
      const double ta = 0.3 * T * U(rng), tb = T - 0.3 * T * U(rng);
      const double th0 = 0.4 + 2.3 * U(rng), ph0 = 2 * kPi * U(rng);
      const double dth = 0.8 * (U(rng) - 0.5), dph = 2.0 * (U(rng) - 0.5), wc = 6 * U(rng);
      std::vector<AnnulusPoint> s;
      for (int k = 0; k <= 200; ++k) {
        const double u = k / 200.0;
        s.push_back({ta + (tb - ta) * u, th0 + dth * std::sin(wc * u), ph0 + dph * u});
      }
      const LengthGapDt z = length_gap_dt(fld, make_curve(std::move(s)));
      violations += z.lhs > z.rhs_corrected;
      worst = std::max(worst, z.rhs_corrected > 0 ? z.lhs / z.rhs_corrected : 0.0);
      ++curves;
    }
  }
  return {violations == 0,
          fmt("%d violations over %d curves on 10 fields; max lhs/rhs = %.3f", violations, curves, worst)};
}

// 6. Distance floors under 1/H^2 >= (r0^2/4)e^t - 1/j.
Outcome distance_floors() {
  const double T = 1, r0 = 1;
  const GridSpec gs{16, 32, 65};
  const auto pts = fibonacci_points(8, {0.0, 0.5, 1.0});
  bool ok = true;
  std::string detail;
  for (double j : {10.0, 100.0, 1000.0}) {
    for (int shape = 0; shape < 2; ++shape) {
      // shape 1 keeps the hypothesis with room to spare in an oscillating way
      const auto deficit = [=](double t) { return shape == 0 ? 1 / j : (0.5 + 0.5 * std::sin(6 * t)) / j; };
      const AnnulusField f = field_from_radial(
          r0, T, gs, [=](double t) { return 1 / std::sqrt(0.25 * r0 * r0 * std::exp(t) - deficit(t)); },
          [=](double t) { return r0 * std::exp(t / 2); }, "floor");
      const Envelope h = [=](double t) { return std::sqrt(0.25 * r0 * r0 * std::exp(t) - deficit(t)); };
      const double D =
          diameter_bound_check(f, h, leaf_diameter_max(f), shooting_sample(f, pts)).bound;
      const DistanceLowerBound r = distance_lower_bound_check(f, j, D, pts);
      const bool pass = r.hypothesis_ok && r.min_hat_bar >= -D / std::sqrt(j);
      ok = ok && pass;
      detail += fmt("%sj=%g/%d min %.3g floor %.3g", detail.empty() ? "" : "; ", j, shape,
                    r.min_hat_bar, -D / std::sqrt(j));
    }
  }
  return {ok, detail};
}

// 7. Maximum-principle bound.
Outcome max_principle() {
  const double T = 1;
  const AnnulusField d = build_delta(1.0, T, kDefault);
  const auto flat = max_principle_bound(d, flat_curvature(d), 0);
  const double m = 0.1, r0 = 1;
  const RotSymProfile pr = make_profile_for_time(schw(m, r0), T);
  const AnnulusField s = reparam_to_imcf_time(pr, T, kDefault);
  const auto sc = max_principle_bound(s, curvature_from_profile(s, pr), 2 * m / (r0 * r0 * r0));
  return {flat.max_abs_slack < 1e-8 && sc.hypothesis_ok && sc.min_slack >= 0,
          fmt("flat max|slack| = %.2e (tol 1e-8); Schwarzschild m=0.1 C=2m/r0^3: hypothesis %s, "
              "min slack %.3e",
              flat.max_abs_slack, sc.hypothesis_ok ? "holds" : "fails", sc.min_slack)};
}

// 8. Weak Ricci identity.
Outcome weak_ricci() {
  const auto bump = smooth_bump(0.15, 0.85, 0.35);
  const AnnulusField d = build_delta(1.0, 1.0, kDefault);
  const double flat = weak_ricci_identity_residual(d, flat_curvature(d), bump, 0.1, 0.9).residual;
  std::vector<double> res;
  for (int nt : {65, 129, 257}) {
    const RotSymProfile pr = make_profile_for_time(schw(0.1, 1.0), 1.0);
    const AnnulusField s = reparam_to_imcf_time(pr, 1.0, GridSpec{16, 32, nt});
    res.push_back(weak_ricci_identity_residual(s, curvature_from_profile(s, pr), bump, 0.1, 0.9).residual);
  }
  const double o1 = std::log2(res[0] / res[1]), o2 = std::log2(res[1] / res[2]);
  return {flat < 1e-6 && o1 >= 2 && o2 >= 2,
          fmt("flat residual %.2e (tol 1e-6); Schwarzschild residuals %.2e, %.2e, %.2e, orders %.2f, %.2f",
              flat, res[0], res[1], res[2], o1, o2)};
}

// 9. Gauss-Bonnet on a 64 x 128 leaf grid.
Outcome gauss_bonnet() {
  const SphereGrid sg = make_sphere_grid(64, 128);
  using Emb = std::function<void(double th, double ph, double X[3], double Xt[3], double Xp[3])>;
  const Emb round = [](double th, double ph, double X[3], double Xt[3], double Xp[3]) {
    const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
    X[0] = st * cp, X[1] = st * sp, X[2] = ct;
    Xt[0] = ct * cp, Xt[1] = ct * sp, Xt[2] = -st;
    Xp[0] = -st * sp, Xp[1] = st * cp, Xp[2] = 0;
  };
  const Emb ellipsoid = [&](double th, double ph, double X[3], double Xt[3], double Xp[3]) {
    round(th, ph, X, Xt, Xp);
    const double ax[3] = {1.0, 1.3, 0.8};
    for (int c = 0; c < 3; ++c) X[c] *= ax[c], Xt[c] *= ax[c], Xp[c] *= ax[c];
  };
  const Emb star = [&](double th, double ph, double X[3], double Xt[3], double Xp[3]) {
    double n[3], nt[3], np[3];
    round(th, ph, n, nt, np);
    const double r = 1 + 0.1 * n[2] + 0.08 * n[0] * n[1];
    const double rt = 0.1 * nt[2] + 0.08 * (nt[0] * n[1] + n[0] * nt[1]);
    const double rp = 0.1 * np[2] + 0.08 * (np[0] * n[1] + n[0] * np[1]);
    for (int c = 0; c < 3; ++c) {
      X[c] = r * n[c];
      Xt[c] = rt * n[c] + r * nt[c];
      Xp[c] = rp * n[c] + r * np[c];
    }
  };
  bool ok = true;
  std::string detail;
  const std::pair<const char*, const Emb*> shapes[] = {
      {"round", &round}, {"ellipsoid", &ellipsoid}, {"star", &star}};
  for (const auto& [name, e] : shapes) {
    std::vector<Sym2> g(sg.size());
    for (int i = 0; i < sg.n_theta; ++i)
      for (int j = 0; j < sg.n_phi; ++j) {
        double X[3], Xt[3], Xp[3];
        (*e)(sg.theta[i], sg.phi(j), X, Xt, Xp);
        auto dot = [](const double* u, const double* v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; };
        g[i * sg.n_phi + j] = {dot(Xt, Xt), dot(Xt, Xp), dot(Xp, Xp)};
      }
    const auto K = gauss_curvature(sg, g.data());
    const double chi = integrate_leaf_metric(sg, g.data(), K) / (2 * kPi);
    ok = ok && std::abs(chi - 2) < 1e-4;
    detail += fmt("%s%s |chi-2| = %.2e", detail.empty() ? "" : "; ", name, std::abs(chi - 2));
  }
  return {ok, detail + " (tol 1e-4)"};
}

bool nonincreasing(const std::vector<double>& v, double slack) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] <= v[i - 1] + slack)) return false;
  return true;
}
bool strictly_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

ConvergenceReport g_sequence;
double g_sequence_seconds = 0;

// 10. Schwarzschild sequence against delta.
Outcome sequence() {
  ExperimentConfig c = load_config(std::string(IMCFLAB_CONFIG_DIR) + "/schwarzschild_sequence.ini");
  c.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto t0 = std::chrono::steady_clock::now();
  g_sequence = run_sequence(c);
  g_sequence_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& rows = g_sequence.rows;
  std::vector<double> u, l2;
  bool status_ok = true;
  for (const auto& r : rows) {
    u.push_back(r.uniform_distance);
    l2.push_back(r.l2_metric_gap);
    status_ok = status_ok && r.status == "ok";
  }
  bool gaps_ok = true;
  std::string bad_gap;
  for (size_t q = 0; q < g_sequence.gap_names.size(); ++q) {
    std::vector<double> col;
    for (const auto& r : rows) col.push_back(r.gotozero_gaps[q]);
    if (!nonincreasing(col, c.gap_slack)) {
      gaps_ok = false;
      bad_gap += " " + g_sequence.gap_names[q];
    }
  }
  const bool shrink = u.back() < 0.1 * u.front() && l2.back() < 0.1 * l2.front();
  const bool pass = status_ok && strictly_decreasing(u) && strictly_decreasing(l2) && shrink &&
                    gaps_ok && g_sequence_seconds < 120;
  return {pass, fmt("%zu members on %d threads; uniform %.4g -> %.4g, L2 %.4g -> %.4g; "
                    "gaps nonincreasing: %s%s; %.1f s (budget 120 s)",
                    rows.size(), c.jobs, u.front(), u.back(), l2.front(), l2.back(),
                    gaps_ok ? "yes" : "no,", bad_gap.c_str(), g_sequence_seconds)};
}

// 11. Excision bounds decrease in the collar parameter.
Outcome excision() {
  if (g_sequence.rows.empty()) return {false, "sequence report unavailable"};
  const int k0 = 3 - g_sequence.k_min;
  int bad = 0;
  for (const auto& r : g_sequence.rows) {
    std::vector<double> tail(r.swif_by_k.begin() + std::max(0, k0), r.swif_by_k.end());
    bad += !(tail.size() >= 2 && strictly_decreasing(tail));
  }
  const auto& last = g_sequence.rows.back().swif_by_k;
  return {bad == 0, fmt("%d of %zu members not strictly decreasing for k in [3, %d]; member %zu: "
                        "%.4g at k=3 -> %.4g at k=%d",
                        bad, g_sequence.rows.size(), g_sequence.k_max, g_sequence.rows.size(),
                        last[std::max(0, k0)], last.back(), g_sequence.k_max)};
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 12. Seeded runs reproduce byte for byte.
Outcome determinism() {
  ExperimentConfig c = load_config(std::string(IMCFLAB_CONFIG_DIR) + "/schwarzschild_sequence.ini");
  c.sequence.members = 3;
  c.grid = {16, 32, 65};
  c.random_points = 6;
  c.sample_levels = 3;
  const fs::path base = fs::temp_directory_path() / "imcflab_acceptance";
  std::vector<std::string> out[2];
  for (int run = 0; run < 2; ++run) {
    c.jobs = run + 1;
    out[run] = emit_report(run_sequence(c), (base / std::to_string(run)).string(), "report", "both");
  }
  bool same = out[0].size() == 2 && out[1].size() == 2;
  for (size_t n = 0; same && n < out[0].size(); ++n) same = slurp(out[0][n]) == slurp(out[1][n]);
  fs::remove_all(base);
  return {same, fmt("seed %llu, CSV and JSON from 1-thread and 2-thread runs %s",
                    static_cast<unsigned long long>(c.seed), same ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"hawking-mass exactness", hawking_mass_exactness},
      {"geroch monotonicity", geroch},
      {"christoffel symbols of delta", christoffel},
      {"geodesic distances", geodesics},
      {"length gap (dt direction)", length_gap},
      {"distance floors", distance_floors},
      {"maximum principle", max_principle},
      {"weak ricci identity", weak_ricci},
      {"gauss-bonnet", gauss_bonnet},
      {"schwarzschild sequence", sequence},
      {"excision bound monotone in k", excision},
      {"determinism", determinism},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string extra;
    // the budget in criterion 1 covers the whole check
    if (n == 1 && sec >= 5) {
      o.pass = false;
      extra = " [over the 5 s budget]";
    }
    failed += !o.pass;
    std::printf("%s  [%2d] %s: %s (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(),
                sec, extra.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
