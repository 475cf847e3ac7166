#include <doctest.h>

#include <cmath>
#include <random>

#include "imcflab/christoffel.hpp"
#include "imcflab/common.hpp"
#include "imcflab/geodesic.hpp"
#include "imcflab/graph.hpp"
#include "imcflab/profile.hpp"

using namespace imcf;

namespace {

// Euclidean distance in R^3 minus the open ball of radius rho, between points at radii
// r1, r2 separated by angle psi.
double euclid_outside_ball(double r1, double r2, double psi, double rho) {
  const double a1 = std::acos(std::min(1.0, rho / r1)), a2 = std::acos(std::min(1.0, rho / r2));
  if (psi <= a1 + a2) return std::sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * std::cos(psi));
  return std::sqrt(r1 * r1 - rho * rho) + std::sqrt(r2 * r2 - rho * rho) + rho * (psi - a1 - a2);
}

AnnulusPoint random_point(std::mt19937_64& rng, double t_lo, double t_hi) {
  std::uniform_real_distribution<double> U(0, 1);
  return {t_lo + (t_hi - t_lo) * U(rng), std::acos(1 - 2 * U(rng)), 2 * kPi * U(rng)};
}

}  // namespace

TEST_CASE("Christoffel symbols of delta") {
  const AnnulusField d = build_delta(1.0, 1.0, GridSpec{24, 48, 65});
  const ChristoffelEvaluator ev(d);
  double worst = 0, worst_leaf = 0;
  for (int k = 1; k + 1 < d.time.n_t; k += 3)
    for (int i = 0; i < d.sphere.n_theta; i += 2)
      for (int j = 0; j < d.sphere.n_phi; j += 7) {
        const ChristoffelAt c = ev.at(k, i, j);
        CHECK_FALSE(c.flagged);
        const double st = d.sphere.sin_theta[i], ct = d.sphere.cos_theta[i];
        worst = std::max({worst, std::abs(c.G000 - 0.5), std::abs(c.G0i0[0]), std::abs(c.G0i0[1]),
                          std::abs(c.G0ij.xx + 2), std::abs(c.G0ij.xy),
                          std::abs(c.G0ij.yy + 2 * st * st), std::abs(c.Gki0[0][0] - 0.5),
                          std::abs(c.Gki0[1][1] - 0.5), std::abs(c.Gki0[0][1]),
                          std::abs(c.Gki0[1][0]), std::abs(c.Gk00[0]), std::abs(c.Gk00[1])});
        // round-sphere leaf symbols
        worst_leaf = std::max({worst_leaf, std::abs(c.Gkij[0][1][1] + st * ct),
                               std::abs(c.Gkij[1][0][1] * st - ct), std::abs(c.Gkij[0][0][0]),
                               std::abs(c.Gkij[1][1][1])});
      }
  CHECK(worst < 1e-8);
  CHECK(worst_leaf < 1e-3);
  CHECK(ev.at(0, 3, 3).flagged);
  CHECK_THROWS_AS(ev.at(d.time.n_t, 0, 0), InputError);
}

TEST_CASE("radial geodesic of delta") {
  const double T = 2 * std::log(2.0);
  const AnnulusField d = build_delta(1.0, T, GridSpec{16, 32, 129});
  const GeodesicPath p = integrate_geodesic(d, {0, 1.0, 0.5, 1, 0, 0}, 5.0);
  CHECK(p.hit_boundary);
  CHECK(p.boundary == 1);
  CHECK(p.s.back() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(p.states.back().theta - 1.0) < 1e-12);
  CHECK(std::abs(shoot_distance(d, {0, 1.0, 0.5}, {T, 1.0, 0.5}).distance - 1) < 1e-6);
}

TEST_CASE("geodesic equations on delta: straight lines, speed, minima of T") {
  const AnnulusField d = build_delta(1.0, 2.0, GridSpec{64, 128, 129});
  // start on the leaf t = 1 heading slightly inward and tangentially
  GeodesicState y{1.0, 1.2, 0.3, -0.2, 0.0, 1.0};
  const GeodesicPath p = integrate_geodesic(d, y, 1.0);
  CHECK(p.max_speed_drift < 1e-6);
  REQUIRE(p.zero_dT.size() == 1);
  const auto& ev = p.zero_dT.front();
  CHECK(ev.HA > 0);
  CHECK(std::abs(ev.T2 - ev.HA) < 1e-6);
  // Endpoint agrees with the Euclidean straight line.
  auto cart = [](const GeodesicState& s) {
    const double r = std::exp(s.T / 2);
    return std::array<double, 3>{r * std::sin(s.theta) * std::cos(s.phi),
                                 r * std::sin(s.theta) * std::sin(s.phi), r * std::cos(s.theta)};
  };
  const auto a = cart(p.states.front()), b = cart(p.states.back());
  double chord = 0;
  for (int c = 0; c < 3; ++c) chord += (a[c] - b[c]) * (a[c] - b[c]);
  CHECK(std::abs(std::sqrt(chord) - p.s.back()) < 1e-6);
}

TEST_CASE("Clairaut shooting reproduces Euclidean distances outside a ball") {
  const double r0 = 1.3, T = 1.0;
  const AnnulusField d = build_delta(r0, T, GridSpec{16, 32, 129});
  const Shooter sh(d);
  CHECK(sh.reduced());
  std::mt19937_64 rng(11);
  double worst = 0;
  for (int n = 0; n < 200; ++n) {
    const AnnulusPoint p = random_point(rng, 0, T), q = random_point(rng, 0, T);
    const double ex = euclid_outside_ball(r0 * std::exp(p.t / 2), r0 * std::exp(q.t / 2),
                                          sphere_angle(p, q), r0);
    worst = std::max(worst, std::abs(sh.distance(p, q).distance - ex));
  }
  CHECK(worst < 1e-8);
  // antipodal inner pair hugs the inner sphere
  CHECK(sh.distance({0, 0.4, 0.1}, {0, kPi - 0.4, 0.1 + kPi}).distance ==
        doctest::Approx(kPi * r0).epsilon(1e-12));
  CHECK(sh.distance({0.5, 1, 1}, {0.5, 1, 1}).distance == 0);
  // sub-window: the ball grows to the window's lower leaf
  const Shooter sub(d, ShootOptions{0.2, 0.8});
  for (int n = 0; n < 50; ++n) {
    const AnnulusPoint p = random_point(rng, 0.2, 0.8), q = random_point(rng, 0.2, 0.8);
    const double ex = euclid_outside_ball(r0 * std::exp(p.t / 2), r0 * std::exp(q.t / 2),
                                          sphere_angle(p, q), r0 * std::exp(0.1));
    CHECK(sub.distance(p, q).distance == doctest::Approx(ex).epsilon(1e-8));
  }
}

TEST_CASE("graph oracle: radial and antipodal pairs") {
  const double T = 2 * std::log(2.0);
  const AnnulusField d = build_delta(1.0, T, GridSpec{16, 32, 65});
  double prev_err = 1e9;
  for (int r : {1, 2, 4}) {
    const GridGraph g(d, r);
    CHECK(g.distance({0.3, 1.0, 0.5}, {0.3, 1.0, 0.5}) == 0);
    std::mt19937_64 rng(1);
    double mean = 0;
    for (int n = 0; n < 10; ++n) {
      const AnnulusPoint p = random_point(rng, 0, 0);
      const double rad = g.distance(p, {T, p.theta, p.phi});
      CHECK(rad >= 1 - 1e-12);
      CHECK(rad - 1 < 2 * g.h());
      const double anti = g.distance(p, {0, kPi - p.theta, p.phi + kPi});
      CHECK(std::abs(anti - kPi) < 3 * g.h());
      mean += std::abs(anti - kPi) / 10;
    }
    // first order: halving h roughly halves the mean error
    CHECK(mean < 0.75 * prev_err);
    prev_err = mean;
  }
}

TEST_CASE("graph windows are subgraphs") {
  const AnnulusField d = build_delta(1.0, 1.0, GridSpec{16, 32, 33});
  const GridGraph g(d, 1, {0.1, 0.9});
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const AnnulusPoint p = random_point(rng, 0.1, 0.9), q = random_point(rng, 0.1, 0.9);
    const double full = g.distances(p, {q}).front();
    const double sub = g.distances(p, {q}, 0.1, 0.9).front();
    CHECK(sub >= full);
  }
}

TEST_CASE("shooting vs graph on flat and Schwarzschild annuli") {
  FamilyParams sp;
  sp.kind = FamilyKind::schwarzschild;
  sp.m = 0.1;
  sp.r0 = 1;
  const double T = 1;
  const AnnulusField fl = build_delta(1.0, T, GridSpec{16, 32, 65});
  const AnnulusField sw =
      reparam_to_imcf_time(make_profile_for_time(sp, T), T, GridSpec{16, 32, 65});
  std::mt19937_64 rng(5);
  for (const AnnulusField* f : {&fl, &sw}) {
    const Shooter sh(*f);
    const GridGraph g(*f, 2);
    const double diam = kPi * std::exp(T / 2) + 2;
    for (int n = 0; n < 20; ++n) {
      const AnnulusPoint p = random_point(rng, 0, T), q = random_point(rng, 0, T);
      const double a = sh.distance(p, q).distance, b = g.distance(p, q);
      CHECK(std::abs(a - b) <= 3 * g.h() * diam);
      CHECK(b >= a - 1e-9);
    }
  }
}

TEST_CASE("Nelder-Mead shooting agrees with the reduced solver") {
  FamilyParams sp;
  sp.kind = FamilyKind::schwarzschild;
  sp.m = 0.1;
  sp.r0 = 1;
  const double T = 1;
  AnnulusField sw = reparam_to_imcf_time(make_profile_for_time(sp, T), T, GridSpec{24, 48, 65});
  const Shooter red(sw);
  AnnulusField gen = sw;
  gen.rotsym = false;
  const Shooter nm(gen);
  CHECK_FALSE(nm.reduced());
  CHECK(nm.convex());
  const AnnulusPoint pairs[][2] = {{{0.1, 1.2, 0.3}, {0.8, 1.6, 1.1}},
                                   {{0.5, 1.4, 2.0}, {0.3, 1.9, 2.6}}};
  for (const auto& pq : pairs) {
    const ShootResult a = red.distance(pq[0], pq[1]);
    const ShootResult b = nm.distance(pq[0], pq[1]);
    CHECK(b.method == "nelder-mead");
    CHECK_FALSE(b.fallback);
    CHECK(b.distance == doctest::Approx(a.distance).epsilon(1e-5));
  }
}
