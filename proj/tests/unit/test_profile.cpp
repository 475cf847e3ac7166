#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "imcflab/common.hpp"
#include "imcflab/leaf.hpp"
#include "imcflab/profile.hpp"

using namespace imcf;

namespace {

FamilyParams schw(double m, double r0) {
  FamilyParams p;
  p.kind = FamilyKind::schwarzschild;
  p.m = m;
  p.r0 = r0;
  return p;
}

// Arclength of Schwarzschild from areal radius r0 to f, in closed form.
double schw_arclength(double m, double r0, double f) {
  auto S = [m](double r) {
    return std::sqrt(r * (r - 2 * m)) + 2 * m * std::log(std::sqrt(r) + std::sqrt(r - 2 * m));
  };
  return S(f) - S(r0);
}

}  // namespace

TEST_CASE("flat profile") {
  FamilyParams p;
  p.r0 = 1;
  const auto pr = make_profile(p, 2.0, 201);
  CHECK(pr.eval_f(1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(pr.eval_fp(0.37) == doctest::Approx(1.0).epsilon(1e-15));
  const auto H = mean_curvature_profile(pr);
  CHECK(H[0] == doctest::Approx(2.0));
  for (double R : scalar_curvature_profile(pr)) CHECK(R == 0.0);
  for (double m : hawking_mass_profile(pr)) CHECK(m == 0.0);
  for (double s : {0.0, 0.3, 1.7}) {
    CHECK(imcf_time_of_s(pr, s) == doctest::Approx(2 * std::log(1 + s)).epsilon(1e-14));
    const double t = 2 * std::log(1 + s);
    CHECK(s_of_imcf_time(pr, t) == doctest::Approx(std::exp(t / 2) - 1).epsilon(1e-13));
  }
  CHECK(imcf_time_of_s(pr, 0.0) == 0.0);
}

TEST_CASE("Schwarzschild profile matches the closed-form arclength") {
  const auto pr = make_profile(schw(1.0, 3.0), 4.0, 2001);
  CHECK(pr.fp[0] == doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-15));
  double worst = 0;
  for (size_t i = 0; i < pr.s.size(); i += 50)
    worst = std::max(worst, std::abs(schw_arclength(1.0, 3.0, pr.f[i]) - pr.s[i]));
  CHECK(worst < 1e-10);
  const auto H = mean_curvature_profile(pr);
  CHECK(H[0] == doctest::Approx(2.0 / 3 * std::sqrt(1.0 / 3)).epsilon(1e-14));
  for (double R : scalar_curvature_profile(pr)) CHECK(std::abs(R) < 1e-8);
  for (double m : hawking_mass_profile(pr)) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
  // between nodes the interpolant keeps R ~ 0
  for (double s : {0.0123, 1.777, 3.99}) CHECK(std::abs(scalar_curvature_at(pr, s)) < 1e-8);
  // H -> 0 at the horizon
  const auto near = make_profile(schw(1.0, 2.0 + 1e-8), 0.01, 101);
  CHECK(mean_curvature_profile(near)[0] < 1e-4);
  CHECK_THROWS_AS(make_profile(schw(1.0, 2.0), 1.0), InputError);
}

TEST_CASE("unit S^3 cap has R = 6") {
  std::vector<double> s;
  for (int i = 0; i <= 400; ++i) s.push_back(0.1 + 1.3 * i / 400.0);
  const auto pr = profile_from_functions(
      s, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
      [](double x) { return -std::sin(x); }, "cap");
  for (double R : scalar_curvature_profile(pr)) CHECK(R == doctest::Approx(6.0).epsilon(1e-12));
  std::vector<double> fs;
  for (double x : s) fs.push_back(std::sin(x));
  const auto sp = profile_from_samples(s, fs, "cap-samples");
  const auto R = scalar_curvature_profile(sp);
  for (size_t i = 40; i + 40 < R.size(); ++i) CHECK(R[i] == doctest::Approx(6.0).epsilon(1e-3));
}

TEST_CASE("reparam: area law and mass agreement on Schwarzschild") {
  const double T = 2 * std::log(2.0);
  const auto pr = make_profile_for_time(schw(1.0, 3.0), T);
  const AnnulusField f = reparam_to_imcf_time(pr, T, GridSpec{16, 32, 17});
  for (int k = 0; k < f.time.n_t; ++k) {
    const double t = f.time.t(k);
    CHECK(std::abs(leaf_area(f, k) - 36 * kPi * std::exp(t)) < 1e-10 * 36 * kPi * std::exp(t));
    CHECK(std::abs(hawking_mass(f, k) - 1.0) < 1e-8);
    const double s = s_of_imcf_time(pr, t);
    CHECK(std::abs(imcf_time_of_s(pr, s) - t) < 1e-12);
  }
  for (double s : {0.0, 0.5, 1.25, 2.5})
    CHECK(std::abs(s_of_imcf_time(pr, imcf_time_of_s(pr, s)) - s) < 1e-10);
  CHECK_THROWS_AS(reparam_to_imcf_time(pr, T + 1, GridSpec{8, 16, 5}), InputError);
}

TEST_CASE("gravity well") {
  FamilyParams w;
  w.kind = FamilyKind::gravity_well;
  w.r0 = 1;
  w.well_start = 0.2;
  w.well_width = 0.3;
  w.well_recovery = 1;
  w.well_depth = 1e-9;
  const auto pr = make_profile(w, 1.0, 501);
  for (size_t i = 0; i < pr.s.size(); ++i) CHECK(std::abs(pr.f[i] - (1 + pr.s[i])) < 1e-9);
  // f is the exact antiderivative of f'
  w.well_depth = 0.6;
  const auto q = make_profile(w, 1.0, 2001);
  double integral = 1.0;
  for (size_t i = 1; i < q.s.size(); ++i) {
    const double a = q.s[i - 1], b = q.s[i], mid = 0.5 * (a + b);
    integral += (b - a) / 6 * (q.fp[i - 1] + 4 * q.eval_fp(mid) + q.fp[i]);
    CHECK(std::abs(integral - q.f[i]) < 1e-9);
  }
  CHECK(*std::min_element(q.fp.begin(), q.fp.end()) == doctest::Approx(0.4).epsilon(1e-12));
  w.well_depth = 1.0;
  CHECK_THROWS_AS(make_profile(w, 1.0), InputError);
}

TEST_CASE("Geroch monotonicity on wells with R >= 0") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  int kept = 0;
  while (kept < 10) {
    FamilyParams w;
    w.kind = FamilyKind::gravity_well;
    w.r0 = 0.5 + U(rng);
    w.well_depth = 0.8 * U(rng);
    w.well_width = 0.1 + U(rng);
    w.well_start = U(rng);
    w.well_recovery = 0.3 * U(rng);
    w.well_recovery_width = 1 + 3 * U(rng);
    const auto pr = make_profile(w, 4.0, 2001);
    const auto R = scalar_curvature_profile(pr);
    if (*std::min_element(R.begin(), R.end()) < 0) continue;
    ++kept;
    const auto m = hawking_mass_profile(pr);
    for (size_t i = 1; i < m.size(); ++i) CHECK(m[i] >= m[i - 1] - 1e-10);
    CHECK(m.front() >= -1e-15);
  }
}

TEST_CASE("class membership report") {
  const AnnulusField d = build_delta(1.0, 1.0, GridSpec{12, 24, 9});
  ClassBounds b;
  b.r0 = 1;
  b.H0 = 0.5;
  b.H1 = 2.5;
  b.A1 = 3;
  b.T = 1;
  auto rep = validate_class_membership(d, b);
  CHECK(rep.all_pass());
  // |A| = H / sqrt(2) for umbilic leaves
  CHECK(rep.get("A_bound").worst == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(rep.get("H_lower").worst == doctest::Approx(2 * std::exp(-0.5)).epsilon(1e-12));
  b.H1 = 1;
  rep = validate_class_membership(d, b);
  CHECK_FALSE(rep.get("H_upper").pass);
  CHECK(rep.get("H_upper").node < d.leaf_size());

  const auto pr = make_profile_for_time(schw(1.0, 2.01), 1.0);
  const AnnulusField s = reparam_to_imcf_time(pr, 1.0, GridSpec{12, 24, 9});
  ClassBounds bs;
  bs.r0 = 2.01;
  bs.H0 = 0.01;
  bs.H1 = 1;
  bs.A1 = 1;
  rep = validate_class_membership(s, bs);
  const double Hin = 2 * std::sqrt(1 - 2 / 2.01) / 2.01;
  CHECK(rep.get("H_lower").worst == doctest::Approx(Hin).epsilon(1e-10));
  CHECK(rep.get("H_lower").margin < 0.1);
  CHECK(rep.get("hawking_mass_nonneg").pass);
}

TEST_CASE("profile CSV and sidecar") {
  const auto pr = make_profile(schw(0.1, 1.0), 1.0, 11);
  const auto path = (std::filesystem::temp_directory_path() / "imcflab_profile.csv").string();
  write_profile_csv(pr, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "s,f,fp,fpp,R,H,m_H");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 11);
  CHECK(std::filesystem::exists(path + ".json"));
  std::filesystem::remove(path);
  std::filesystem::remove(path + ".json");
}
