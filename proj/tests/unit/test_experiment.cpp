#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "imcflab/common.hpp"
#include "imcflab/config.hpp"
#include "imcflab/experiment.hpp"

using namespace imcf;

namespace {

const char* kSmall = R"(
[experiment]
name = small
[family]
kind = schwarzschild
r0 = 1
T = 1
[sequence]
parameter = m
law = list
values = 0.2, 0.1, 0.05, 0.025
[grid]
n_theta = 12
n_phi = 24
n_t = 33
[collar]
k_min = 1
k_max = 3
report_k = 2
[samples]
directions = 6
levels = 3
random_points = 4
excision_directions = 6
excision_levels = 2
[rng]
seed = 7
)";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(kSmall);
  CHECK(c.name == "small");
  CHECK(c.family.kind == FamilyKind::schwarzschild);
  CHECK(c.sequence.members == 4);
  CHECK(c.member(2).m == 0.05);
  CHECK(c.grid.n_t == 33);
  CHECK(c.seed == 7);
  CHECK(c.collar.t1(1.0, 2) == doctest::Approx(0.05));
  CHECK(c.collar.t2(1.0, 2) == doctest::Approx(0.95));

  const auto d = parse_config("");
  CHECK(d.grid.n_theta == 64);
  CHECK(d.grid.n_phi == 128);
  CHECK(d.grid.n_t == 256);

  const auto inv = parse_config("[sequence]\nlaw = inverse\nmembers = 20\n");
  const auto v = inv.sequence.expand();
  REQUIRE(v.size() == 20);
  for (int i = 0; i < 20; ++i) CHECK(v[i] == 1.0 / (i + 1));
}

TEST_CASE("config round trip through INI text") {
  const auto c = parse_config(kSmall);
  const auto d = parse_config(to_ini(c));
  CHECK(to_ini(d) == to_ini(c));
  CHECK(d.sequence.values == c.sequence.values);
  CHECK(d.family.m == c.family.m);
}

TEST_CASE("config rejections") {
  CHECK_THROWS_AS(parse_config("[family]\nkind = flat\ncolour = red\n"), InputError);
  CHECK_THROWS_AS(parse_config("[plot]\nx = 1\n"), InputError);
  CHECK_THROWS_AS(parse_config("[family]\nr0 = one\n"), InputError);
  CHECK_THROWS_AS(parse_config("[family]\nr0 = 1.5x\n"), InputError);
  CHECK_THROWS_AS(parse_config("[family]\nkind = torus\n"), InputError);
  CHECK_THROWS_AS(parse_config("[grid]\nn_phi = 7\n"), InputError);
  CHECK_THROWS_AS(parse_config("[collar]\nk_min = 3\nk_max = 2\nreport_k = 3\n"), InputError);
  CHECK_THROWS_AS(parse_config("[collar]\nscale = 1\n"), InputError);
  CHECK_THROWS_AS(parse_config("[output]\nformat = xml\n"), InputError);
  CHECK_THROWS_AS(parse_config("[sequence]\nlaw = list\n"), InputError);
  CHECK_THROWS_AS(parse_config("[rng]\nseed = -3\n"), InputError);
  CHECK_THROWS_AS(parse_grid("16,32"), InputError);
  CHECK(parse_grid("16,32,9").n_t == 9);
}

TEST_CASE("sequence run") {
  auto c = parse_config(kSmall);
  const auto r = run_sequence(c);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.all_ok());
  for (size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    CHECK(row.index == static_cast<int>(i) + 1);
    CHECK(row.hawking_mass_T == doctest::Approx(c.sequence.values[i]).epsilon(1e-10));
    CHECK(row.swif_by_k.size() == 3);
    CHECK(row.swif_excision == row.swif_by_k[1]);
    CHECK(row.gotozero_gaps.size() == 9);
    if (i > 0) {
      CHECK(row.uniform_distance < r.rows[i - 1].uniform_distance);
      CHECK(row.l2_metric_gap < r.rows[i - 1].l2_metric_gap);
    }
  }
  c.jobs = 3;
  CHECK(run_sequence(c) == r);
  CHECK(report_csv(run_sequence(c)) == report_csv(r));
}

TEST_CASE("constant flat family has vanishing distances") {
  auto c = parse_config(kSmall);
  c.family.kind = FamilyKind::flat;
  c.sequence.parameter = "none";
  const auto r = run_sequence(c);
  for (const auto& row : r.rows) {
    CHECK(row.uniform_distance < 1e-9);
    CHECK(row.l2_metric_gap < 1e-20);
    CHECK(row.sup_metric_gap < 1e-12);
    CHECK(row.hawking_mass_T == 0);
    CHECK(row.parameter == 0);
  }
}

TEST_CASE("member construction failures are recorded") {
  auto c = parse_config(kSmall);
  c.sequence.values = {0.1, 0.6, 0.05};  // 0.6 puts r0 = 1 inside the horizon
  c.sequence.members = 3;
  const auto r = run_sequence(c);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].status == "ok");
  CHECK(r.rows[1].status.find("horizon") != std::string::npos);
  CHECK(std::isnan(r.rows[1].uniform_distance));
  CHECK(r.rows[2].status == "ok");
  CHECK_FALSE(r.all_ok());

  const auto back = report_from_json(report_json(r));
  CHECK(back == r);
}

TEST_CASE("report emission") {
  const std::string dir = "report_test_dir";
  ConvergenceReport empty;
  empty.name = "empty";
  empty.k_min = 1;
  empty.k_max = 2;
  empty.report_k = 1;
  empty.gap_names = {"R"};
  const auto paths = emit_report(empty, dir, "e", "csv");
  REQUIRE(paths.size() == 1);
  std::istringstream csv(slurp(paths[0]));
  std::string line;
  int comments = 0, other = 0;
  while (std::getline(csv, line)) (line.rfind("#", 0) == 0 ? comments : other)++;
  CHECK(comments == 4);
  CHECK(other == 1);

  auto c = parse_config(kSmall);
  const auto r = run_sequence(c);
  const auto both = emit_report(r, dir, "small", "both");
  REQUIRE(both.size() == 2);
  CHECK(report_from_json(slurp(both[1])) == r);
  std::istringstream rows(slurp(both[0]));
  int data = 0;
  while (std::getline(rows, line))
    if (!line.empty() && line[0] != '#') ++data;
  CHECK(data == 5);  // header + 4 members
  CHECK(slurp(both[0]).find("# seed,7") != std::string::npos);
  CHECK_THROWS_AS(report_from_json("{\"name\": 1}"), InputError);
  std::filesystem::remove_all(dir);
}
