#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imcflab/field.hpp"
#include "imcflab/grid.hpp"
#include "imcflab/profile.hpp"

namespace imcf {

// Sequence of member parameters. `parameter` names the FamilyParams field that varies.
struct SequenceSpec {
  std::string parameter = "m";  // m, well_depth, well_width, none
  std::string law = "inverse";  // inverse: scale / i^power; geometric: scale ratio^(i-1); list
  int members = 20;
  double scale = 1, power = 1, ratio = 0.5;
  std::vector<double> values;
  std::vector<double> expand() const;
};

// Window [t1, t2] = [T/(scale k), T - T/(scale k)].
struct CollarSchedule {
  double scale = 10;
  int k_min = 1, k_max = 6;
  int report_k = 3;
  double t1(double T, int k) const { return T / (scale * k); }
  double t2(double T, int k) const { return T - T / (scale * k); }
  // C_k of the class sequence; stored and echoed, not used by any estimator
  double C(int k) const { return k; }
};

struct ExperimentConfig {
  std::string name = "experiment";
  FamilyParams family;
  double T = 1;
  SequenceSpec sequence;
  GridSpec grid;
  CollarSchedule collar;
  // Class bounds; zero H1 or A1 means unbounded.
  double H0 = 0, H1 = 0, A1 = 0;
  int sample_dirs = 12, sample_levels = 5, random_points = 0;
  int excision_dirs = 12, excision_levels = 3;
  double gap_slack = 1e-8;
  double scalar_tol = 1e-8;
  std::string out_dir = ".";
  std::string out_name = "report";
  std::string format = "csv";  // csv, json, both
  std::uint64_t seed = 1;
  int graph_refinement = 2;
  std::string reference = "delta";
  int jobs = 1;

  // Member i (0-based) of the family sequence.
  FamilyParams member(int i) const;
  ClassBounds class_bounds() const;
};

// INI sections: experiment, family, sequence, grid, collar, bounds, samples,
// tolerances, output, rng, geodesic, compare. Unknown sections or keys throw InputError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& c);
// Canonical INI text; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& c);

GridSpec parse_grid(const std::string& s);  // "n_theta,n_phi,n_t"

}  // namespace imcf
