#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "imcflab/config.hpp"

namespace imcf {

struct MemberRow {
  int index = 0;  // 1-based
  double parameter = 0;
  std::string status = "ok";  // or the construction error
  double hawking_mass_T = 0;
  double uniform_distance = 0;
  double l2_metric_gap = 0;
  double sup_metric_gap = 0;
  std::vector<double> gotozero_gaps;  // GoToZeroReport::names() order
  double swif_excision = 0;           // total at the report k
  std::vector<double> swif_by_k;      // k_min .. k_max
  bool class_ok = false;
  bool scalar_nonneg = false;
  bool shooting_exact = false;  // no graph fallback in the distance samples
  bool ok() const { return status == "ok" && class_ok && scalar_nonneg; }
};
// NaN entries (failed members) compare equal to NaN.
bool same_row(const MemberRow& a, const MemberRow& b);

struct ConvergenceReport {
  std::string name;
  std::uint64_t seed = 0;
  GridSpec grid;
  int k_min = 1, k_max = 0, report_k = 0;
  std::vector<std::string> gap_names;
  std::vector<MemberRow> rows;
  bool all_ok() const;
  bool operator==(const ConvergenceReport& o) const;
};

// Members run on `c.jobs` threads; rows come back in member order.
ConvergenceReport run_sequence(const ExperimentConfig& c);

std::string report_csv(const ConvergenceReport& r);
std::string report_json(const ConvergenceReport& r);
ConvergenceReport report_from_json(const std::string& text);
// Writes <dir>/<name>.csv and/or .json; returns the written paths.
std::vector<std::string> emit_report(const ConvergenceReport& r, const std::string& dir,
                                     const std::string& name, const std::string& format);

}  // namespace imcf
