#pragma once

#include "hygronet/netgen.hpp"
#include "hygronet/quadrature.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hygronet {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// One line: "PASS  3  <name>: <detail> (<seconds> s)".
std::string format_result(const CriterionResult& r);

/// Ids 1 to 10.
std::vector<int> all_criteria();
/// Criteria that finish in a few seconds.
std::vector<int> quick_criteria();

/// Runs one acceptance criterion. Exceptions thrown by the pipeline are
/// caught and reported as a failure.
CriterionResult run_criterion(int id);

/// Runs the given ids in order, calling report after each.
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids,
                                          const std::function<void(const CriterionResult&)>& report = {});

// Individual checks, exposed for the test suite.
namespace checks {

struct StripRow {
  int n_div = 0;
  double stress_ratio = 0.0;
  double area_ratio = 0.0;
  double seconds = 0.0;
};
StripRow strip_row(int n_div, bool centroid_fem);

struct ProfileComparison {
  double max_dev_bond = 0.0;   ///< within one coarse element of a bond edge
  double max_dev_other = 0.0;  ///< elsewhere
  int samples = 0;
  int missing = 0;
};
ProfileComparison cross_section_comparison(int coarse_div, int reference_div, int samples);

struct QuadratureOracle {
  double max_error = 0.0;       ///< relative to the exact clipped area
  double max_error_half = 0.0;  ///< same pairs at half the tolerance
  double mean_error = 0.0;
  double mean_error_half = 0.0;
  int pairs = 0;
};
QuadratureOracle quadrature_oracle(int pairs, double tol_frac, unsigned long long seed);

/// Exact area of fibre ∩ triangle by polygon clipping.
double clipped_area(const Fibre& fibre, const Triangle& tri);

}  // namespace checks

}  // namespace hygronet
