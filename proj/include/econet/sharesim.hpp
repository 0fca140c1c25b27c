#pragma once

#include <cstdint>
#include <vector>

#include "econet/lda.hpp"

namespace econet {

// Probability that two independent uniformly random n-subsets of J locations
// intersect: 1 - C(J-n, n)/C(J, n), evaluated in log space.
double analytic_share_probability(int n, long J);

struct ShareCurve {
  struct Point {
    double mean = 0;
    double sd = 0;
  };
  std::vector<int> n_values;
  std::vector<Point> within;
  std::vector<Point> between;
  std::vector<double> analytic;
};

struct ShareSimOptions {
  int pairs_per_n = 10000;
  std::uint64_t seed = 0;
  int jobs = 1;
  // strata are communities (within) or ordered distinct community pairs
  // (between), drawn proportional to modal-count sizes unless uniform
  bool uniform_strata = false;
  long analytic_J = 0;  // 0 -> model J
};

// For each n, draws pseudo-individual pairs: a stratum is sampled per pair,
// each member's n locations are drawn without replacement from its
// community's activity pattern profile, and set intersection is recorded.
// mean = pooled success fraction; sd = sample SD of per-stratum means.
// Deterministic given (model, n_values, options); (n, series) cells run in
// parallel when jobs > 1 with scheduling-independent substreams.
ShareCurve simulate_share_curve(const CommunityModel& model,
                                const std::vector<int>& n_values,
                                const ShareSimOptions& options);

}  // namespace econet
