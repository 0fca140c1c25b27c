#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "econet/lda.hpp"
#include "econet/network.hpp"

namespace econet {

// Gini dispersion of a nonnegative vector: sum of all pairwise absolute
// differences over 2K times the vector sum. 0 for a uniform vector,
// 1 - 1/K for a one-hot vector.
double gini(std::span<const double> w);

// zero-based index of the largest entry; ties go to the lowest index
int modal_community(std::span<const double> w);

// Aitchison total variation of a panel of compositions (rows strictly
// positive, need not be normalized): (1/2K) sum over all ordered component
// pairs of the sample variance (divisor n-1) of their log-ratio.
double total_variation(const std::vector<std::vector<double>>& rows);

struct IndividualMetrics {
  std::string individual;
  std::string neighborhood;
  int modal_community = 0;  // zero-based
  double modal_probability = 0;
  double gini = 0;
  long n_locations = 0;  // N_i
};

struct NeighborhoodSummary {
  std::string neighborhood;
  int n_individuals = 0;
  double mean_gini = 0;
  double mean_n_locations = 0;
  // fraction of unordered co-resident pairs with equal modal labels;
  // singleton neighborhoods report 1 with the flag set
  double share_modal = 0;
  bool share_modal_singleton = false;
  // alternative estimator: size of the largest modal group over n_c
  double largest_modal_share = 0;
  int n_modal_communities = 0;
  std::optional<double> total_variation;  // absent when n_c < 2
};

std::vector<IndividualMetrics> individual_metrics(const EcoNetwork& net,
                                                  const CommunityModel& model);

std::vector<NeighborhoodSummary> summarize_neighborhoods(
    const EcoNetwork& net, const CommunityModel& model);

}  // namespace econet
