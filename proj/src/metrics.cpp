#include "econet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "econet/errors.hpp"

namespace econet {

double gini(std::span<const double> w) {
  const int K = static_cast<int>(w.size());
  if (K == 0) throw ValidationError("gini: empty vector");
  double total = 0.0;
  for (double v : w) {
    if (v < 0.0) throw ValidationError("gini: negative entry");
    total += v;
  }
  if (total <= 0.0) throw ValidationError("gini: all-zero vector");
  // sum_{k,l} |w_k - w_l| = 2 * sum_k (2k - K - 1) w_(k) on the sorted vector.
  // The coefficients sum to zero, so shifting every entry by the minimum
  // leaves the value unchanged while making equal-entry inputs exactly 0.
  std::vector<double> sorted(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end());
  double num = 0.0;
  for (int k = 1; k <= K; ++k)
    num += (2.0 * k - K - 1.0) * (sorted[k - 1] - sorted[0]);
  return std::max(0.0, num / (K * total));
}

int modal_community(std::span<const double> w) {
  if (w.empty()) throw ValidationError("modal_community: empty vector");
  int best = 0;
  for (int k = 1; k < static_cast<int>(w.size()); ++k)
    if (w[k] > w[best]) best = k;
  return best;
}

double total_variation(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n < 2) throw ValidationError("total_variation: need at least 2 rows");
  const int K = static_cast<int>(rows[0].size());
  for (auto& row : rows) {
    if (static_cast<int>(row.size()) != K)
      throw ValidationError("total_variation: ragged rows");
    for (double v : row)
      if (!(v > 0.0))
        throw ValidationError("total_variation: entries must be positive");
  }
  // (1/2K) sum_{i,j} var(log X_i/X_j) equals the component-wise variance of
  // the clr transform (each row's log values centered at their mean)
  std::vector<std::vector<double>> clr(n, std::vector<double>(K));
  for (int l = 0; l < n; ++l) {
    double mean_log = 0.0;
    for (int k = 0; k < K; ++k) {
      clr[l][k] = std::log(rows[l][k]);
      mean_log += clr[l][k];
    }
    mean_log /= K;
    for (int k = 0; k < K; ++k) clr[l][k] -= mean_log;
  }
  double totvar = 0.0;
  for (int k = 0; k < K; ++k) {
    double mean = 0.0;
    for (int l = 0; l < n; ++l) mean += clr[l][k];
    mean /= n;
    double ss = 0.0;
    for (int l = 0; l < n; ++l) {
      double d = clr[l][k] - mean;
      ss += d * d;
    }
    totvar += ss / (n - 1);
  }
  return totvar;
}

std::vector<IndividualMetrics> individual_metrics(const EcoNetwork& net,
                                                  const CommunityModel& model) {
  if (net.num_individuals() != model.I || net.individuals != model.individuals)
    throw ValidationError("model was not fitted on this network's individuals");
  std::vector<IndividualMetrics> out(model.I);
  for (int i = 0; i < model.I; ++i) {
    std::span<const double> row(model.W.data() + static_cast<std::size_t>(i) * model.K,
                                static_cast<std::size_t>(model.K));
    out[i].individual = net.individuals[i];
    out[i].neighborhood = net.neighborhood_of[i];
    out[i].modal_community = modal_community(row);
    out[i].modal_probability = row[out[i].modal_community];
    out[i].gini = gini(row);
    out[i].n_locations = net.token_count(i);
  }
  return out;
}

std::vector<NeighborhoodSummary> summarize_neighborhoods(
    const EcoNetwork& net, const CommunityModel& model) {
  auto indiv = individual_metrics(net, model);

  // first-appearance order of neighborhoods
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<int>> groups;
  for (int i = 0; i < net.num_individuals(); ++i) {
    auto [it, inserted] = groups.try_emplace(net.neighborhood_of[i]);
    if (inserted) order.push_back(net.neighborhood_of[i]);
    it->second.push_back(i);
  }

  std::vector<NeighborhoodSummary> out;
  out.reserve(order.size());
  for (const auto& name : order) {
    const auto& members = groups[name];
    NeighborhoodSummary s;
    s.neighborhood = name;
    s.n_individuals = static_cast<int>(members.size());

    std::map<int, int> modal_counts;
    for (int i : members) {
      s.mean_gini += indiv[i].gini;
      s.mean_n_locations += static_cast<double>(indiv[i].n_locations);
      ++modal_counts[indiv[i].modal_community];
    }
    s.mean_gini /= s.n_individuals;
    s.mean_n_locations /= s.n_individuals;
    s.n_modal_communities = static_cast<int>(modal_counts.size());
    int largest = 0;
    for (auto& [k, c] : modal_counts) largest = std::max(largest, c);
    s.largest_modal_share = static_cast<double>(largest) / s.n_individuals;

    if (s.n_individuals == 1) {
      s.share_modal = 1.0;
      s.share_modal_singleton = true;
    } else {
      long same = 0;
      for (auto& [k, c] : modal_counts) same += static_cast<long>(c) * (c - 1) / 2;
      long pairs = static_cast<long>(s.n_individuals) *
                   (s.n_individuals - 1) / 2;
      s.share_modal = static_cast<double>(same) / static_cast<double>(pairs);

      std::vector<std::vector<double>> panel;
      panel.reserve(members.size());
      for (int i : members)
        panel.emplace_back(model.W.begin() + static_cast<std::size_t>(i) * model.K,
                           model.W.begin() + static_cast<std::size_t>(i + 1) * model.K);
      s.total_variation = total_variation(panel);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace econet
