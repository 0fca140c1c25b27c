#include "econet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>

#include "econet/errors.hpp"
#include "econet/lda.hpp"
#include "econet/metrics.hpp"
#include "econet/rng.hpp"

namespace econet {

SynthResult generate(const SynthSpec& spec) {
  if (spec.I < 1 || spec.J < 1 || spec.K_true < 1)
    throw ValidationError("I, J, K_true must be positive");
  if (spec.K_true > spec.J) throw ValidationError("K_true must not exceed J");
  if (spec.tokens_min < 1 || spec.tokens_max < spec.tokens_min)
    throw ValidationError("token count range invalid");
  if (spec.plan == SynthSpec::Plan::custom &&
      static_cast<int>(spec.custom_map.size()) != spec.I)
    throw ValidationError("custom neighborhood map must have length I");

  const int I = spec.I, J = spec.J, K = spec.K_true;
  std::vector<double> alpha =
      expand_prior(spec.alpha_true, K, 50.0 / K, "alpha_true");
  std::vector<double> beta = expand_prior(spec.beta_true, J, 0.1, "beta_true");

  Rng rng(spec.seed);
  SynthResult out;
  SynthTruth& truth = out.truth;
  truth.H.resize(static_cast<std::size_t>(K) * J);
  for (int k = 0; k < K; ++k)
    rng.dirichlet(beta, std::span<double>(truth.H.data() +
                                          static_cast<std::size_t>(k) * J, J));
  truth.W.resize(static_cast<std::size_t>(I) * K);
  for (int i = 0; i < I; ++i)
    rng.dirichlet(alpha, std::span<double>(truth.W.data() +
                                           static_cast<std::size_t>(i) * K, K));
  truth.labels.resize(I);
  for (int i = 0; i < I; ++i)
    truth.labels[i] = modal_community(std::span<const double>(
        truth.W.data() + static_cast<std::size_t>(i) * K, K));

  EcoNetwork& net = out.net;
  auto pad = [](int v, int width) {
    std::string s = std::to_string(v);
    return std::string(width > static_cast<int>(s.size())
                           ? width - static_cast<int>(s.size())
                           : 0, '0') + s;
  };
  for (int i = 0; i < I; ++i) net.individuals.push_back("i" + pad(i, 4));
  net.rows.resize(I);

  const int n_nbhd =
      spec.n_neighborhoods > 0 ? spec.n_neighborhoods : spec.K_true;
  for (int i = 0; i < I; ++i) {
    switch (spec.plan) {
      case SynthSpec::Plan::aligned:
        net.neighborhood_of.push_back("n" + pad(truth.labels[i], 2));
        break;
      case SynthSpec::Plan::mixed:
        net.neighborhood_of.push_back("n" + pad(rng.uniform_int(n_nbhd), 2));
        break;
      case SynthSpec::Plan::custom:
        net.neighborhood_of.push_back(spec.custom_map[i]);
        break;
    }
  }

  std::vector<std::map<int, int>> counts(I);
  for (int i = 0; i < I; ++i) {
    int n_tokens = spec.tokens_min == spec.tokens_max
                       ? spec.tokens_min
                       : spec.tokens_min +
                             rng.uniform_int(spec.tokens_max - spec.tokens_min + 1);
    std::span<const double> w_row(truth.W.data() + static_cast<std::size_t>(i) * K,
                                  static_cast<std::size_t>(K));
    for (int t = 0; t < n_tokens; ++t) {
      int k = rng.categorical(w_row);
      int j = rng.categorical(std::span<const double>(
          truth.H.data() + static_cast<std::size_t>(k) * J, J));
      ++counts[i][j];
    }
  }

  std::vector<int> loc_map(J, -1);
  if (spec.keep_all_locations) {
    for (int j = 0; j < J; ++j) {
      loc_map[j] = j;
      net.locations.push_back("loc" + pad(j, 4));
      truth.kept_locations.push_back(j);
    }
  }
  for (int i = 0; i < I; ++i) {
    for (auto& [j, c] : counts[i]) {
      if (loc_map[j] < 0) {
        loc_map[j] = net.num_locations();
        net.locations.push_back("loc" + pad(j, 4));
        truth.kept_locations.push_back(j);
      }
      net.rows[i].emplace_back(loc_map[j], c);
    }
  }
  return out;
}

std::vector<double> truth_profiles_on(const SynthResult& synth) {
  const int K = static_cast<int>(synth.truth.labels.empty()
                                     ? 0
                                     : synth.truth.W.size() /
                                           synth.truth.labels.size());
  const int Jn = synth.net.num_locations();
  const int J = static_cast<int>(synth.truth.H.size()) / K;
  std::vector<double> out(static_cast<std::size_t>(K) * Jn);
  for (int k = 0; k < K; ++k) {
    double total = 0.0;
    for (int jj = 0; jj < Jn; ++jj) {
      double v = synth.truth.H[static_cast<std::size_t>(k) * J +
                               synth.truth.kept_locations[jj]];
      out[static_cast<std::size_t>(k) * Jn + jj] = v;
      total += v;
    }
    for (int jj = 0; jj < Jn; ++jj)
      out[static_cast<std::size_t>(k) * Jn + jj] /= total;
  }
  return out;
}

namespace {

double l1_row_distance(const std::vector<double>& a, int ra,
                       const std::vector<double>& b, int rb, int J) {
  double d = 0.0;
  for (int j = 0; j < J; ++j)
    d += std::abs(a[static_cast<std::size_t>(ra) * J + j] -
                  b[static_cast<std::size_t>(rb) * J + j]);
  return d;
}

}  // namespace

MatchResult match_communities(const std::vector<double>& h_est,
                              const std::vector<double>& h_true, int K, int J) {
  if (h_est.size() != static_cast<std::size_t>(K) * J ||
      h_true.size() != static_cast<std::size_t>(K) * J)
    throw ValidationError("match_communities: K/J mismatch");

  std::vector<double> cost(static_cast<std::size_t>(K) * K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      cost[static_cast<std::size_t>(a) * K + b] =
          l1_row_distance(h_est, a, h_true, b, J);

  MatchResult result;
  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);

  if (K <= 8) {
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double c = 0.0;
      for (int a = 0; a < K; ++a)
        c += cost[static_cast<std::size_t>(a) * K + perm[a]];
      if (c < best_cost) {
        best_cost = c;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.perm = best;
  } else {
    // greedy assignment, then 2-swap refinement to a local optimum
    std::vector<bool> used(K, false);
    result.perm.assign(K, -1);
    for (int a = 0; a < K; ++a) {
      int best_b = -1;
      for (int b = 0; b < K; ++b)
        if (!used[b] &&
            (best_b < 0 || cost[static_cast<std::size_t>(a) * K + b] <
                               cost[static_cast<std::size_t>(a) * K + best_b]))
          best_b = b;
      result.perm[a] = best_b;
      used[best_b] = true;
    }
    bool improved = true;
    while (improved) {
      improved = false;
      for (int a = 0; a < K; ++a) {
        for (int b = a + 1; b < K; ++b) {
          double cur = cost[static_cast<std::size_t>(a) * K + result.perm[a]] +
                       cost[static_cast<std::size_t>(b) * K + result.perm[b]];
          double swapped = cost[static_cast<std::size_t>(a) * K + result.perm[b]] +
                           cost[static_cast<std::size_t>(b) * K + result.perm[a]];
          if (swapped + 1e-15 < cur) {
            std::swap(result.perm[a], result.perm[b]);
            improved = true;
          }
        }
      }
    }
  }

  result.distances.resize(K);
  for (int a = 0; a < K; ++a) {
    result.distances[a] = cost[static_cast<std::size_t>(a) * K + result.perm[a]];
    result.total += result.distances[a];
  }
  return result;
}

}  // namespace econet
