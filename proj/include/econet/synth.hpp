#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "econet/network.hpp"

namespace econet {

// Generative-model sampler with known ground truth, for recovery tests.
struct SynthSpec {
  int I = 100, J = 50, K_true = 4;
  std::vector<double> alpha_true;  // empty -> symmetric 50/K; size 1 or K
  std::vector<double> beta_true;   // empty -> symmetric 0.1; size 1 or J
  int tokens_min = 10, tokens_max = 10;  // equal -> fixed count
  enum class Plan { aligned, mixed, custom };
  Plan plan = Plan::aligned;
  int n_neighborhoods = 0;  // mixed plan; 0 -> K_true
  std::vector<std::string> custom_map;  // custom plan, length I
  // keep never-drawn location columns instead of compacting them; useful
  // when a test needs the network's J to equal the spec's J exactly
  bool keep_all_locations = false;
  std::uint64_t seed = 0;
};

struct SynthTruth {
  std::vector<double> W;  // I x K_true row-major
  std::vector<double> H;  // K_true x J row-major, over the full J locations
  std::vector<int> labels;  // modal community per individual
  // network column -> original location index (locations never drawn are
  // dropped so the network invariants hold)
  std::vector<int> kept_locations;
};

struct SynthResult {
  EcoNetwork net;
  SynthTruth truth;
};

// Tokens are drawn with replacement, faithful to the generative model.
// Deterministic given spec.seed.
SynthResult generate(const SynthSpec& spec);

// truth.H restricted to the network's kept locations, rows renormalized;
// aligns the truth with a model fitted on the generated network.
std::vector<double> truth_profiles_on(const SynthResult& synth);

struct MatchResult {
  std::vector<int> perm;          // est community k -> true community perm[k]
  std::vector<double> distances;  // L1 distance per matched pair
  double total = 0;
};

// Resolves label switching: the community permutation minimizing total L1
// distance between matched profile rows. Exhaustive for K <= 8, greedy with
// pairwise refinement above.
MatchResult match_communities(const std::vector<double>& h_est,
                              const std::vector<double>& h_true, int K, int J);

}  // namespace econet
