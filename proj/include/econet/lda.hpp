#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "econet/network.hpp"
#include "econet/rng.hpp"

namespace econet {

// alpha/beta: empty -> symmetric defaults (50/K and 0.1), size 1 -> symmetric
// with that value, size K (resp. J) -> per-component.
struct LdaConfig {
  int K = 10;
  std::vector<double> alpha;
  std::vector<double> beta;
  int iterations = 2000;
  int burn_in = 1000;
  std::uint64_t seed = 0;
  bool last_sweep_only = false;
};

// Fitted model. W is I x K row-major (community assignment vectors), H is
// K x J row-major (activity pattern profiles). Rows of both are strictly
// positive and sum to 1.
struct CommunityModel {
  LdaConfig config;
  int I = 0, K = 0, J = 0;
  std::vector<double> W;
  std::vector<double> H;
  std::vector<std::string> individuals;
  std::vector<std::string> locations;

  double w(int i, int k) const { return W[static_cast<std::size_t>(i) * K + k]; }
  double h(int k, int j) const { return H[static_cast<std::size_t>(k) * J + j]; }
};

// P(individual i's next token lands at location j) = W_i . H_.j
double token_probability(const CommunityModel& model, int i, int j);

// Collapsed Gibbs sampler over token-level community assignments. Exposed
// (rather than buried in fit) so tests can audit the count bookkeeping after
// individual sweeps.
class GibbsSampler {
 public:
  GibbsSampler(const EcoNetwork& net, const LdaConfig& config);

  void sweep();
  // adds the current smoothed count-ratio estimates to the running means
  void accumulate();
  int retained() const { return acc_count_; }
  CommunityModel finish(const EcoNetwork& net) const;

  // exact integer bookkeeping identities: row sums of counts_ik equal N_i,
  // row sums of counts_kj equal counts_k, and sum_k counts_k equals the
  // total token count
  bool counts_consistent() const;

  long total_tokens() const { return static_cast<long>(token_loc_.size()); }

 private:
  int K_, I_, J_;
  std::vector<double> alpha_, beta_;
  double alpha_sum_ = 0, beta_sum_ = 0;
  std::vector<int> token_loc_;      // flattened tokens, grouped by individual
  std::vector<int> token_offset_;   // I_+1 offsets into token_loc_
  std::vector<int> assign_;
  std::vector<long> n_ik_, n_kj_, n_k_;
  std::vector<double> prob_;        // scratch, length K_
  std::vector<double> w_acc_, h_acc_;
  int acc_count_ = 0;
  Rng rng_;

  void resample(int i, int t);
  friend CommunityModel fit(const EcoNetwork&, const LdaConfig&);
};

void validate_config(const LdaConfig& config, int J);
std::vector<double> expand_prior(const std::vector<double>& prior, int size,
                                 double symmetric_default, const char* name);

// Deterministic given config.seed: same net, config, and seed give a
// bitwise-identical model.
CommunityModel fit(const EcoNetwork& net, const LdaConfig& config);

struct FoldInConfig {
  int sweeps = 50;
  int averaged_last = 25;
  std::uint64_t seed = 0;
};

// Held-out individuals are folded in by resampling their tokens with H
// frozen; each individual's substream is keyed off its id, so the score does
// not depend on row or token order. Tokens at locations unknown to the model
// are dropped and counted.
struct HeldoutScore {
  double perplexity = 0;
  std::vector<double> folded_w;  // I' x K row-major
  long tokens_scored = 0;
  long tokens_dropped = 0;
};

HeldoutScore heldout_score(const CommunityModel& model, const EcoNetwork& heldout,
                           const FoldInConfig& foldin);
double heldout_perplexity(const CommunityModel& model, const EcoNetwork& heldout,
                          const FoldInConfig& foldin);

struct ModelSelectionResult {
  std::vector<int> grid;
  // perplexities[r][g] = replicate r, grid index g
  std::vector<std::vector<double>> perplexities;
  int selected_K = 0;
};

// Repeated individual-level train/test splits; fits every K on each training
// set and scores held-out perplexity. Ties in the replicate-mean go to the
// smaller K. Cells of the (replicate x K) grid run in parallel when jobs > 1;
// each cell owns a derived seed so results do not depend on scheduling.
ModelSelectionResult select_k(const EcoNetwork& net, const std::vector<int>& grid,
                              int replicates, double test_fraction,
                              const LdaConfig& base_config, int jobs = 1);

}  // namespace econet
