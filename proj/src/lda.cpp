#include "econet/lda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "econet/errors.hpp"

namespace econet {

std::vector<double> expand_prior(const std::vector<double>& prior, int size,
                                 double symmetric_default, const char* name) {
  std::vector<double> out;
  if (prior.empty()) {
    out.assign(size, symmetric_default);
  } else if (prior.size() == 1) {
    out.assign(size, prior[0]);
  } else if (static_cast<int>(prior.size()) == size) {
    out = prior;
  } else {
    throw ValidationError(std::string(name) + " must be scalar or length " +
                          std::to_string(size));
  }
  for (double v : out)
    if (!(v > 0.0))
      throw ValidationError(std::string(name) + " entries must be positive");
  return out;
}

void validate_config(const LdaConfig& config, int J) {
  if (config.K < 1) throw ValidationError("K must be >= 1");
  if (config.iterations < 1) throw ValidationError("iterations must be >= 1");
  if (config.burn_in < 0 || config.burn_in >= config.iterations)
    throw ValidationError("burn_in must satisfy 0 <= burn_in < iterations");
  expand_prior(config.alpha, config.K, 50.0 / config.K, "alpha");
  expand_prior(config.beta, J, 0.1, "beta");
}

double token_probability(const CommunityModel& model, int i, int j) {
  if (i < 0 || i >= model.I || j < 0 || j >= model.J)
    throw ValidationError("token_probability: index out of range");
  double p = 0.0;
  for (int k = 0; k < model.K; ++k) p += model.w(i, k) * model.h(k, j);
  return p;
}

GibbsSampler::GibbsSampler(const EcoNetwork& net, const LdaConfig& config)
    : K_(config.K),
      I_(net.num_individuals()),
      J_(net.num_locations()),
      rng_(config.seed) {
  validate_config(config, J_);
  if (I_ == 0) throw ValidationError("cannot fit an empty network");
  for (int i = 0; i < I_; ++i)
    if (net.rows[i].empty())
      throw ValidationError("individual '" + net.individuals[i] +
                            "' has no tokens; run filtering first");

  alpha_ = expand_prior(config.alpha, K_, 50.0 / K_, "alpha");
  beta_ = expand_prior(config.beta, J_, 0.1, "beta");
  for (double v : alpha_) alpha_sum_ += v;
  for (double v : beta_) beta_sum_ += v;

  token_offset_.assign(I_ + 1, 0);
  for (int i = 0; i < I_; ++i)
    token_offset_[i + 1] = token_offset_[i] + static_cast<int>(net.token_count(i));
  token_loc_.resize(token_offset_[I_]);
  for (int i = 0; i < I_; ++i) {
    int t = token_offset_[i];
    for (auto& [j, c] : net.rows[i])
      for (int r = 0; r < c; ++r) token_loc_[t++] = j;
  }

  n_ik_.assign(static_cast<std::size_t>(I_) * K_, 0);
  n_kj_.assign(static_cast<std::size_t>(K_) * J_, 0);
  n_k_.assign(K_, 0);
  prob_.resize(K_);
  assign_.resize(token_loc_.size());
  for (int i = 0; i < I_; ++i) {
    for (int t = token_offset_[i]; t < token_offset_[i + 1]; ++t) {
      int k = rng_.uniform_int(K_);
      assign_[t] = k;
      ++n_ik_[static_cast<std::size_t>(i) * K_ + k];
      ++n_kj_[static_cast<std::size_t>(k) * J_ + token_loc_[t]];
      ++n_k_[k];
    }
  }

  w_acc_.assign(static_cast<std::size_t>(I_) * K_, 0.0);
  h_acc_.assign(static_cast<std::size_t>(K_) * J_, 0.0);
}

void GibbsSampler::resample(int i, int t) {
  const int j = token_loc_[t];
  const int old = assign_[t];
  --n_ik_[static_cast<std::size_t>(i) * K_ + old];
  --n_kj_[static_cast<std::size_t>(old) * J_ + j];
  --n_k_[old];
  for (int k = 0; k < K_; ++k) {
    prob_[k] = (n_ik_[static_cast<std::size_t>(i) * K_ + k] + alpha_[k]) *
               (n_kj_[static_cast<std::size_t>(k) * J_ + j] + beta_[j]) /
               (n_k_[k] + beta_sum_);
  }
  const int knew = rng_.categorical(prob_);
  assign_[t] = knew;
  ++n_ik_[static_cast<std::size_t>(i) * K_ + knew];
  ++n_kj_[static_cast<std::size_t>(knew) * J_ + j];
  ++n_k_[knew];
}

void GibbsSampler::sweep() {
  for (int i = 0; i < I_; ++i)
    for (int t = token_offset_[i]; t < token_offset_[i + 1]; ++t) resample(i, t);
}

void GibbsSampler::accumulate() {
  for (int i = 0; i < I_; ++i) {
    const double n_i = token_offset_[i + 1] - token_offset_[i];
    for (int k = 0; k < K_; ++k)
      w_acc_[static_cast<std::size_t>(i) * K_ + k] +=
          (n_ik_[static_cast<std::size_t>(i) * K_ + k] + alpha_[k]) /
          (n_i + alpha_sum_);
  }
  for (int k = 0; k < K_; ++k) {
    const double denom = n_k_[k] + beta_sum_;
    for (int j = 0; j < J_; ++j)
      h_acc_[static_cast<std::size_t>(k) * J_ + j] +=
          (n_kj_[static_cast<std::size_t>(k) * J_ + j] + beta_[j]) / denom;
  }
  ++acc_count_;
}

bool GibbsSampler::counts_consistent() const {
  long grand = 0;
  for (int i = 0; i < I_; ++i) {
    long row = 0;
    for (int k = 0; k < K_; ++k) row += n_ik_[static_cast<std::size_t>(i) * K_ + k];
    if (row != token_offset_[i + 1] - token_offset_[i]) return false;
  }
  for (int k = 0; k < K_; ++k) {
    long row = 0;
    for (int j = 0; j < J_; ++j) row += n_kj_[static_cast<std::size_t>(k) * J_ + j];
    if (row != n_k_[k]) return false;
    grand += n_k_[k];
  }
  return grand == static_cast<long>(token_loc_.size());
}

CommunityModel GibbsSampler::finish(const EcoNetwork& net) const {
  if (acc_count_ == 0) throw NumericError("no retained sweeps to average");
  CommunityModel model;
  model.I = I_;
  model.K = K_;
  model.J = J_;
  model.individuals = net.individuals;
  model.locations = net.locations;
  model.W.resize(w_acc_.size());
  model.H.resize(h_acc_.size());
  for (std::size_t x = 0; x < w_acc_.size(); ++x)
    model.W[x] = w_acc_[x] / acc_count_;
  for (std::size_t x = 0; x < h_acc_.size(); ++x)
    model.H[x] = h_acc_[x] / acc_count_;
  return model;
}

CommunityModel fit(const EcoNetwork& net, const LdaConfig& config) {
  GibbsSampler sampler(net, config);
  for (int it = 0; it < config.iterations; ++it) {
    sampler.sweep();
    if (!config.last_sweep_only && it >= config.burn_in) sampler.accumulate();
  }
  if (config.last_sweep_only) sampler.accumulate();
  CommunityModel model = sampler.finish(net);
  model.config = config;
  return model;
}

HeldoutScore heldout_score(const CommunityModel& model, const EcoNetwork& heldout,
                           const FoldInConfig& foldin) {
  if (foldin.sweeps < 1 || foldin.averaged_last < 1 ||
      foldin.averaged_last > foldin.sweeps)
    throw ValidationError("fold-in sweeps/averaged_last invalid");

  const int K = model.K;
  std::unordered_map<std::string, int> loc_index;
  for (int j = 0; j < model.J; ++j) loc_index.emplace(model.locations[j], j);

  const std::vector<double> alpha =
      expand_prior(model.config.alpha, K, 50.0 / K, "alpha");
  double alpha_sum = 0;
  for (double v : alpha) alpha_sum += v;

  HeldoutScore score;
  score.folded_w.assign(static_cast<std::size_t>(heldout.num_individuals()) * K,
                        0.0);
  double loglik = 0.0;

  std::vector<int> tokens;
  std::vector<int> assign;
  std::vector<long> n_k(K);
  std::vector<double> prob(K), w_row(K);

  for (int i = 0; i < heldout.num_individuals(); ++i) {
    tokens.clear();
    for (auto& [j, c] : heldout.rows[i]) {
      auto it = loc_index.find(heldout.locations[j]);
      if (it == loc_index.end()) {
        score.tokens_dropped += c;
        continue;
      }
      for (int r = 0; r < c; ++r) tokens.push_back(it->second);
    }
    // canonical token order: scoring is independent of input row order
    std::sort(tokens.begin(), tokens.end());
    std::fill(w_row.begin(), w_row.end(), 0.0);
    if (tokens.empty()) {
      // no usable tokens; report the prior-mean row
      for (int k = 0; k < K; ++k)
        score.folded_w[static_cast<std::size_t>(i) * K + k] = alpha[k] / alpha_sum;
      continue;
    }

    Rng rng(derive_seed(foldin.seed, hash_id(heldout.individuals[i])));
    assign.resize(tokens.size());
    std::fill(n_k.begin(), n_k.end(), 0);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      for (int k = 0; k < K; ++k) prob[k] = alpha[k] * model.h(k, tokens[t]);
      assign[t] = rng.categorical(prob);
      ++n_k[assign[t]];
    }

    int averaged = 0;
    const double n_i = static_cast<double>(tokens.size());
    for (int s = 0; s < foldin.sweeps; ++s) {
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        --n_k[assign[t]];
        for (int k = 0; k < K; ++k)
          prob[k] = (n_k[k] + alpha[k]) * model.h(k, tokens[t]);
        assign[t] = rng.categorical(prob);
        ++n_k[assign[t]];
      }
      if (s >= foldin.sweeps - foldin.averaged_last) {
        for (int k = 0; k < K; ++k)
          w_row[k] += (n_k[k] + alpha[k]) / (n_i + alpha_sum);
        ++averaged;
      }
    }
    for (int k = 0; k < K; ++k) {
      w_row[k] /= averaged;
      score.folded_w[static_cast<std::size_t>(i) * K + k] = w_row[k];
    }

    for (int j : tokens) {
      double p = 0.0;
      for (int k = 0; k < K; ++k) p += w_row[k] * model.h(k, j);
      loglik += std::log(p);
    }
    score.tokens_scored += static_cast<long>(tokens.size());
  }

  if (score.tokens_scored == 0)
    throw ValidationError("held-out set has no tokens at known locations");
  score.perplexity = std::exp(-loglik / static_cast<double>(score.tokens_scored));
  return score;
}

double heldout_perplexity(const CommunityModel& model, const EcoNetwork& heldout,
                          const FoldInConfig& foldin) {
  return heldout_score(model, heldout, foldin).perplexity;
}

namespace {

EcoNetwork subnetwork(const EcoNetwork& net, const std::vector<int>& keep,
                      bool compact_locations) {
  EcoNetwork out;
  std::vector<int> loc_map;
  if (compact_locations)
    loc_map.assign(net.num_locations(), -1);
  else
    out.locations = net.locations;
  for (int i : keep) {
    out.individuals.push_back(net.individuals[i]);
    out.neighborhood_of.push_back(net.neighborhood_of[i]);
    auto& row = out.rows.emplace_back();
    for (auto& [j, c] : net.rows[i]) {
      int jj = j;
      if (compact_locations) {
        if (loc_map[j] < 0) {
          loc_map[j] = out.num_locations();
          out.locations.push_back(net.locations[j]);
        }
        jj = loc_map[j];
      }
      row.emplace_back(jj, c);
    }
  }
  return out;
}

}  // namespace

ModelSelectionResult select_k(const EcoNetwork& net, const std::vector<int>& grid,
                              int replicates, double test_fraction,
                              const LdaConfig& base_config, int jobs) {
  if (grid.empty()) throw ValidationError("K grid is empty");
  for (int k : grid)
    if (k < 1) throw ValidationError("every K in the grid must be >= 1");
  if (replicates < 1) throw ValidationError("replicates must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ValidationError("test_fraction must lie in (0, 1)");

  const int I = net.num_individuals();
  const int n_test = std::max(1, static_cast<int>(std::lround(test_fraction * I)));
  if (n_test >= I)
    throw ValidationError("split leaves an empty training set");

  std::vector<EcoNetwork> trains(replicates), tests(replicates);
  for (int r = 0; r < replicates; ++r) {
    std::vector<int> order(I);
    for (int i = 0; i < I; ++i) order[i] = i;
    Rng rng(derive_seed(base_config.seed, 0x5e1ec7ULL, r));
    rng.shuffle(order);
    std::vector<int> test_idx(order.begin(), order.begin() + n_test);
    std::vector<int> train_idx(order.begin() + n_test, order.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    trains[r] = subnetwork(net, train_idx, true);
    tests[r] = subnetwork(net, test_idx, false);
  }

  ModelSelectionResult result;
  result.grid = grid;
  result.perplexities.assign(replicates,
                             std::vector<double>(grid.size(), 0.0));

  const int n_cells = replicates * static_cast<int>(grid.size());
  auto run_cell = [&](int cell) {
    const int r = cell / static_cast<int>(grid.size());
    const int g = cell % static_cast<int>(grid.size());
    LdaConfig cfg = base_config;
    cfg.K = grid[g];
    cfg.seed = derive_seed(base_config.seed, 0xf17ULL, r, grid[g]);
    CommunityModel model = fit(trains[r], cfg);
    FoldInConfig foldin;
    foldin.seed = derive_seed(base_config.seed, 0xf01dULL, r, grid[g]);
    result.perplexities[r][g] = heldout_perplexity(model, tests[r], foldin);
  };

  if (jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
    for (int cell = 0; cell < n_cells; ++cell) run_cell(cell);
  } else {
    for (int cell = 0; cell < n_cells; ++cell) run_cell(cell);
  }

  int best = 0;
  double best_mean = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mean = 0.0;
    for (int r = 0; r < replicates; ++r) mean += result.perplexities[r][g];
    mean /= replicates;
    if (mean < best_mean || (mean == best_mean && grid[g] < grid[best])) {
      best_mean = mean;
      best = static_cast<int>(g);
    }
  }
  result.selected_K = grid[best];
  return result;
}

}  // namespace econet
