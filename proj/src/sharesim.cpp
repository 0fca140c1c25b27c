#include "econet/sharesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "econet/errors.hpp"
#include "econet/metrics.hpp"
#include "econet/rng.hpp"

namespace econet {

double analytic_share_probability(int n, long J) {
  if (n < 1 || n > J)
    throw ValidationError("analytic_share_probability: need 1 <= n <= J");
  if (2L * n > J) return 1.0;  // two n-subsets cannot be disjoint
  auto log_choose = [](double a, double b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
  };
  double log_disjoint = log_choose(static_cast<double>(J - n), n) -
                        log_choose(static_cast<double>(J), n);
  double p = 1.0 - std::exp(log_disjoint);
  return std::clamp(p, 0.0, 1.0);
}

namespace {

struct Profile {
  std::vector<double> cdf;  // cumulative H_k over locations
  int support = 0;          // locations with positive mass
};

// n distinct locations via sequential renormalization: rejection against the
// full profile (a conditional draw given "not yet taken" is exactly the
// renormalized distribution), with an O(J) exact fallback when rejections
// pile up.
void draw_locations(Rng& rng, const CommunityModel& model, int k,
                    const Profile& prof, int n, std::vector<int>& out) {
  if (n > prof.support)
    throw NumericError("requested more locations than the profile supports");
  out.clear();
  std::vector<double> weights;  // lazy copy for the fallback path
  while (static_cast<int>(out.size()) < n) {
    bool drew = false;
    for (int attempt = 0; attempt < 32; ++attempt) {
      int j = rng.categorical_cdf(prof.cdf);
      if (std::find(out.begin(), out.end(), j) == out.end()) {
        out.push_back(j);
        drew = true;
        break;
      }
    }
    if (drew) continue;
    if (weights.empty()) {
      weights.resize(model.J);
      for (int j = 0; j < model.J; ++j) weights[j] = model.h(k, j);
      for (int j : out) weights[j] = 0.0;
    }
    int j = rng.categorical(weights);
    weights[j] = 0.0;
    out.push_back(j);
  }
}

bool intersects(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  return false;
}

ShareCurve::Point run_cell(const CommunityModel& model,
                           const std::vector<Profile>& profiles,
                           const std::vector<std::pair<int, int>>& strata,
                           const std::vector<double>& stratum_cdf, int n,
                           int pairs, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<long> draws(strata.size(), 0), hits(strata.size(), 0);
  std::vector<int> set_a, set_b;
  for (int p = 0; p < pairs; ++p) {
    int s = rng.categorical_cdf(stratum_cdf);
    auto [ka, kb] = strata[s];
    draw_locations(rng, model, ka, profiles[ka], n, set_a);
    draw_locations(rng, model, kb, profiles[kb], n, set_b);
    ++draws[s];
    if (intersects(set_a, set_b)) ++hits[s];
  }
  ShareCurve::Point pt;
  long total_hits = 0;
  for (std::size_t s = 0; s < strata.size(); ++s) total_hits += hits[s];
  pt.mean = static_cast<double>(total_hits) / pairs;
  std::vector<double> means;
  for (std::size_t s = 0; s < strata.size(); ++s)
    if (draws[s] > 0)
      means.push_back(static_cast<double>(hits[s]) / static_cast<double>(draws[s]));
  if (means.size() >= 2) {
    double m = 0.0;
    for (double v : means) m += v;
    m /= static_cast<double>(means.size());
    double ss = 0.0;
    for (double v : means) ss += (v - m) * (v - m);
    pt.sd = std::sqrt(ss / static_cast<double>(means.size() - 1));
  }
  return pt;
}

}  // namespace

ShareCurve simulate_share_curve(const CommunityModel& model,
                                const std::vector<int>& n_values,
                                const ShareSimOptions& options) {
  if (options.pairs_per_n < 1)
    throw ValidationError("pairs_per_n must be >= 1");
  if (n_values.empty()) throw ValidationError("n_values is empty");
  const int K = model.K;

  std::vector<Profile> profiles(K);
  for (int k = 0; k < K; ++k) {
    profiles[k].cdf.resize(model.J);
    double acc = 0.0;
    for (int j = 0; j < model.J; ++j) {
      double h = model.h(k, j);
      if (h > 0.0) ++profiles[k].support;
      acc += h;
      profiles[k].cdf[j] = acc;
    }
  }

  // community sizes by modal counts
  std::vector<double> size(K, 0.0);
  for (int i = 0; i < model.I; ++i) {
    std::span<const double> row(model.W.data() + static_cast<std::size_t>(i) * K,
                                static_cast<std::size_t>(K));
    size[modal_community(row)] += 1.0;
  }

  std::vector<std::pair<int, int>> within_strata, between_strata;
  std::vector<double> within_cdf, between_cdf;
  double acc = 0.0;
  for (int k = 0; k < K; ++k) {
    double w = options.uniform_strata ? 1.0 : size[k];
    if (w <= 0.0) continue;
    within_strata.emplace_back(k, k);
    acc += w;
    within_cdf.push_back(acc);
  }
  acc = 0.0;
  for (int ka = 0; ka < K; ++ka) {
    for (int kb = 0; kb < K; ++kb) {
      if (ka == kb) continue;
      double w = options.uniform_strata ? 1.0 : size[ka] * size[kb];
      if (w <= 0.0) continue;
      between_strata.emplace_back(ka, kb);
      acc += w;
      between_cdf.push_back(acc);
    }
  }
  if (within_strata.empty())
    throw ValidationError("no community has positive weight");

  const long Jana = options.analytic_J > 0 ? options.analytic_J : model.J;

  ShareCurve curve;
  curve.n_values = n_values;
  curve.within.resize(n_values.size());
  curve.between.resize(n_values.size());
  curve.analytic.resize(n_values.size());

  const int cells = static_cast<int>(n_values.size()) * 2;
  auto run = [&](int cell) {
    const int idx = cell / 2;
    const int n = n_values[idx];
    if (cell % 2 == 0) {
      curve.within[idx] =
          run_cell(model, profiles, within_strata, within_cdf, n,
                   options.pairs_per_n, derive_seed(options.seed, n, 1));
    } else if (!between_strata.empty()) {
      curve.between[idx] =
          run_cell(model, profiles, between_strata, between_cdf, n,
                   options.pairs_per_n, derive_seed(options.seed, n, 2));
    } else {
      curve.between[idx] = {std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN()};
    }
  };

  if (options.jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(options.jobs)
#endif
    for (int cell = 0; cell < cells; ++cell) run(cell);
  } else {
    for (int cell = 0; cell < cells; ++cell) run(cell);
  }

  for (std::size_t idx = 0; idx < n_values.size(); ++idx)
    curve.analytic[idx] = analytic_share_probability(n_values[idx], Jana);
  return curve;
}

}  // namespace econet
