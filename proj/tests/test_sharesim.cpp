#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"

#include "econet/errors.hpp"
#include "econet/rng.hpp"
#include "econet/sharesim.hpp"
#include "econet/synth.hpp"

using namespace econet;

namespace {

// exact intersection probability from 64-bit binomial coefficients (J small)
double exact_share(int n, int J) {
  auto choose = [](int a, int b) -> double {
    if (b < 0 || b > a) return 0.0;
    unsigned long long r = 1;
    for (int i = 1; i <= b; ++i) r = r * static_cast<unsigned long long>(a - b + i) / i;
    return static_cast<double>(r);
  };
  return 1.0 - choose(J - n, n) / choose(J, n);
}

CommunityModel profile_model(const std::vector<std::vector<double>>& h_rows,
                             const std::vector<std::vector<double>>& w_rows) {
  CommunityModel m;
  m.K = static_cast<int>(h_rows.size());
  m.J = static_cast<int>(h_rows[0].size());
  m.I = static_cast<int>(w_rows.size());
  m.config.K = m.K;
  for (auto& row : h_rows)
    for (double v : row) m.H.push_back(v);
  for (auto& row : w_rows)
    for (double v : row) m.W.push_back(v);
  for (int i = 0; i < m.I; ++i) m.individuals.push_back("i" + std::to_string(i));
  for (int j = 0; j < m.J; ++j) m.locations.push_back("l" + std::to_string(j));
  return m;
}

}  // namespace

TEST_CASE("analytic share probability closed forms") {
  CHECK(analytic_share_probability(4, 4) == doctest::Approx(1.0));
  CHECK(analytic_share_probability(2, 4) == doctest::Approx(5.0 / 6).epsilon(1e-12));
  CHECK(analytic_share_probability(1, 883) ==
        doctest::Approx(1.0 / 883).epsilon(1e-12));
  CHECK_THROWS_AS(analytic_share_probability(5, 4), ValidationError);
  CHECK_THROWS_AS(analytic_share_probability(0, 4), ValidationError);
}

TEST_CASE("analytic share matches exact rational arithmetic for J <= 30") {
  for (int J = 1; J <= 30; ++J)
    for (int n = 1; n <= J; ++n)
      CHECK(analytic_share_probability(n, J) ==
            doctest::Approx(exact_share(n, J)).epsilon(1e-12));
}

TEST_CASE("analytic share is nondecreasing in n") {
  for (long J : {20L, 883L}) {
    double prev = 0.0;
    for (int n = 1; n <= std::min<long>(J, 40); ++n) {
      double p = analytic_share_probability(n, J);
      CHECK(p >= prev - 1e-15);
      prev = p;
    }
  }
}

TEST_CASE("analytic share matches Monte Carlo at J=883") {
  const int J = 883;
  for (int n : {1, 10}) {
    const int trials = 1000000;
    Rng rng(derive_seed(2024, n));
    long hits = 0;
    std::vector<int> pool(J);
    for (int t = 0; t < trials; ++t) {
      // partial Fisher-Yates for two independent n-subsets
      auto draw = [&](std::vector<int>& out) {
        for (int j = 0; j < J; ++j) pool[j] = j;
        out.clear();
        for (int d = 0; d < n; ++d) {
          int pick = d + rng.uniform_int(J - d);
          std::swap(pool[d], pool[pick]);
          out.push_back(pool[d]);
        }
      };
      std::vector<int> a, b;
      draw(a);
      draw(b);
      bool shared = false;
      for (int x : a)
        for (int y : b)
          if (x == y) shared = true;
      if (shared) ++hits;
    }
    double p = analytic_share_probability(n, J);
    double se = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(static_cast<double>(hits) / trials - p) <= 3 * se);
  }
}

TEST_CASE("disjoint supports never share between communities") {
  auto model = profile_model(
      {{0.25, 0.25, 0.25, 0.25, 0, 0, 0, 0}, {0, 0, 0, 0, 0.25, 0.25, 0.25, 0.25}},
      {{0.9, 0.1}, {0.1, 0.9}});
  ShareSimOptions opts;
  opts.pairs_per_n = 2000;
  opts.seed = 5;
  auto curve = simulate_share_curve(model, {1, 2, 3}, opts);
  for (auto& pt : curve.between) CHECK(pt.mean == doctest::Approx(0.0));
  for (auto& pt : curve.within) CHECK(pt.mean > 0.0);
}

TEST_CASE("K=1 uniform profile reduces to the analytic curve") {
  const int J = 30;
  auto model = profile_model({std::vector<double>(J, 1.0 / J)}, {{1.0}, {1.0}});
  ShareSimOptions opts;
  opts.pairs_per_n = 20000;
  opts.seed = 77;
  auto curve = simulate_share_curve(model, {1, 3, 6, 10}, opts);
  for (std::size_t idx = 0; idx < curve.n_values.size(); ++idx) {
    double p = curve.analytic[idx];
    double se = std::sqrt(p * (1 - p) / opts.pairs_per_n);
    CHECK(std::abs(curve.within[idx].mean - p) <= 4 * se + 1e-9);
  }
}

TEST_CASE("curves are reproducible and scheduling independent") {
  SynthSpec spec;
  spec.I = 50;
  spec.J = 25;
  spec.K_true = 3;
  spec.alpha_true = {0.1};
  spec.beta_true = {0.1};
  spec.seed = 3;
  auto synth = generate(spec);
  LdaConfig cfg;
  cfg.K = 3;
  cfg.iterations = 100;
  cfg.burn_in = 50;
  cfg.seed = 21;
  auto model = fit(synth.net, cfg);

  ShareSimOptions opts;
  opts.pairs_per_n = 3000;
  opts.seed = 31;
  auto a = simulate_share_curve(model, {1, 2, 4, 8}, opts);
  auto b = simulate_share_curve(model, {1, 2, 4, 8}, opts);
  opts.jobs = 4;
  auto c = simulate_share_curve(model, {1, 2, 4, 8}, opts);
  for (std::size_t idx = 0; idx < a.n_values.size(); ++idx) {
    CHECK(a.within[idx].mean == b.within[idx].mean);
    CHECK(a.within[idx].mean == c.within[idx].mean);
    CHECK(a.between[idx].mean == b.between[idx].mean);
    CHECK(a.between[idx].mean == c.between[idx].mean);
    CHECK(a.within[idx].sd == c.within[idx].sd);
  }
}

TEST_CASE("requesting more locations than a profile supports fails") {
  auto model = profile_model({{0.5, 0.5, 0, 0}}, {{1.0}});
  ShareSimOptions opts;
  opts.pairs_per_n = 10;
  opts.seed = 1;
  CHECK_THROWS_AS(simulate_share_curve(model, {3}, opts), NumericError);
}
