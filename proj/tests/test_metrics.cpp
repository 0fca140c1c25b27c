#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "econet/errors.hpp"
#include "econet/lda.hpp"
#include "econet/metrics.hpp"
#include "econet/rng.hpp"

using namespace econet;

namespace {

// O(K^2) expansion of the defining double sum
double gini_bruteforce(const std::vector<double>& w) {
  double num = 0.0, total = 0.0;
  for (double v : w) total += v;
  for (double a : w)
    for (double b : w) num += std::abs(a - b);
  return num / (2.0 * w.size() * total);
}

// direct pairwise log-ratio variances
double totvar_bruteforce(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  const int K = static_cast<int>(rows[0].size());
  double total = 0.0;
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      double mean = 0.0;
      std::vector<double> lr(n);
      for (int l = 0; l < n; ++l) {
        lr[l] = std::log(rows[l][i] / rows[l][j]);
        mean += lr[l];
      }
      mean /= n;
      double ss = 0.0;
      for (int l = 0; l < n; ++l) ss += (lr[l] - mean) * (lr[l] - mean);
      total += ss / (n - 1);
    }
  }
  return total / (2.0 * K);
}

std::vector<double> random_simplex(Rng& rng, int K) {
  std::vector<double> w(K);
  double total = 0.0;
  for (double& v : w) {
    v = rng.uniform_pos();
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

TEST_CASE("gini endpoints") {
  for (int K : {2, 5, 18}) {
    std::vector<double> uniform(K, 1.0 / K);
    CHECK(gini(uniform) == doctest::Approx(0.0).epsilon(1e-15));
    std::vector<double> onehot(K, 0.0);
    onehot[0] = 1.0;
    CHECK(gini(onehot) == doctest::Approx(1.0 - 1.0 / K).epsilon(1e-15));
  }
}

TEST_CASE("gini hand case K=3") {
  CHECK(gini(std::vector<double>{0.5, 0.3, 0.2}) ==
        doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("gini matches the brute-force oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    int K = 2 + rng.uniform_int(19);
    auto w = random_simplex(rng, K);
    CHECK(gini(w) == doctest::Approx(gini_bruteforce(w)).epsilon(1e-12));
  }
}

TEST_CASE("gini is permutation invariant and majorization monotone") {
  Rng rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    int K = 3 + rng.uniform_int(10);
    auto w = random_simplex(rng, K);
    auto shuffled = w;
    rng.shuffle(shuffled);
    CHECK(gini(w) == doctest::Approx(gini(shuffled)).epsilon(1e-12));

    // move mass from a smaller entry to a larger one
    auto lo = std::min_element(w.begin(), w.end()) - w.begin();
    auto hi = std::max_element(w.begin(), w.end()) - w.begin();
    if (w[lo] == w[hi]) continue;
    auto sharper = w;
    double delta = w[lo] / 2;
    sharper[lo] -= delta;
    sharper[hi] += delta;
    CHECK(gini(sharper) > gini(w));
  }
}

TEST_CASE("gini rejects degenerate input") {
  CHECK_THROWS_AS(gini(std::vector<double>{0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(gini(std::vector<double>{}), ValidationError);
}

TEST_CASE("modal community picks the max, ties to the lowest index") {
  CHECK(modal_community(std::vector<double>{0.1, 0.7, 0.2}) == 1);
  CHECK(modal_community(std::vector<double>{0.5, 0.5}) == 0);
  // argmax is invariant under positive rescaling
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    auto w = random_simplex(rng, 6);
    auto scaled = w;
    double c = 0.5 + 3.0 * rng.uniform();
    for (double& v : scaled) v *= c;
    CHECK(modal_community(w) == modal_community(scaled));
  }
}

TEST_CASE("total variation hand cases") {
  std::vector<std::vector<double>> identical = {{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5},
                                                {0.2, 0.3, 0.5}};
  CHECK(total_variation(identical) == doctest::Approx(0.0).epsilon(1e-15));

  double e = std::exp(1.0);
  std::vector<std::vector<double>> pair = {{0.5, 0.5},
                                           {e / (1 + e), 1 / (1 + e)}};
  CHECK(total_variation(pair) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("total variation matches the pairwise oracle") {
  Rng rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + rng.uniform_int(8);
    int K = 2 + rng.uniform_int(6);
    std::vector<std::vector<double>> rows;
    for (int l = 0; l < n; ++l) rows.push_back(random_simplex(rng, K));
    CHECK(total_variation(rows) ==
          doctest::Approx(totvar_bruteforce(rows)).epsilon(1e-10));
  }
}

TEST_CASE("total variation invariances") {
  Rng rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + rng.uniform_int(6);
    int K = 3 + rng.uniform_int(5);
    std::vector<std::vector<double>> rows;
    for (int l = 0; l < n; ++l) rows.push_back(random_simplex(rng, K));
    double base = total_variation(rows);

    // common component permutation
    std::vector<int> perm(K);
    for (int k = 0; k < K; ++k) perm[k] = k;
    rng.shuffle(perm);
    std::vector<std::vector<double>> permuted(n, std::vector<double>(K));
    for (int l = 0; l < n; ++l)
      for (int k = 0; k < K; ++k) permuted[l][perm[k]] = rows[l][k];
    CHECK(total_variation(permuted) == doctest::Approx(base).epsilon(1e-10));

    // Aitchison shift: multiply all rows by a positive vector, renormalize
    auto shift = random_simplex(rng, K);
    std::vector<std::vector<double>> shifted(n, std::vector<double>(K));
    for (int l = 0; l < n; ++l) {
      double total = 0.0;
      for (int k = 0; k < K; ++k) {
        shifted[l][k] = rows[l][k] * shift[k];
        total += shifted[l][k];
      }
      for (int k = 0; k < K; ++k) shifted[l][k] /= total;
    }
    CHECK(total_variation(shifted) == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("total variation error paths") {
  CHECK_THROWS_AS(total_variation({{0.5, 0.5}}), ValidationError);
  CHECK_THROWS_AS(total_variation({{0.5, 0.5}, {1.0, 0.0}}), ValidationError);
}

namespace {

CommunityModel model_with_rows(const std::vector<std::vector<double>>& w_rows,
                               const std::vector<std::string>& nbhd,
                               EcoNetwork& net) {
  const int I = static_cast<int>(w_rows.size());
  const int K = static_cast<int>(w_rows[0].size());
  CommunityModel m;
  m.I = I;
  m.K = K;
  m.J = 2;
  m.config.K = K;
  m.locations = {"x", "y"};
  m.H.assign(static_cast<std::size_t>(K) * 2, 0.5);
  net = EcoNetwork{};
  net.locations = m.locations;
  for (int i = 0; i < I; ++i) {
    m.individuals.push_back("i" + std::to_string(i));
    net.individuals.push_back("i" + std::to_string(i));
    net.neighborhood_of.push_back(nbhd[i]);
    net.rows.push_back({{0, 1}, {1, 1}});
    for (double v : w_rows[i]) m.W.push_back(v);
  }
  return m;
}

}  // namespace

TEST_CASE("neighborhood summaries") {
  SUBCASE("modal labels {1,1,2} give pairwise share 1/3") {
    EcoNetwork net;
    auto m = model_with_rows(
        {{0.8, 0.1, 0.1}, {0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}},
        {"n1", "n1", "n1"}, net);
    auto summaries = summarize_neighborhoods(net, m);
    REQUIRE(summaries.size() == 1);
    CHECK(summaries[0].share_modal == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(summaries[0].n_modal_communities == 2);
    CHECK(summaries[0].largest_modal_share ==
          doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(summaries[0].total_variation.has_value());
  }
  SUBCASE("homogeneous neighborhood shares fully") {
    EcoNetwork net;
    auto m = model_with_rows({{0.9, 0.05, 0.05}, {0.85, 0.1, 0.05}},
                             {"n1", "n1"}, net);
    auto summaries = summarize_neighborhoods(net, m);
    CHECK(summaries[0].share_modal == doctest::Approx(1.0));
    CHECK(summaries[0].n_modal_communities == 1);
  }
  SUBCASE("singleton neighborhood is flagged") {
    EcoNetwork net;
    auto m = model_with_rows({{0.9, 0.1}}, {"n1"}, net);
    auto summaries = summarize_neighborhoods(net, m);
    CHECK(summaries[0].share_modal == doctest::Approx(1.0));
    CHECK(summaries[0].share_modal_singleton);
    CHECK(!summaries[0].total_variation.has_value());
  }
  SUBCASE("share_modal is 1 whenever a single modal community exists") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      int n = 2 + rng.uniform_int(5);
      std::vector<std::vector<double>> rows;
      std::vector<std::string> nbhd(n, "n1");
      for (int l = 0; l < n; ++l) {
        auto w = random_simplex(rng, 4);
        w[2] += 1.0;  // force a common modal label
        double total = 0.0;
        for (double v : w) total += v;
        for (double& v : w) v /= total;
        rows.push_back(w);
      }
      EcoNetwork net;
      auto m = model_with_rows(rows, nbhd, net);
      auto summaries = summarize_neighborhoods(net, m);
      CHECK(summaries[0].n_modal_communities == 1);
      CHECK(summaries[0].share_modal == doctest::Approx(1.0));
    }
  }
}
