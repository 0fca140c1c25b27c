#include <algorithm>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "econet/errors.hpp"
#include "econet/network.hpp"
#include "econet/synth.hpp"

using namespace econet;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

LoadedNetwork load_pair(const std::string& edges, const std::string& roster) {
  auto e = write_tmp("econet_edges.csv", edges);
  auto r = write_tmp("econet_roster.csv", roster);
  return load_edgelist(e, load_roster(r));
}

}  // namespace

TEST_CASE("edge list construction") {
  auto loaded = load_pair(
      "individual_id,location_id,count\na,x,2\na,y,1\nb,x,1\n",
      "individual_id,neighborhood_id,in_area\na,n1,1\nb,n1,1\n");
  const EcoNetwork& net = loaded.net;
  CHECK(net.num_individuals() == 2);
  CHECK(net.num_locations() == 2);
  CHECK(net.token_count(0) == 3);
  CHECK(net.token_count(1) == 1);
  CHECK(net.neighborhood_of[0] == "n1");
}

TEST_CASE("duplicate rows are summed") {
  auto loaded = load_pair(
      "individual_id,location_id,count\na,x,1\na,x,1\n",
      "individual_id,neighborhood_id,in_area\na,n1,1\n");
  REQUIRE(loaded.net.rows[0].size() == 1);
  CHECK(loaded.net.rows[0][0].second == 2);
}

TEST_CASE("count defaults to 1 without the column") {
  auto loaded = load_pair("individual_id,location_id\na,x\na,x\n",
                          "individual_id,neighborhood_id,in_area\na,n1,1\n");
  CHECK(loaded.net.token_count(0) == 2);
}

TEST_CASE("negative count names the line") {
  auto e = write_tmp("econet_edges.csv",
                     "individual_id,location_id,count\na,x,2\na,y,-1\n");
  auto r = write_tmp("econet_roster.csv",
                     "individual_id,neighborhood_id,in_area\na,n1,1\n");
  try {
    load_edgelist(e, load_roster(r));
    FAIL("expected ValidationError");
  } catch (const ValidationError& err) {
    CHECK(std::string(err.what()).find(":3") != std::string::npos);
  }
}

TEST_CASE("individual missing from roster is an error") {
  CHECK_THROWS_AS(load_pair("individual_id,location_id\na,x\nb,x\n",
                            "individual_id,neighborhood_id,in_area\na,n1,1\n"),
                  ValidationError);
}

TEST_CASE("malformed row is a parse error") {
  CHECK_THROWS_AS(load_pair("individual_id,location_id,count\na,x,two\n",
                            "individual_id,neighborhood_id,in_area\na,n1,1\n"),
                  ValidationError);
}

namespace {

// wide net: 5 individuals in n1 all share x, plus whatever extra rows tests add
LoadedNetwork filter_fixture(const std::string& extra_edges,
                             const std::string& extra_roster) {
  std::string edges = "individual_id,location_id,count\n";
  std::string roster = "individual_id,neighborhood_id,in_area\n";
  for (char c = 'a'; c <= 'e'; ++c) {
    edges += std::string(1, c) + ",x,1\n";
    roster += std::string(1, c) + ",n1,1\n";
  }
  return load_pair(edges + extra_edges, roster + extra_roster);
}

}  // namespace

TEST_CASE("lonely-location individual lands in dropped_no_shared_locations") {
  auto loaded = filter_fixture("c2,z,1\n", "c2,n1,1\n");
  auto [net, report] = apply_filters(loaded.net, loaded.in_area, 1);
  REQUIRE(report.dropped_no_shared_locations.size() == 1);
  CHECK(report.dropped_no_shared_locations[0] == "c2");
  CHECK(report.kept == 5);
  // z's column is gone
  CHECK(net.num_locations() == 1);
}

TEST_CASE("zero-location individual is reported") {
  auto loaded = filter_fixture("", "ghost,n1,1\n");
  auto [net, report] = apply_filters(loaded.net, loaded.in_area, 1);
  REQUIRE(report.dropped_no_locations.size() == 1);
  CHECK(report.dropped_no_locations[0] == "ghost");
}

TEST_CASE("out-of-area homes are dropped before the shared check") {
  auto loaded = filter_fixture("f,x,1\n", "f,n1,0\n");
  auto [net, report] = apply_filters(loaded.net, loaded.in_area, 1);
  REQUIRE(report.dropped_out_of_area.size() == 1);
  CHECK(report.dropped_out_of_area[0] == "f");
}

TEST_CASE("sparse neighborhoods are dropped wholesale") {
  auto loaded =
      filter_fixture("p,x,1\nq,x,1\nr,x,1\n", "p,n2,1\nq,n2,1\nr,n2,1\n");
  auto [net, report] = apply_filters(loaded.net, loaded.in_area, 4);
  CHECK(report.dropped_sparse_neighborhood.size() == 3);
  CHECK(report.kept == 5);
}

TEST_CASE("clean network passes untouched") {
  auto loaded = filter_fixture("", "");
  auto [net, report] = apply_filters(loaded.net, loaded.in_area, 4);
  CHECK(report.dropped_no_locations.empty());
  CHECK(report.dropped_no_shared_locations.empty());
  CHECK(report.dropped_out_of_area.empty());
  CHECK(report.dropped_sparse_neighborhood.empty());
  CHECK(report.kept == 5);
}

TEST_CASE("report buckets partition the input individuals") {
  auto loaded = filter_fixture("c2,z,1\np,x,1\n", "c2,n1,1\nghost,n1,1\np,n3,1\n");
  auto [net, report] = apply_filters(loaded.net, loaded.in_area, 2);
  std::size_t total = report.dropped_no_locations.size() +
                      report.dropped_no_shared_locations.size() +
                      report.dropped_out_of_area.size() +
                      report.dropped_sparse_neighborhood.size() +
                      static_cast<std::size_t>(report.kept);
  CHECK(total == loaded.net.individuals.size());
}

TEST_CASE("filtering is idempotent and conserves kept tokens") {
  SynthSpec spec;
  spec.I = 60;
  spec.J = 20;
  spec.K_true = 3;
  spec.tokens_min = 5;
  spec.tokens_max = 12;
  spec.seed = 42;
  auto synth = generate(spec);
  std::vector<bool> in_area(synth.net.individuals.size(), true);

  auto [once, report1] = apply_filters(synth.net, in_area, 2);
  // token conservation: kept individuals keep their full rows
  long expected = 0;
  for (int i = 0; i < synth.net.num_individuals(); ++i) {
    bool kept = std::find(once.individuals.begin(), once.individuals.end(),
                          synth.net.individuals[i]) != once.individuals.end();
    if (kept) expected += synth.net.token_count(i);
  }
  CHECK(once.total_tokens() == expected);

  std::vector<bool> in_area2(once.individuals.size(), true);
  auto [twice, report2] = apply_filters(once, in_area2, 2);
  CHECK(twice.individuals == once.individuals);
  CHECK(twice.locations == once.locations);
  CHECK(twice.rows == once.rows);
  CHECK(report2.kept == report1.kept);
}

TEST_CASE("filtering everything out is an error") {
  auto loaded = load_pair("individual_id,location_id\na,x\nb,y\n",
                          "individual_id,neighborhood_id,in_area\na,n1,1\nb,n1,1\n");
  CHECK_THROWS_AS(apply_filters(loaded.net, loaded.in_area, 1), ValidationError);
}
