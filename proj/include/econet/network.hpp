#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace econet {

// Two-mode individual x location network, stored as sparse count rows.
// Immutable after construction; safe to share read-only across threads.
struct EcoNetwork {
  std::vector<std::string> individuals;
  std::vector<std::string> locations;
  // rows[i] = (location index, count), count > 0, location indices unique
  // within a row, kept in first-appearance order
  std::vector<std::vector<std::pair<int, int>>> rows;
  std::vector<std::string> neighborhood_of;  // per individual

  int num_individuals() const { return static_cast<int>(individuals.size()); }
  int num_locations() const { return static_cast<int>(locations.size()); }

  // N_i, the individual's total token count
  long token_count(int i) const {
    long n = 0;
    for (auto& [j, c] : rows[i]) n += c;
    return n;
  }

  long total_tokens() const {
    long n = 0;
    for (int i = 0; i < num_individuals(); ++i) n += token_count(i);
    return n;
  }
};

struct Roster {
  std::vector<std::string> ids;
  std::vector<std::string> neighborhood;
  std::vector<bool> in_area;
};

struct FilterReport {
  std::vector<std::string> dropped_no_locations;
  std::vector<std::string> dropped_no_shared_locations;
  std::vector<std::string> dropped_out_of_area;
  std::vector<std::string> dropped_sparse_neighborhood;
  long kept = 0;
};

Roster load_roster(const std::string& path);

// Builds the network from a long-form edge CSV (individual_id,location_id
// [,count]); duplicate rows are summed. Every individual in the edge list
// must appear in the roster; roster-only individuals get empty rows so the
// filter stage can report them.
struct LoadedNetwork {
  EcoNetwork net;
  std::vector<bool> in_area;  // aligned with net.individuals
};
LoadedNetwork load_edgelist(const std::string& path, const Roster& roster);

// Removal order: zero-location individuals, out-of-area homes, individuals
// sharing no location with anyone else, then neighborhoods left with fewer
// than min_per_neighborhood members (evaluated once, after the earlier
// removals). Empty location columns are dropped and indices compacted.
std::pair<EcoNetwork, FilterReport> apply_filters(const EcoNetwork& net,
                                                  const std::vector<bool>& in_area,
                                                  int min_per_neighborhood);

void write_edgelist(const EcoNetwork& net, const std::string& path);
void write_roster(const EcoNetwork& net, const std::vector<bool>& in_area,
                  const std::string& path);

std::string filter_report_json(const FilterReport& report);

}  // namespace econet
