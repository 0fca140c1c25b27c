#include "econet/network.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "econet/errors.hpp"

namespace econet {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

long parse_count(const std::string& s, const std::string& path, long lineno) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError(path + ":" + std::to_string(lineno) +
                          ": malformed count '" + s + "'");
  }
  if (pos != s.size())
    throw ValidationError(path + ":" + std::to_string(lineno) +
                          ": malformed count '" + s + "'");
  if (v < 0)
    throw ValidationError(path + ":" + std::to_string(lineno) +
                          ": negative count " + s);
  return v;
}

}  // namespace

Roster load_roster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open roster file: " + path);
  Roster roster;
  std::unordered_set<std::string> seen;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (lineno == 1 && line.rfind("individual_id", 0) == 0))
      continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected individual_id,neighborhood_id,in_area");
    if (!seen.insert(fields[0]).second)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": duplicate individual '" + fields[0] + "'");
    if (fields[2] != "0" && fields[2] != "1")
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": in_area must be 0 or 1");
    roster.ids.push_back(fields[0]);
    roster.neighborhood.push_back(fields[1]);
    roster.in_area.push_back(fields[2] == "1");
  }
  return roster;
}

LoadedNetwork load_edgelist(const std::string& path, const Roster& roster) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list: " + path);

  std::unordered_map<std::string, int> roster_index;
  for (std::size_t r = 0; r < roster.ids.size(); ++r)
    roster_index.emplace(roster.ids[r], static_cast<int>(r));

  LoadedNetwork out;
  EcoNetwork& net = out.net;
  std::unordered_map<std::string, int> ind_index;
  std::unordered_map<std::string, int> loc_index;
  // per row: location index -> position in rows[i]
  std::vector<std::unordered_map<int, int>> row_pos;

  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (lineno == 1 && line.rfind("individual_id", 0) == 0))
      continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2 && fields.size() != 3)
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected individual_id,location_id[,count]");
    const std::string& ind = fields[0];
    const std::string& loc = fields[1];
    if (ind.empty() || loc.empty())
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": empty identifier");
    long count = fields.size() == 3 ? parse_count(fields[2], path, lineno) : 1;

    auto rit = roster_index.find(ind);
    if (rit == roster_index.end())
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": individual '" + ind + "' missing from roster");

    auto [iit, inew] = ind_index.emplace(ind, net.num_individuals());
    if (inew) {
      net.individuals.push_back(ind);
      net.neighborhood_of.push_back(roster.neighborhood[rit->second]);
      out.in_area.push_back(roster.in_area[rit->second]);
      net.rows.emplace_back();
      row_pos.emplace_back();
    }
    if (count == 0) continue;

    auto [jit, jnew] = loc_index.emplace(loc, net.num_locations());
    if (jnew) net.locations.push_back(loc);

    int i = iit->second, j = jit->second;
    auto [pit, pnew] = row_pos[i].emplace(j, static_cast<int>(net.rows[i].size()));
    if (pnew)
      net.rows[i].emplace_back(j, static_cast<int>(count));
    else
      net.rows[i][pit->second].second += static_cast<int>(count);
  }

  // roster-only individuals: empty rows, reported by apply_filters
  for (std::size_t r = 0; r < roster.ids.size(); ++r) {
    if (ind_index.count(roster.ids[r])) continue;
    net.individuals.push_back(roster.ids[r]);
    net.neighborhood_of.push_back(roster.neighborhood[r]);
    out.in_area.push_back(roster.in_area[r]);
    net.rows.emplace_back();
  }
  return out;
}

std::pair<EcoNetwork, FilterReport> apply_filters(const EcoNetwork& net,
                                                  const std::vector<bool>& in_area,
                                                  int min_per_neighborhood) {
  if (min_per_neighborhood < 1)
    throw ValidationError("min_per_neighborhood must be >= 1");
  if (in_area.size() != net.individuals.size())
    throw ValidationError("in_area flags do not match network individuals");

  const int I = net.num_individuals();
  FilterReport report;
  std::vector<bool> alive(I, true);

  for (int i = 0; i < I; ++i) {
    if (net.rows[i].empty()) {
      alive[i] = false;
      report.dropped_no_locations.push_back(net.individuals[i]);
    }
  }
  for (int i = 0; i < I; ++i) {
    if (alive[i] && !in_area[i]) {
      alive[i] = false;
      report.dropped_out_of_area.push_back(net.individuals[i]);
    }
  }

  // shared-location check over the survivors
  std::vector<int> visitors(net.num_locations(), 0);
  for (int i = 0; i < I; ++i)
    if (alive[i])
      for (auto& [j, c] : net.rows[i]) ++visitors[j];
  for (int i = 0; i < I; ++i) {
    if (!alive[i]) continue;
    bool shares = false;
    for (auto& [j, c] : net.rows[i])
      if (visitors[j] >= 2) {
        shares = true;
        break;
      }
    if (!shares) {
      alive[i] = false;
      report.dropped_no_shared_locations.push_back(net.individuals[i]);
    }
  }

  // neighborhood density check, once, after the individual-level removals
  std::unordered_map<std::string, int> nbhd_size;
  for (int i = 0; i < I; ++i)
    if (alive[i]) ++nbhd_size[net.neighborhood_of[i]];
  for (int i = 0; i < I; ++i) {
    if (alive[i] && nbhd_size[net.neighborhood_of[i]] < min_per_neighborhood) {
      alive[i] = false;
      report.dropped_sparse_neighborhood.push_back(net.individuals[i]);
    }
  }

  EcoNetwork out;
  std::vector<int> loc_map(net.num_locations(), -1);
  for (int i = 0; i < I; ++i) {
    if (!alive[i]) continue;
    out.individuals.push_back(net.individuals[i]);
    out.neighborhood_of.push_back(net.neighborhood_of[i]);
    auto& row = out.rows.emplace_back();
    for (auto& [j, c] : net.rows[i]) {
      if (loc_map[j] < 0) {
        loc_map[j] = out.num_locations();
        out.locations.push_back(net.locations[j]);
      }
      row.emplace_back(loc_map[j], c);
    }
  }
  report.kept = out.num_individuals();
  if (report.kept == 0)
    throw ValidationError("all individuals removed by filtering");
  return {std::move(out), std::move(report)};
}

void write_edgelist(const EcoNetwork& net, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot write edge list: " + path);
  outf << "individual_id,location_id,count\n";
  for (int i = 0; i < net.num_individuals(); ++i)
    for (auto& [j, c] : net.rows[i])
      outf << net.individuals[i] << ',' << net.locations[j] << ',' << c << '\n';
}

void write_roster(const EcoNetwork& net, const std::vector<bool>& in_area,
                  const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot write roster: " + path);
  outf << "individual_id,neighborhood_id,in_area\n";
  for (int i = 0; i < net.num_individuals(); ++i)
    outf << net.individuals[i] << ',' << net.neighborhood_of[i] << ','
         << (in_area.empty() || in_area[i] ? 1 : 0) << '\n';
}

std::string filter_report_json(const FilterReport& report) {
  nlohmann::json j;
  j["dropped_no_locations"] = report.dropped_no_locations;
  j["dropped_no_shared_locations"] = report.dropped_no_shared_locations;
  j["dropped_out_of_area"] = report.dropped_out_of_area;
  j["dropped_sparse_neighborhood"] = report.dropped_sparse_neighborhood;
  j["kept"] = report.kept;
  return j.dump(2) + "\n";
}

}  // namespace econet
