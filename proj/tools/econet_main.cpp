#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"

#include "econet/errors.hpp"
#include "econet/lda.hpp"
#include "econet/metrics.hpp"
#include "econet/model_io.hpp"
#include "econet/network.hpp"
#include "econet/regress.hpp"
#include "econet/sharesim.hpp"
#include "econet/synth.hpp"
#include "manifest.hpp"

namespace {

using namespace econet;
using econet::tools::RunManifest;
using econet::tools::write_manifest;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write: " + path);
  return out;
}

std::string outpath(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return dir + "/" + name;
}

// "a:b" or "a:b:s" ranges and comma lists
std::vector<int> parse_grid(const std::string& s) {
  std::vector<int> grid;
  if (s.find(':') != std::string::npos) {
    int lo = 0, hi = 0, step = 1;
    char extra = 0;
    int got = std::sscanf(s.c_str(), "%d:%d:%d%c", &lo, &hi, &step, &extra);
    if (got < 2 || (got > 3))
      throw ValidationError("bad grid spec '" + s + "' (want lo:hi[:step])");
    if (got == 2) step = 1;
    if (step < 1 || hi < lo) throw ValidationError("bad grid range '" + s + "'");
    for (int k = lo; k <= hi; k += step) grid.push_back(k);
  } else {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) grid.push_back(std::stoi(tok));
  }
  if (grid.empty()) throw ValidationError("empty grid");
  return grid;
}

// generic CSV with a string key in the first column and numeric columns after
DataTable read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty table: " + path);
  DataTable table;
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty() && tok.back() == '\r') tok.pop_back();
      header.push_back(tok);
    }
  }
  if (header.size() < 2)
    throw ValidationError("table needs a key column and data columns: " + path);
  for (std::size_t c = 1; c < header.size(); ++c) {
    table.columns.push_back(header[c]);
    table.data.emplace_back();
  }
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty() && tok.back() == '\r') tok.pop_back();
      fields.push_back(tok);
    }
    while (fields.size() < header.size()) fields.push_back("");
    if (fields.size() != header.size())
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": wrong field count");
    table.keys.push_back(fields[0]);
    for (std::size_t c = 1; c < header.size(); ++c) {
      double v = std::numeric_limits<double>::quiet_NaN();
      if (!fields[c].empty()) {
        try {
          v = std::stod(fields[c]);
        } catch (const std::exception&) {
          v = std::numeric_limits<double>::quiet_NaN();
        }
      }
      table.data[c - 1].push_back(v);
    }
  }
  return table;
}

// left-join on row keys; covariate columns are appended, missing rows get NaN
void join_covariates(DataTable& table, const DataTable& cov) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < cov.keys.size(); ++r) index[cov.keys[r]] = r;
  for (std::size_t c = 0; c < cov.columns.size(); ++c) {
    std::vector<double> col(table.rows(),
                            std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < table.keys.size(); ++r) {
      auto it = index.find(table.keys[r]);
      if (it != index.end()) col[r] = cov.data[c][it->second];
    }
    table.add_column(cov.columns[c], std::move(col));
  }
}

LoadedNetwork load_inputs(const std::string& edges, const std::string& roster) {
  return load_edgelist(edges, load_roster(roster));
}

int cmd_ingest(const std::string& edges, const std::string& roster,
               int min_per_neighborhood, const std::string& outdir, bool report) {
  auto loaded = load_inputs(edges, roster);
  auto [net, rep] = apply_filters(loaded.net, loaded.in_area, min_per_neighborhood);
  write_edgelist(net, outpath(outdir, "filtered_edges.csv"));
  write_roster(net, {}, outpath(outdir, "filtered_roster.csv"));
  RunManifest manifest{.command = "ingest",
                       .params = {{"min_per_neighborhood", min_per_neighborhood}},
                       .inputs = {edges, roster},
                       .outputs = {outdir + "/filtered_edges.csv",
                                   outdir + "/filtered_roster.csv"}};
  if (report) {
    open_out(outpath(outdir, "filter_report.json")) << filter_report_json(rep);
    manifest.outputs.push_back(outdir + "/filter_report.json");
  }
  write_manifest(manifest, outdir);
  std::cerr << "kept " << rep.kept << " individuals, " << net.num_locations()
            << " locations\n";
  return 0;
}

int cmd_synth(const SynthSpec& spec, const std::string& outdir) {
  SynthResult synth = generate(spec);
  write_edgelist(synth.net, outpath(outdir, "edges.csv"));
  write_roster(synth.net, {}, outpath(outdir, "roster.csv"));
  nlohmann::json truth;
  truth["k_true"] = spec.K_true;
  truth["labels"] = synth.truth.labels;
  truth["W_true"] = synth.truth.W;
  truth["H_true"] = synth.truth.H;
  truth["kept_locations"] = synth.truth.kept_locations;
  open_out(outpath(outdir, "truth.json")) << truth.dump() << "\n";
  write_manifest({.command = "synth",
                  .params = {{"individuals", spec.I},
                             {"locations", spec.J},
                             {"k_true", spec.K_true},
                             {"tokens_min", spec.tokens_min},
                             {"tokens_max", spec.tokens_max},
                             {"seed", spec.seed}},
                  .inputs = {},
                  .outputs = {outdir + "/edges.csv", outdir + "/roster.csv",
                              outdir + "/truth.json"}},
                 outdir);
  return 0;
}

int cmd_select_k(const std::string& edges, const std::string& roster,
                 const std::string& grid_spec, int replicates, double test_fraction,
                 const LdaConfig& base, int jobs, const std::string& outdir) {
  auto loaded = load_inputs(edges, roster);
  auto grid = parse_grid(grid_spec);
  auto result = select_k(loaded.net, grid, replicates, test_fraction, base, jobs);

  auto csv = open_out(outpath(outdir, "perplexity.csv"));
  csv << "replicate,K,perplexity\n";
  for (int r = 0; r < replicates; ++r)
    for (std::size_t g = 0; g < grid.size(); ++g)
      csv << r << ',' << grid[g] << ',' << fmt(result.perplexities[r][g]) << '\n';
  csv.close();

  nlohmann::json summary;
  summary["grid"] = grid;
  summary["replicates"] = replicates;
  summary["test_fraction"] = test_fraction;
  summary["selected_K"] = result.selected_K;
  open_out(outpath(outdir, "selection.json")) << summary.dump(2) << "\n";

  write_manifest({.command = "select-k",
                  .params = {{"grid", grid_spec},
                             {"replicates", replicates},
                             {"test_fraction", test_fraction},
                             {"iterations", base.iterations},
                             {"burn_in", base.burn_in},
                             {"seed", base.seed},
                             {"jobs", jobs}},
                  .inputs = {edges, roster},
                  .outputs = {outdir + "/perplexity.csv",
                              outdir + "/selection.json"}},
                 outdir);
  std::cerr << "selected K = " << result.selected_K << "\n";
  return 0;
}

int cmd_fit(const std::string& edges, const std::string& roster,
            const LdaConfig& config, const std::string& outdir) {
  auto loaded = load_inputs(edges, roster);
  CommunityModel model = fit(loaded.net, config);
  save_model(model, outpath(outdir, "model.json"));
  write_manifest({.command = "fit",
                  .params = {{"k", config.K},
                             {"iterations", config.iterations},
                             {"burn_in", config.burn_in},
                             {"seed", config.seed},
                             {"last_sweep_only", config.last_sweep_only}},
                  .inputs = {edges, roster},
                  .outputs = {outdir + "/model.json"}},
                 outdir);
  return 0;
}

int cmd_metrics(const std::string& model_path, const std::string& edges,
                const std::string& roster, const std::string& outdir) {
  CommunityModel model = load_model(model_path);
  auto loaded = load_inputs(edges, roster);

  auto indiv = individual_metrics(loaded.net, model);
  auto icsv = open_out(outpath(outdir, "individual_metrics.csv"));
  icsv << "individual_id,neighborhood_id,modal_community,modal_probability,"
          "gini,n_locations\n";
  for (const auto& m : indiv)
    icsv << m.individual << ',' << m.neighborhood << ','
         << (m.modal_community + 1) << ',' << fmt(m.modal_probability) << ','
         << fmt(m.gini) << ',' << m.n_locations << '\n';
  icsv.close();

  auto nbhd = summarize_neighborhoods(loaded.net, model);
  auto ncsv = open_out(outpath(outdir, "neighborhood_metrics.csv"));
  ncsv << "neighborhood_id,n_individuals,mean_gini,mean_n_locations,"
          "share_modal,share_modal_singleton,largest_modal_share,"
          "n_modal_communities,total_variation\n";
  for (const auto& s : nbhd) {
    ncsv << s.neighborhood << ',' << s.n_individuals << ',' << fmt(s.mean_gini)
         << ',' << fmt(s.mean_n_locations) << ',' << fmt(s.share_modal) << ','
         << (s.share_modal_singleton ? 1 : 0) << ','
         << fmt(s.largest_modal_share) << ',' << s.n_modal_communities << ',';
    if (s.total_variation) ncsv << fmt(*s.total_variation);
    ncsv << '\n';
  }
  ncsv.close();

  write_manifest({.command = "metrics",
                  .params = nlohmann::json::object(),
                  .inputs = {model_path, edges, roster},
                  .outputs = {outdir + "/individual_metrics.csv",
                              outdir + "/neighborhood_metrics.csv"}},
                 outdir);
  return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& n_spec,
                 const ShareSimOptions& options, const std::string& outdir) {
  CommunityModel model = load_model(model_path);
  auto n_values = parse_grid(n_spec);
  ShareCurve curve = simulate_share_curve(model, n_values, options);

  auto csv = open_out(outpath(outdir, "share_curve.csv"));
  csv << "n,series,mean,sd\n";
  for (std::size_t idx = 0; idx < n_values.size(); ++idx) {
    csv << n_values[idx] << ",within," << fmt(curve.within[idx].mean) << ','
        << fmt(curve.within[idx].sd) << '\n';
    csv << n_values[idx] << ",between," << fmt(curve.between[idx].mean) << ','
        << fmt(curve.between[idx].sd) << '\n';
    csv << n_values[idx] << ",analytic," << fmt(curve.analytic[idx]) << ",\n";
  }
  csv.close();

  write_manifest({.command = "simulate",
                  .params = {{"n_values", n_spec},
                             {"pairs_per_n", options.pairs_per_n},
                             {"seed", options.seed},
                             {"uniform_strata", options.uniform_strata},
                             {"analytic_j", options.analytic_J},
                             {"jobs", options.jobs}},
                  .inputs = {model_path},
                  .outputs = {outdir + "/share_curve.csv"}},
                 outdir);
  return 0;
}

int cmd_regress(const std::string& table_path, const std::string& cov_path,
                const RegressionSpec& spec, const std::string& outdir) {
  DataTable table = read_table_csv(table_path);
  std::vector<std::string> inputs = {table_path};
  if (!cov_path.empty()) {
    join_covariates(table, read_table_csv(cov_path));
    inputs.push_back(cov_path);
  }
  RegressionFit result = ols_fit(table, spec);
  if (result.dropped > 0)
    std::cerr << "dropped " << result.dropped << " incomplete cases\n";

  auto csv = open_out(outpath(outdir, "regression.csv"));
  csv << "term,estimate,se,p_value\n";
  for (const auto& c : result.coefficients)
    csv << c.term << ',' << fmt(c.estimate) << ',' << fmt(c.se) << ','
        << fmt(c.p_value) << '\n';
  csv.close();

  nlohmann::json j;
  j["response"] = spec.response;
  j["n"] = result.n;
  j["dropped"] = result.dropped;
  j["r_squared"] = result.r_squared;
  for (const auto& c : result.coefficients)
    j["coefficients"].push_back({{"term", c.term},
                                 {"estimate", c.estimate},
                                 {"se", c.se},
                                 {"p_value", c.p_value}});
  open_out(outpath(outdir, "regression.json")) << j.dump(2) << "\n";

  nlohmann::json interactions = nlohmann::json::array();
  for (auto& [a, b] : spec.interactions) interactions.push_back(a + ":" + b);
  write_manifest({.command = "regress",
                  .params = {{"response", spec.response},
                             {"terms", spec.terms},
                             {"interactions", interactions},
                             {"standardize", spec.standardize}},
                  .inputs = inputs,
                  .outputs = {outdir + "/regression.csv",
                              outdir + "/regression.json"}},
                 outdir);
  return 0;
}

int cmd_export(const std::string& model_path, const std::string& outdir) {
  CommunityModel model = load_model(model_path);
  auto wcsv = open_out(outpath(outdir, "W.csv"));
  wcsv << "individual_id";
  for (int k = 0; k < model.K; ++k) wcsv << ",community_" << (k + 1);
  wcsv << '\n';
  for (int i = 0; i < model.I; ++i) {
    wcsv << model.individuals[i];
    for (int k = 0; k < model.K; ++k) wcsv << ',' << fmt(model.w(i, k));
    wcsv << '\n';
  }
  wcsv.close();
  auto hcsv = open_out(outpath(outdir, "H.csv"));
  hcsv << "community";
  for (int j = 0; j < model.J; ++j) hcsv << ',' << model.locations[j];
  hcsv << '\n';
  for (int k = 0; k < model.K; ++k) {
    hcsv << (k + 1);
    for (int j = 0; j < model.J; ++j) hcsv << ',' << fmt(model.h(k, j));
    hcsv << '\n';
  }
  hcsv.close();
  write_manifest({.command = "export",
                  .params = nlohmann::json::object(),
                  .inputs = {model_path},
                  .outputs = {outdir + "/W.csv", outdir + "/H.csv"}},
                 outdir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eco-network community detection toolkit"};
  app.set_config("--config", "", "key=value config file; flags take precedence");
  app.require_subcommand(1);

  std::string edges, roster, outdir = ".", model_path, grid = "5:140";
  std::string table_path, cov_path, n_spec = "1:35", plan = "aligned";
  int min_per_neighborhood = 4, replicates = 20, jobs = 1;
  double test_fraction = 0.1;
  bool report = false;

  LdaConfig lda;
  double alpha_flag = 0.0, beta_flag = 0.0;
  auto add_lda_flags = [&](CLI::App* cmd, bool with_k) {
    if (with_k) cmd->add_option("--k", lda.K, "number of communities")->required();
    cmd->add_option("--alpha", alpha_flag,
                    "symmetric Dirichlet prior on assignment vectors (default 50/K)");
    cmd->add_option("--beta", beta_flag,
                    "symmetric Dirichlet prior on activity profiles (default 0.1)");
    cmd->add_option("--iterations", lda.iterations, "Gibbs sweeps");
    cmd->add_option("--burn-in", lda.burn_in, "sweeps discarded before averaging");
    cmd->add_option("--seed", lda.seed, "RNG seed")->required();
  };
  auto net_flags = [&](CLI::App* cmd) {
    cmd->add_option("--edges", edges, "edge list CSV")->required();
    cmd->add_option("--roster", roster, "roster CSV")->required();
  };
  auto out_flag = [&](CLI::App* cmd) {
    cmd->add_option("--output-dir", outdir, "output directory (default .)");
  };

  auto* ingest = app.add_subcommand("ingest", "load, filter, and re-emit a network");
  net_flags(ingest);
  out_flag(ingest);
  ingest->add_option("--min-per-neighborhood", min_per_neighborhood,
                     "drop neighborhoods with fewer members (default 4)");
  ingest->add_flag("--report", report, "also write filter_report.json");

  SynthSpec spec;
  auto* synth = app.add_subcommand("synth", "generate a synthetic network");
  synth->add_option("--individuals", spec.I)->required();
  synth->add_option("--locations", spec.J)->required();
  synth->add_option("--k-true", spec.K_true)->required();
  double alpha_true = 0.0, beta_true = 0.0;
  synth->add_option("--alpha-true", alpha_true, "generator Dirichlet prior on W");
  synth->add_option("--beta-true", beta_true, "generator Dirichlet prior on H");
  synth->add_option("--tokens-min", spec.tokens_min);
  synth->add_option("--tokens-max", spec.tokens_max);
  synth->add_option("--plan", plan, "aligned|mixed neighborhood plan");
  synth->add_option("--neighborhoods", spec.n_neighborhoods,
                    "neighborhood count for the mixed plan");
  synth->add_option("--seed", spec.seed)->required();
  out_flag(synth);

  auto* selectk = app.add_subcommand("select-k", "choose K by held-out perplexity");
  net_flags(selectk);
  out_flag(selectk);
  selectk->add_option("--grid", grid, "K grid, lo:hi[:step] or comma list");
  selectk->add_option("--replicates", replicates, "train/test splits (default 20)");
  selectk->add_option("--test-fraction", test_fraction,
                      "held-out individual fraction (default 0.1)");
  selectk->add_option("--jobs", jobs, "parallel cells (default 1)");
  add_lda_flags(selectk, false);

  auto* fitcmd = app.add_subcommand("fit", "fit the community model");
  net_flags(fitcmd);
  out_flag(fitcmd);
  add_lda_flags(fitcmd, true);
  fitcmd->add_flag("--last-sweep-only", lda.last_sweep_only,
                   "take the final sweep instead of post-burn-in averaging");

  auto* metrics = app.add_subcommand(
      "metrics", "per-individual and per-neighborhood attachment metrics");
  metrics->add_option("--model", model_path, "model JSON")->required();
  net_flags(metrics);
  out_flag(metrics);

  ShareSimOptions sim;
  auto* simulate =
      app.add_subcommand("simulate", "shared-location probability curves");
  simulate->add_option("--model", model_path, "model JSON")->required();
  simulate->add_option("--n-values", n_spec, "locations per individual (default 1:35)");
  simulate->add_option("--pairs-per-n", sim.pairs_per_n, "pairs per point");
  simulate->add_option("--seed", sim.seed)->required();
  simulate->add_option("--jobs", sim.jobs, "parallel cells (default 1)");
  simulate->add_flag("--uniform-strata", sim.uniform_strata,
                     "weight communities equally instead of by size");
  simulate->add_option("--analytic-j", sim.analytic_J,
                       "location count for the analytic baseline (default model J)");
  out_flag(simulate);

  RegressionSpec rspec;
  std::vector<std::string> interaction_flags;
  bool no_standardize = false;
  auto* regress =
      app.add_subcommand("regress", "standardized OLS on neighborhood tables");
  regress->add_option("--table", table_path, "neighborhood metrics CSV")->required();
  regress->add_option("--covariates", cov_path,
                      "covariate CSV joined on the key column");
  regress->add_option("--response", rspec.response)->required();
  regress->add_option("--term", rspec.terms, "main effect (repeatable)")->required();
  regress->add_option("--interaction", interaction_flags,
                      "interaction a:b (repeatable)");
  regress->add_flag("--no-standardize", no_standardize);
  out_flag(regress);

  auto* exportcmd = app.add_subcommand("export", "dump W and H matrices as CSV");
  exportcmd->add_option("--model", model_path, "model JSON")->required();
  out_flag(exportcmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (alpha_flag > 0.0) lda.alpha = {alpha_flag};
    if (beta_flag > 0.0) lda.beta = {beta_flag};
    if (*ingest)
      return cmd_ingest(edges, roster, min_per_neighborhood, outdir, report);
    if (*synth) {
      if (alpha_true > 0.0) spec.alpha_true = {alpha_true};
      if (beta_true > 0.0) spec.beta_true = {beta_true};
      if (plan == "aligned")
        spec.plan = SynthSpec::Plan::aligned;
      else if (plan == "mixed")
        spec.plan = SynthSpec::Plan::mixed;
      else
        throw ValidationError("unknown plan '" + plan + "'");
      return cmd_synth(spec, outdir);
    }
    if (*selectk)
      return cmd_select_k(edges, roster, grid, replicates, test_fraction, lda,
                          jobs, outdir);
    if (*fitcmd) return cmd_fit(edges, roster, lda, outdir);
    if (*metrics) return cmd_metrics(model_path, edges, roster, outdir);
    if (*simulate) return cmd_simulate(model_path, n_spec, sim, outdir);
    if (*regress) {
      for (const auto& s : interaction_flags) {
        auto pos = s.find(':');
        if (pos == std::string::npos || pos == 0 || pos + 1 == s.size())
          throw ValidationError("interaction must look like a:b");
        rspec.interactions.emplace_back(s.substr(0, pos), s.substr(pos + 1));
      }
      rspec.standardize = !no_standardize;
      return cmd_regress(table_path, cov_path, rspec, outdir);
    }
    if (*exportcmd) return cmd_export(model_path, outdir);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
