// Experiment runner. Exit codes: 0 all asserted bounds hold, 1 violation,
// 2 usage or configuration error.

#include "smoothed/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using smoothed::harness::ExperimentConfig;
using smoothed::harness::json;

namespace {

constexpr int kViolation = 1;
constexpr int kUsage = 2;

void add_knapsack_options(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--structure", cfg.structure, "subsets, card:k, or a file with one 0/1 vector per line");
  sub->add_option("--n", cfg.n, "number of variables");
  sub->add_option("--W", cfg.W, "coefficient bit width (default n)");
  sub->add_option("--rho", cfg.rho, "density multiplier, phi = rho / 2^(n W)");
  sub->add_option("--model", cfg.model, "coefficient model: window or peak");
  sub->add_option("--adversary-seed", cfg.adversary_seed, "seed for the adversary's placement of mass");
  sub->add_option_function<std::int64_t>("--t", [&cfg](const std::int64_t& t) { cfg.t = t; },
                                         "threshold (default n 2^W / 4)");
  sub->add_option("--start-bits", cfg.start_bits, "bits revealed in the first round (default ceil(log2 n) + 1)");
}

void add_graph_options(CLI::App* sub, ExperimentConfig& cfg, bool with_n) {
  if (with_n) sub->add_option("--n", cfg.n, "number of vertices");
  sub->add_option("--k", cfg.k, "number of colors");
  sub->add_option_function<unsigned>("--phi-exp", [&cfg](const unsigned& e) { cfg.phi_exp = e; },
                                     "phi = 2^-e; the flip probability is derived from it");
  sub->add_option("--flip", cfg.flip, "flip probability, used when --phi-exp is absent");
  sub->add_option("--base", cfg.base, "adversarial base graph: multipartite, complete or empty");
}

void add_step_options(CLI::App* sub, ExperimentConfig& cfg) {
  sub->add_option("--eps", cfg.eps, "moment exponent, rational such as 1/2");
  sub->add_option("--c", cfg.c, "tail polynomial p(n) = n^c");
}

int write_outputs(const ExperimentConfig& cfg, const smoothed::harness::CampaignResult& result) {
  if (cfg.command == "codec-check") {
    const std::string text = result.summary.dump(2);
    if (cfg.out.empty()) {
      std::cout << text << "\n";
    } else {
      std::ofstream out(cfg.out);
      if (!out) throw std::runtime_error("cannot write " + cfg.out);
      out << text << "\n";
    }
    return result.violation ? kViolation : 0;
  }
  if (cfg.out.empty()) {
    smoothed::harness::write_csv(std::cout, cfg, result);
    std::cerr << result.summary.dump(2) << "\n";
  } else {
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot write " + cfg.out);
    smoothed::harness::write_csv(out, cfg, result);
    std::cout << result.summary.dump(2) << "\n";
  }
  return result.violation ? kViolation : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed complexity experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  ExperimentConfig cfg;
  std::string config_file;
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--trials", cfg.trials, "number of trials");
  app.add_option("--out", cfg.out, "output file (CSV, or JSON for codec-check)");
  app.add_option("--threads", cfg.threads, "worker threads");
  app.add_option("--config", config_file, "JSON config; its fields override flags");

  auto* solve = app.add_subcommand("solve", "adaptive bit-revealing solver campaign");
  add_knapsack_options(solve, cfg);
  add_step_options(solve, cfg);

  auto* gapsim = app.add_subcommand("gapsim", "winner and loser gap probabilities against the separating bound");
  add_knapsack_options(gapsim, cfg);
  gapsim->add_option("--delta-grid", cfg.delta_grid, "lo:hi:step or comma list of integers");
  gapsim->add_option("--ranking", cfg.ranking, "lex or scrambled");

  auto* colorsim = app.add_subcommand("colorsim", "k-coloring on perturbed graphs");
  add_graph_options(colorsim, cfg, true);
  add_step_options(colorsim, cfg);

  auto* codec = app.add_subcommand("codec-check", "verify the compression function on a family file");
  codec->add_option("--family", cfg.family, "family specification JSON")->required();
  codec->add_flag("--exhaustive", cfg.exhaustive, "check the whole support (otherwise --trials samples)");

  auto* scheme = app.add_subcommand("scheme-sim", "errorless heuristic scheme bottom rates");
  scheme->add_option("--inner", cfg.inner, "solve or color");
  scheme->add_option("--delta-grid", cfg.delta_grid, "comma list of rationals in (0, 1)");
  add_knapsack_options(scheme, cfg);
  add_graph_options(scheme, cfg, false);
  add_step_options(scheme, cfg);

  auto* tail = app.add_subcommand("tailcheck", "tail curve of step counts against the polynomial tail bound");
  tail->add_option("--inner", cfg.inner, "solve or color");
  add_knapsack_options(tail, cfg);
  add_graph_options(tail, cfg, false);
  add_step_options(tail, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw smoothed::harness::ConfigError({"config (cannot open '" + config_file + "')"});
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw smoothed::harness::ConfigError({std::string("config (") + e.what() + ")"});
      }
      const std::string command = cfg.command;
      cfg.merge_json(j);
      cfg.command = command;
    }
    const auto result = smoothed::harness::run_campaign(cfg);
    return write_outputs(cfg, result);
  } catch (const smoothed::harness::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
