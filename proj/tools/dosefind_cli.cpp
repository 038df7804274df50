// dosefind: simulation studies, boundary tables and the recommender service.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "dosefind/beta.hpp"
#include "dosefind/report.hpp"
#include "dosefind/scenarios.hpp"
#include "dosefind/service_http.hpp"
#include "dosefind/study.hpp"

using namespace dosefind;

namespace {

constexpr int kConfigExit = 2;

struct CommonOptions {
  std::string scenarios = "builtin";
  std::uint64_t replicates = 10000;
  std::uint64_t seed = 20240101;
  double phi = 0.30;
  int n = 36;
  int cohort = 3;
  std::string threads = "auto";
  std::string early_stopping = "off";
  std::string selection_rule = "dose-level";
  std::string escalation_reference = "selected";
  std::string key_strips = "exclude";
  double elim_threshold = 0.95;
  int elim_min_n = 3;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenarios", o.scenarios,
                  "'builtin' or a JSON file of {name, true_tox[], true_mtd}")
      ->capture_default_str();
  cmd->add_option("--replicates", o.replicates, "Replicates per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--phi", o.phi, "Target toxicity level")->capture_default_str();
  cmd->add_option("--n", o.n, "Maximum sample size")->capture_default_str();
  cmd->add_option("--cohort", o.cohort, "Cohort size")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads or 'auto'")
      ->capture_default_str();
  cmd->add_option("--early-stopping", o.early_stopping,
                  "Allow the lowest dose to be eliminated (stopping the trial)")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  cmd->add_option("--selection-rule", o.selection_rule,
                  "Bandit candidate choice inside a branch")
      ->check(CLI::IsMember({"dose-level", "sampled-value"}))
      ->capture_default_str();
  cmd->add_option("--escalation-reference", o.escalation_reference,
                  "Dose the bandit branches move from")
      ->check(CLI::IsMember({"selected", "frontier"}))
      ->capture_default_str();
  cmd->add_option("--key-strips", o.key_strips,
                  "Keyboard bandit values in the uncovered edge strips")
      ->check(CLI::IsMember({"exclude", "merge"}))
      ->capture_default_str();
  cmd->add_option("--elim-threshold", o.elim_threshold,
                  "Posterior over-toxicity probability that eliminates a dose")
      ->capture_default_str();
  cmd->add_option("--elim-min-n", o.elim_min_n,
                  "Minimum patients at a dose before elimination applies")
      ->capture_default_str();
}

DesignParams base_params(const CommonOptions& o, int num_doses) {
  DesignParams p;
  p.phi = o.phi;
  p.num_doses = num_doses;
  p.sample_size = o.n;
  p.cohort_size = o.cohort;
  p.early_stopping = o.early_stopping == "on";
  p.selection_rule = o.selection_rule == "dose-level" ? SelectionRule::DoseLevel
                                                      : SelectionRule::SampledValue;
  p.escalation_reference = o.escalation_reference == "selected"
                               ? EscalationReference::Selected
                               : EscalationReference::Frontier;
  p.exclude_key_strips = o.key_strips == "exclude";
  p.elimination_threshold = o.elim_threshold;
  p.elimination_min_n = o.elim_min_n;
  return p;
}

std::vector<Scenario> scenarios_from(const std::string& spec) {
  if (spec == "builtin") return builtin_scenarios();
  try {
    return load_scenarios(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

int num_doses_of(const std::vector<Scenario>& scenarios) {
  if (scenarios.empty()) throw ConfigError("no scenarios given");
  const std::size_t K = scenarios.front().true_tox.size();
  for (const Scenario& s : scenarios) {
    if (s.true_tox.size() != K) {
      throw ConfigError("all scenarios must have the same number of doses");
    }
  }
  return static_cast<int>(K);
}

StudyConfig study_config(const CommonOptions& o) {
  StudyConfig c;
  c.replicates = o.replicates;
  c.master_seed = o.seed;
  if (o.threads == "auto") {
    c.parallelism = 0;
  } else {
    try {
      const int t = std::stoi(o.threads);
      if (t < 1) throw std::invalid_argument("");
      c.parallelism = static_cast<unsigned>(t);
    } catch (const std::exception&) {
      throw ConfigError("--threads must be 'auto' or a positive integer");
    }
  }
  return c;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<DesignParams> designs_from(const std::string& list,
                                       const DesignParams& base) {
  std::vector<DesignParams> out;
  for (const std::string& label : split_list(list)) {
    if (label == "all") {
      for (const DesignParams& d : reference_designs(base)) out.push_back(d);
    } else {
      out.push_back(with_design(base, label));
    }
  }
  if (out.empty()) throw ConfigError("no designs given");
  for (const DesignParams& d : out) d.validate();
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate(const CommonOptions& o, const std::string& designs,
                 const std::string& out_dir, const std::string& formats) {
  const auto scenarios = scenarios_from(o.scenarios);
  const DesignParams base = base_params(o, num_doses_of(scenarios));
  const auto design_list = designs_from(designs, base);
  std::vector<ReportFormat> fmt;
  for (const std::string& f : split_list(formats)) fmt.push_back(parse_report_format(f));
  const StudyConfig config = study_config(o);

  const auto t0 = std::chrono::steady_clock::now();
  const StudyMetrics metrics = run_study(design_list, scenarios, config);
  std::fprintf(stderr, "simulated %zu designs x %zu scenarios x %llu replicates in %.1f s\n",
               design_list.size(), scenarios.size(),
               static_cast<unsigned long long>(config.replicates), seconds_since(t0));

  write_table_text(std::cout, metrics, scenarios);
  if (!fmt.empty()) {
    for (const auto& path : emit_report(metrics, scenarios, out_dir, fmt)) {
      std::fprintf(stderr, "wrote %s\n", path.c_str());
    }
  }
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& eps_list,
              const std::string& families, const std::string& out_dir) {
  const auto scenarios = scenarios_from(o.scenarios);
  const DesignParams base = base_params(o, num_doses_of(scenarios));
  std::vector<double> eps;
  for (const std::string& e : split_list(eps_list)) {
    try {
      eps.push_back(std::stod(e));
    } catch (const std::exception&) {
      throw ConfigError("bad epsilon '" + e + "'");
    }
  }
  if (eps.empty()) throw ConfigError("no epsilon values given");
  std::vector<Family> fams;
  for (const std::string& f : split_list(families)) {
    if (f == "boin") {
      fams.push_back(Family::Boin);
    } else if (f == "keyboard") {
      fams.push_back(Family::Keyboard);
    } else {
      throw ConfigError("unknown family '" + f + "'");
    }
  }
  const auto rows = epsilon_sweep(eps, fams, base, scenarios, study_config(o));
  write_sweep_csv(std::cout, rows, scenarios);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "eps_sweep.csv";
    std::ofstream out(path);
    write_sweep_csv(out, rows, scenarios);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::fprintf(stderr, "wrote %s\n", path.c_str());
  }
  return 0;
}

int cmd_boundaries(double phi) {
  const Boundaries b = boin_boundaries(phi);
  std::printf("phi       %.4f\n", phi);
  std::printf("lambda_e  %.4f\n", b.lambda_e);
  std::printf("lambda_d  %.4f\n", b.lambda_d);
  try {
    const KeyPartition k = keyboard_partition(phi);
    std::printf("target key  [%.2f, %.2f]\n", k.target.lo, k.target.hi);
    std::printf("lower keys ");
    for (const Key& key : k.lower) std::printf(" [%.2f, %.2f]", key.lo, key.hi);
    std::printf("\nupper keys ");
    for (const Key& key : k.upper) std::printf(" [%.2f, %.2f]", key.lo, key.hi);
    std::printf("\n");
  } catch (const DomainError& e) {
    std::printf("keyboard partition unavailable: %s\n", e.what());
  }
  return 0;
}

HttpFrontend* g_frontend = nullptr;

extern "C" void on_signal(int) {
  if (g_frontend) g_frontend->stop();
}

int cmd_serve(const std::string& host, int port, std::string data_dir) {
  if (data_dir.empty()) {
    if (const char* env = std::getenv("DOSEFIND_DATA_DIR")) data_dir = env;
  }
  if (data_dir.empty()) data_dir = "dosefind-data";
  TrialService service(data_dir);
  HttpFrontend frontend(service, [](const std::string& line) {
    std::fprintf(stderr, "%s\n", line.c_str());
  });
  g_frontend = &frontend;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::fprintf(stderr, "serving %zu sessions from %s on %s:%d\n", service.size(),
               data_dir.c_str(), host.c_str(), port);
  const bool ok = frontend.listen(host, port);
  g_frontend = nullptr;
  if (!ok) {
    std::fprintf(stderr, "error: cannot listen on %s:%d\n", host.c_str(), port);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dose-finding designs: simulation studies and live trial recommendations"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  std::string designs = "all";
  std::string out_dir = "results";
  std::string formats = "csv,json,table,plot";
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo operating-characteristics study");
  add_common(sim, sim_opts);
  sim->add_option("--designs", designs,
                  "Comma list of design labels (boin, boin-ts, boin-ts-eps:0.05, "
                  "boin-greedy, boin-median, keyboard, ...) or 'all'")
      ->capture_default_str();
  sim->add_option("--out", out_dir, "Output directory")->capture_default_str();
  sim->add_option("--format", formats, "Comma list of csv, json, table, plot")
      ->capture_default_str();

  CommonOptions sweep_opts;
  std::string eps_list = "0.01,0.03,0.05,0.10";
  std::string families = "boin,keyboard";
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep-eps", "PCMI of Thompson sampling-eps across eps");
  add_common(sweep, sweep_opts);
  sweep->add_option("--eps", eps_list, "Comma list of eps values")->capture_default_str();
  sweep->add_option("--families", families, "Comma list of boin, keyboard")
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "Also write eps_sweep.csv here");

  double bphi = 0.30;
  auto* bounds = app.add_subcommand("boundaries", "Print BOIN boundaries and keyboard keys");
  bounds->add_option("--phi", bphi, "Target toxicity level")->capture_default_str();

  std::string host = "0.0.0.0";
  int port = 8080;
  std::string data_dir;
  auto* serve = app.add_subcommand("serve", "Run the trial recommender HTTP service");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--data-dir", data_dir,
                    "Session directory (default $DOSEFIND_DATA_DIR or ./dosefind-data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    if (*sim) return cmd_simulate(sim_opts, designs, out_dir, formats);
    if (*sweep) return cmd_sweep(sweep_opts, eps_list, families, sweep_out);
    if (*bounds) return cmd_boundaries(bphi);
    if (*serve) return cmd_serve(host, port, data_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
