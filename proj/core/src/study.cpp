#include "dosefind/study.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dosefind/rng.hpp"

namespace dosefind {

namespace {

constexpr std::uint64_t kChunk = 250;

struct Task {
  std::size_t cell;
  std::uint64_t begin;
  std::uint64_t end;
};

struct Partial {
  std::vector<std::uint64_t> selected;
  std::vector<std::uint64_t> patients;
  std::uint64_t no_mtd = 0;
};

Partial run_chunk(const Design& design, const Scenario& scenario,
                  std::uint64_t master_seed, std::uint64_t begin,
                  std::uint64_t end) {
  const int K = design.params().num_doses;
  Partial out;
  out.selected.assign(K, 0);
  out.patients.assign(K, 0);
  const std::string label = design.params().design_label();
  for (std::uint64_t r = begin; r < end; ++r) {
    RngStream rng(master_seed, replicate_stream_id(label, scenario.name, r));
    const TrialState final_state = simulate_trial(design, scenario.true_tox, rng);
    for (int k = 0; k < K; ++k) out.patients[k] += final_state.doses[k].n;
    if (const auto mtd = select_mtd(final_state, design)) {
      ++out.selected[*mtd - 1];
    } else {
      ++out.no_mtd;
    }
  }
  return out;
}

double pct(std::uint64_t count, std::uint64_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / total;
}

}  // namespace

double CellMetrics::pcmi() const { return selection_pct(true_mtd); }

double CellMetrics::selection_pct(int dose) const {
  return pct(selected.at(dose - 1), replicates);
}

double CellMetrics::avg_patients(int dose) const {
  return replicates == 0
             ? 0.0
             : static_cast<double>(patients.at(dose - 1)) / replicates;
}

double CellMetrics::pct_no_mtd() const { return pct(no_mtd, replicates); }

std::uint64_t CellMetrics::total_patients() const {
  std::uint64_t total = 0;
  for (auto p : patients) total += p;
  return total;
}

const CellMetrics& StudyMetrics::at(const std::string& design,
                                    const std::string& scenario) const {
  for (const CellMetrics& c : cells) {
    if (c.design == design && c.scenario == scenario) return c;
  }
  throw std::out_of_range("no metrics for " + design + " / " + scenario);
}

StudyMetrics run_study(const std::vector<DesignParams>& designs,
                       const std::vector<Scenario>& scenarios,
                       const StudyConfig& config) {
  if (config.replicates < 1) throw ConfigError("replicates must be >= 1");

  std::vector<Design> built;
  built.reserve(designs.size());
  for (const DesignParams& p : designs) built.emplace_back(p);
  for (const Scenario& s : scenarios) {
    s.validate();
    for (const Design& d : built) {
      if (static_cast<int>(s.true_tox.size()) != d.params().num_doses) {
        throw ConfigError("scenario '" + s.name + "' has " +
                          std::to_string(s.true_tox.size()) +
                          " doses but the design expects " +
                          std::to_string(d.params().num_doses));
      }
    }
  }

  StudyMetrics metrics;
  std::vector<Task> tasks;
  for (const Design& d : built) {
    for (const Scenario& s : scenarios) {
      CellMetrics cell;
      cell.design = d.params().design_label();
      cell.scenario = s.name;
      cell.true_mtd = s.true_mtd;
      cell.sample_size = d.params().sample_size;
      cell.replicates = config.replicates;
      cell.master_seed = config.master_seed;
      cell.selected.assign(d.params().num_doses, 0);
      cell.patients.assign(d.params().num_doses, 0);
      const std::size_t index = metrics.cells.size();
      metrics.cells.push_back(std::move(cell));
      for (std::uint64_t b = 0; b < config.replicates; b += kChunk) {
        tasks.push_back({index, b, std::min(b + kChunk, config.replicates)});
      }
    }
  }

  unsigned workers = config.parallelism;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(tasks.size(), 1)));

  std::atomic<std::size_t> next{0};
  std::mutex merge_mutex;
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Task& task = tasks[t];
      const std::size_t di = task.cell / scenarios.size();
      const std::size_t si = task.cell % scenarios.size();
      try {
        Partial part = run_chunk(built[di], scenarios[si], config.master_seed,
                                 task.begin, task.end);
        std::lock_guard lock(merge_mutex);
        CellMetrics& cell = metrics.cells[task.cell];
        for (std::size_t k = 0; k < part.selected.size(); ++k) {
          cell.selected[k] += part.selected[k];
          cell.patients[k] += part.patients[k];
        }
        cell.no_mtd += part.no_mtd;
      } catch (...) {
        std::lock_guard lock(merge_mutex);
        if (!failure) failure = std::current_exception();
        next.store(tasks.size());
        return;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return metrics;
}

std::vector<DesignParams> reference_designs(const DesignParams& base) {
  std::vector<DesignParams> out;
  for (Family f : {Family::Boin, Family::Keyboard}) {
    DesignParams p = base;
    p.family = f;
    p.policy.reset();
    out.push_back(p);
    for (const PolicyKind& k :
         {PolicyKind::thompson(), PolicyKind::thompson_eps(0.05),
          PolicyKind::greedy(), PolicyKind::median()}) {
      p.policy = k;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<SweepRow> epsilon_sweep(const std::vector<double>& eps_values,
                                    const std::vector<Family>& families,
                                    const DesignParams& base,
                                    const std::vector<Scenario>& scenarios,
                                    const StudyConfig& config) {
  std::vector<DesignParams> designs;
  for (Family f : families) {
    for (double eps : eps_values) {
      DesignParams p = base;
      p.family = f;
      p.policy = PolicyKind::thompson_eps(eps);
      designs.push_back(p);
    }
  }
  const StudyMetrics metrics = run_study(designs, scenarios, config);
  std::vector<SweepRow> rows;
  for (const DesignParams& p : designs) {
    SweepRow row;
    row.design = p.design_label();
    row.epsilon = p.policy->epsilon;
    for (const Scenario& s : scenarios) {
      row.pcmi.push_back(metrics.at(row.design, s.name).pcmi());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dosefind
