#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dosefind/scenarios.hpp"
#include "dosefind/trial.hpp"

namespace dosefind {

/// Aggregated operating characteristics of one design on one scenario.
/// Stored as integer counts; percentages and means are derived on demand.
struct CellMetrics {
  std::string design;
  std::string scenario;
  int true_mtd = 1;
  int sample_size = 0;
  std::uint64_t replicates = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> selected;  // runs selecting each dose as MTD
  std::vector<std::uint64_t> patients;  // patients treated at each dose
  std::uint64_t no_mtd = 0;             // runs stopped for toxicity

  double pcmi() const;
  double selection_pct(int dose) const;
  double avg_patients(int dose) const;
  double pct_no_mtd() const;
  /// Sum of all patients treated, over all replicates.
  std::uint64_t total_patients() const;

  friend bool operator==(const CellMetrics&, const CellMetrics&) = default;
};

struct StudyMetrics {
  std::vector<CellMetrics> cells;  // design-major, scenario-minor order

  /// Throws std::out_of_range if absent.
  const CellMetrics& at(const std::string& design,
                        const std::string& scenario) const;

  friend bool operator==(const StudyMetrics&, const StudyMetrics&) = default;
};

struct StudyConfig {
  std::uint64_t replicates = 10000;
  std::uint64_t master_seed = 20240101;
  unsigned parallelism = 0;  // 0: hardware concurrency
};

/// Monte Carlo study. Replicate r of (design d, scenario s) draws from
/// RngStream(master_seed, replicate_stream_id(label(d), name(s), r)), and
/// aggregation is integer counting, so the result does not depend on
/// parallelism.
StudyMetrics run_study(const std::vector<DesignParams>& designs,
                       const std::vector<Scenario>& scenarios,
                       const StudyConfig& config);

/// One row of an epsilon sweep: a TS-eps design and its PCMI per scenario.
struct SweepRow {
  std::string design;
  double epsilon = 0.0;
  std::vector<double> pcmi;  // aligned with the scenario list
};

/// Runs TS-eps for every epsilon on each base family in `families`.
std::vector<SweepRow> epsilon_sweep(const std::vector<double>& eps_values,
                                    const std::vector<Family>& families,
                                    const DesignParams& base,
                                    const std::vector<Scenario>& scenarios,
                                    const StudyConfig& config);

/// The ten reference designs: BOIN and Keyboard, each with the baseline rule
/// and the TS, TS-eps(0.05), greedy and median policies.
std::vector<DesignParams> reference_designs(const DesignParams& base);

}  // namespace dosefind
