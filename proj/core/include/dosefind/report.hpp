#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dosefind/scenarios.hpp"
#include "dosefind/study.hpp"

namespace dosefind {

enum class ReportFormat { Csv, Json, TableText, PlotData };

/// Parses "csv", "json", "table-text" / "table", "plot-data" / "plot".
ReportFormat parse_report_format(const std::string& name);

/// Table label for a design label: "boin-ts-eps:0.05" -> "BOIN-TS5%".
std::string display_name(const std::string& design_label);

/// Detail rows (design, scenario, dose, selection_pct, avg_patients,
/// selected_count, patient_count) followed by per-cell summary rows whose
/// dose column names the metric: pcmi, pct_no_mtd, replicates, master_seed,
/// true_mtd, sample_size.
void write_csv(std::ostream& out, const StudyMetrics& metrics);

/// Reconstructs metrics from write_csv output using the integer columns.
StudyMetrics read_csv(std::istream& in);

void write_json(std::ostream& out, const StudyMetrics& metrics);

/// Two-block table per scenario (selection % | patients treated), one row
/// per design, in the layout of a dose-finding operating-characteristics
/// table.
void write_table_text(std::ostream& out, const StudyMetrics& metrics,
                      const std::vector<Scenario>& scenarios);

/// Grouped-bar input: scenario, design, pcmi.
void write_plot_data(std::ostream& out, const StudyMetrics& metrics);

/// Writes one file per format into `dir` (created if needed) and returns the
/// paths written. Throws std::runtime_error on I/O failure.
std::vector<std::filesystem::path> emit_report(
    const StudyMetrics& metrics, const std::vector<Scenario>& scenarios,
    const std::filesystem::path& dir, const std::vector<ReportFormat>& formats);

/// Supplemental epsilon-sweep table as CSV: design, epsilon, then one PCMI
/// column per scenario.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::vector<Scenario>& scenarios);

}  // namespace dosefind
