#include "dosefind/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dosefind/trial.hpp"
#include "json.hpp"

namespace dosefind {

namespace {

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::runtime_error("bad integer '" + s + "'");
  return v;
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "table-text" || name == "table") return ReportFormat::TableText;
  if (name == "plot-data" || name == "plot") return ReportFormat::PlotData;
  throw ConfigError("unknown report format '" + name + "'");
}

std::string display_name(const std::string& design_label) {
  std::string out;
  std::string rest;
  if (design_label.rfind("keyboard", 0) == 0) {
    out = "Keyboard";
    rest = design_label.substr(8);
  } else if (design_label.rfind("boin", 0) == 0) {
    out = "BOIN";
    rest = design_label.substr(4);
  } else {
    return design_label;
  }
  if (rest.empty()) return out;
  if (rest == "-ts") return out + "-TS";
  if (rest == "-greedy") return out + "-G";
  if (rest == "-median") return out + "-M";
  if (rest.rfind("-ts-eps:", 0) == 0) {
    const double eps = std::stod(rest.substr(8));
    char buf[32];
    std::snprintf(buf, sizeof buf, "-TS%g%%", eps * 100.0);
    return out + buf;
  }
  return design_label;
}

void write_csv(std::ostream& out, const StudyMetrics& metrics) {
  out << "design,scenario,dose,selection_pct,avg_patients,selected_count,"
         "patient_count\n";
  for (const CellMetrics& c : metrics.cells) {
    for (std::size_t k = 0; k < c.selected.size(); ++k) {
      const int dose = static_cast<int>(k) + 1;
      out << c.design << ',' << c.scenario << ',' << dose << ','
          << fixed1(c.selection_pct(dose)) << ','
          << fixed1(c.avg_patients(dose)) << ',' << c.selected[k] << ','
          << c.patients[k] << '\n';
    }
  }
  for (const CellMetrics& c : metrics.cells) {
    const std::string head = c.design + ',' + c.scenario + ',';
    out << head << "pcmi," << fixed1(c.pcmi()) << ",,"
        << c.selected.at(c.true_mtd - 1) << ",\n";
    out << head << "pct_no_mtd," << fixed1(c.pct_no_mtd()) << ",," << c.no_mtd
        << ",\n";
    out << head << "replicates,,," << c.replicates << ",\n";
    out << head << "master_seed,,," << c.master_seed << ",\n";
    out << head << "true_mtd,,," << c.true_mtd << ",\n";
    out << head << "sample_size,,," << c.sample_size << ",\n";
  }
}

StudyMetrics read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  StudyMetrics metrics;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  auto cell_for = [&](const std::string& d, const std::string& s) -> CellMetrics& {
    auto [it, inserted] = index.try_emplace({d, s}, metrics.cells.size());
    if (inserted) {
      CellMetrics c;
      c.design = d;
      c.scenario = s;
      metrics.cells.push_back(std::move(c));
    }
    return metrics.cells[it->second];
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw std::runtime_error("bad CSV row: " + line);
    CellMetrics& c = cell_for(f[0], f[1]);
    const std::string& kind = f[2];
    if (!kind.empty() && std::isdigit(static_cast<unsigned char>(kind[0]))) {
      const std::size_t k = to_u64(kind) - 1;
      if (c.selected.size() <= k) {
        c.selected.resize(k + 1, 0);
        c.patients.resize(k + 1, 0);
      }
      c.selected[k] = to_u64(f[5]);
      c.patients[k] = to_u64(f[6]);
    } else if (kind == "pct_no_mtd") {
      c.no_mtd = to_u64(f[5]);
    } else if (kind == "replicates") {
      c.replicates = to_u64(f[5]);
    } else if (kind == "master_seed") {
      c.master_seed = to_u64(f[5]);
    } else if (kind == "true_mtd") {
      c.true_mtd = static_cast<int>(to_u64(f[5]));
    } else if (kind == "sample_size") {
      c.sample_size = static_cast<int>(to_u64(f[5]));
    } else if (kind != "pcmi") {
      throw std::runtime_error("unknown CSV row kind '" + kind + "'");
    }
  }
  return metrics;
}

void write_json(std::ostream& out, const StudyMetrics& metrics) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellMetrics& c : metrics.cells) {
    nlohmann::json sel = nlohmann::json::array();
    nlohmann::json pat = nlohmann::json::array();
    for (std::size_t k = 0; k < c.selected.size(); ++k) {
      sel.push_back(c.selection_pct(static_cast<int>(k) + 1));
      pat.push_back(c.avg_patients(static_cast<int>(k) + 1));
    }
    cells.push_back({{"design", c.design},
                     {"display_name", display_name(c.design)},
                     {"scenario", c.scenario},
                     {"true_mtd", c.true_mtd},
                     {"sample_size", c.sample_size},
                     {"replicates", c.replicates},
                     {"master_seed", c.master_seed},
                     {"pcmi", c.pcmi()},
                     {"pct_no_mtd", c.pct_no_mtd()},
                     {"selection_pct", sel},
                     {"avg_patients", pat},
                     {"selected_count", c.selected},
                     {"patient_count", c.patients},
                     {"no_mtd_count", c.no_mtd}});
  }
  out << nlohmann::json{{"cells", cells}}.dump(2) << '\n';
}

void write_table_text(std::ostream& out, const StudyMetrics& metrics,
                      const std::vector<Scenario>& scenarios) {
  std::vector<std::string> designs;
  for (const CellMetrics& c : metrics.cells) {
    if (std::find(designs.begin(), designs.end(), c.design) == designs.end()) {
      designs.push_back(c.design);
    }
  }
  char buf[64];
  for (std::size_t si = 0; si < scenarios.size(); ++si) {
    const Scenario& s = scenarios[si];
    const int K = static_cast<int>(s.true_tox.size());
    std::string tox_row;
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < K; ++k) {
        const bool mtd = k + 1 == s.true_mtd;
        std::snprintf(buf, sizeof buf, mtd ? " %5s*" : " %6s",
                      fixed1(100.0 * s.true_tox[k]).c_str());
        tox_row += buf;
      }
      if (pass == 0) tox_row += " |";
    }
    std::snprintf(buf, sizeof buf, "%-16s", ("Scenario " + std::to_string(si + 1)).c_str());
    out << buf << "  %MTD identification" << std::string(K * 7 - 20, ' ')
        << "   #patients treated\n";
    std::snprintf(buf, sizeof buf, "%-16s", "(%Tox)");
    out << buf << tox_row << '\n';
    for (const std::string& d : designs) {
      const CellMetrics* cell = nullptr;
      for (const CellMetrics& c : metrics.cells) {
        if (c.design == d && c.scenario == s.name) cell = &c;
      }
      if (!cell) continue;
      std::snprintf(buf, sizeof buf, "%-16s", display_name(d).c_str());
      out << buf;
      for (int k = 1; k <= K; ++k) {
        std::snprintf(buf, sizeof buf, " %6s", fixed1(cell->selection_pct(k)).c_str());
        out << buf;
      }
      out << " |";
      for (int k = 1; k <= K; ++k) {
        std::snprintf(buf, sizeof buf, " %6s", fixed1(cell->avg_patients(k)).c_str());
        out << buf;
      }
      if (cell->no_mtd > 0) out << "   (no MTD " << fixed1(cell->pct_no_mtd()) << "%)";
      out << '\n';
    }
    out << '\n';
  }
}

void write_plot_data(std::ostream& out, const StudyMetrics& metrics) {
  out << "scenario,design,display_name,pcmi\n";
  std::vector<std::string> order;
  for (const CellMetrics& c : metrics.cells) {
    if (std::find(order.begin(), order.end(), c.scenario) == order.end()) {
      order.push_back(c.scenario);
    }
  }
  for (const std::string& s : order) {
    for (const CellMetrics& c : metrics.cells) {
      if (c.scenario != s) continue;
      out << c.scenario << ',' << c.design << ',' << display_name(c.design)
          << ',' << fixed1(c.pcmi()) << '\n';
    }
  }
}

std::vector<std::filesystem::path> emit_report(
    const StudyMetrics& metrics, const std::vector<Scenario>& scenarios,
    const std::filesystem::path& dir, const std::vector<ReportFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  for (ReportFormat f : formats) {
    std::filesystem::path path = dir;
    switch (f) {
      case ReportFormat::Csv:
        path /= "metrics.csv";
        break;
      case ReportFormat::Json:
        path /= "metrics.json";
        break;
      case ReportFormat::TableText:
        path /= "table.txt";
        break;
      case ReportFormat::PlotData:
        path /= "plot_data.csv";
        break;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    switch (f) {
      case ReportFormat::Csv:
        write_csv(out, metrics);
        break;
      case ReportFormat::Json:
        write_json(out, metrics);
        break;
      case ReportFormat::TableText:
        write_table_text(out, metrics, scenarios);
        break;
      case ReportFormat::PlotData:
        write_plot_data(out, metrics);
        break;
    }
    out.close();
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
    written.push_back(path);
  }
  return written;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::vector<Scenario>& scenarios) {
  out << "design,display_name,epsilon";
  for (const Scenario& s : scenarios) out << ',' << s.name;
  out << '\n';
  for (const SweepRow& r : rows) {
    out << r.design << ',' << display_name(r.design) << ',' << r.epsilon;
    for (double v : r.pcmi) out << ',' << fixed1(v);
    out << '\n';
  }
}

}  // namespace dosefind
