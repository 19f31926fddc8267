#include "opticoord/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace opticoord {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

struct Series {
  std::string label;
  std::vector<double> values;
};

// Minimal line chart: autoscaled axes, one polyline per series, a text
// legend, and an optional dashed horizontal reference line.
void write_chart_svg(const std::string& path, const std::string& title,
                     const std::vector<double>& t, const std::vector<Series>& series,
                     const double* y_ref) {
  constexpr int kWidth = 960, kHeight = 540;
  constexpr double kLeft = 70, kRight = 30, kTop = 50, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  if (t.empty() || series.empty()) {
    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\"><text x=\"20\" y=\"30\">no data</text></svg>\n";
    finish(out, path);
    return;
  }

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Series& s : series) {
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (y_ref) {
    lo = std::min(lo, *y_ref);
    hi = std::max(hi, *y_ref);
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double t0 = t.front(), t1 = t.back() > t.front() ? t.back() : t.front() + 1.0;

  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double tv) { return kLeft + (tv - t0) / (t1 - t0) * plot_w; };
  auto sy = [&](double v) { return kTop + (hi - v) / (hi - lo) * plot_h; };

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
      << "font-family=\"sans-serif\">" << title << "</text>\n";

  // Axes with end labels.
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"" << kHeight - 16
      << "\" font-size=\"12\" font-family=\"sans-serif\">" << num(t0) << "</text>\n"
      << "<text x=\"" << kLeft + plot_w << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">t = " << num(t1)
      << "</text>\n"
      << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(lo + pad) + 4
      << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << num(lo + pad)
      << "</text>\n"
      << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(hi - pad) + 4
      << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << num(hi - pad)
      << "</text>\n";

  if (y_ref) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << sy(*y_ref) << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << sy(*y_ref)
        << "\" stroke=\"#444\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % (sizeof kColors / sizeof kColors[0])];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    // Cap the polyline length; charts do not need more points than pixels.
    const std::size_t n = series[s].values.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    for (std::size_t k = 0; k < n; k += stride) {
      out << sx(t[k]) << "," << sy(series[s].values[k]) << " ";
    }
    if ((n - 1) % stride != 0) out << sx(t[n - 1]) << "," << sy(series[s].values[n - 1]);
    out << "\"/>\n";
    out << "<text x=\"" << kLeft + plot_w - 8 << "\" y=\"" << kTop + 16 + 16 * s
        << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << color
        << "\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
  finish(out, path);
}

}  // namespace

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  const int n = traj.records.empty() ? 0 : static_cast<int>(traj.records.front().agents.size());
  out << "t";
  for (int i = 1; i <= n; ++i) {
    out << ",y_" << i << ",r_" << i << ",coord_err_" << i << ",track_err_" << i << ",nn_err_" << i
        << ",eid_" << i << ",theta_" << i << ",W_fro_" << i;
  }
  out << "\n";
  for (const MetricRecord& rec : traj.records) {
    out << num(rec.t);
    for (const AgentMetrics& a : rec.agents) {
      out << "," << num(a.y) << "," << num(a.r) << "," << num(a.coord_err) << ","
          << num(a.track_err) << "," << num(a.nn_err) << "," << num(a.e_id) << "," << num(a.theta)
          << "," << num(a.w_fro);
    }
    out << "\n";
  }
  finish(out, path);
}

void write_generator_csv(const std::string& path, const GeneratorRun& run, int n_agents, int q) {
  std::ofstream out = open_out(path);
  const bool with_distance = !run.distance_to_ystar.empty();
  auto block_headers = [&](const char* prefix) {
    for (int i = 1; i <= n_agents; ++i) {
      for (int c = 1; c <= q; ++c) {
        out << "," << prefix << "_" << i;
        if (q > 1) out << "_" << c;
      }
    }
  };
  out << "t";
  block_headers("r");
  block_headers("v");
  out << ",consensus_residual";
  if (with_distance) out << ",distance_to_ystar";
  out << "\n";

  for (std::size_t k = 0; k < run.times.size(); ++k) {
    out << num(run.times[k]);
    for (Eigen::Index j = 0; j < run.r_snapshots[k].size(); ++j) {
      out << "," << num(run.r_snapshots[k][j]);
    }
    for (Eigen::Index j = 0; j < run.v_snapshots[k].size(); ++j) {
      out << "," << num(run.v_snapshots[k][j]);
    }
    out << "," << num(run.consensus[k]);
    if (with_distance) out << "," << num(run.distance_to_ystar[k]);
    out << "\n";
  }
  finish(out, path);
}

namespace {

void write_pairs(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : pairs) out << key << " = " << value << "\n";
  finish(out, path);
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string vec_fixed6(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += " ";
    s += fixed6(v[i]);
  }
  return s;
}

}  // namespace

void write_run_summary(const std::string& path, const Scenario& scenario,
                       const ClosedLoopSystem& system, const Trajectory& traj) {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.emplace_back("name", scenario.name());
  pairs.emplace_back("config_hash", hash_hex(scenario.config_hash()));
  pairs.emplace_back("n_agents", std::to_string(scenario.n_agents()));
  pairs.emplace_back("y_star", vec_fixed6(system.y_star()));
  pairs.emplace_back("oracle_kkt_residual", num(system.oracle_result().kkt_residual));
  pairs.emplace_back("oracle_iterations", std::to_string(system.oracle_result().iterations));
  pairs.emplace_back("dt", num(traj.dt));
  pairs.emplace_back("t_end", num(traj.t_end));
  pairs.emplace_back("record_every", std::to_string(traj.record_every));
  pairs.emplace_back("rows", std::to_string(traj.records.size()));
  pairs.emplace_back("runtime_seconds", num(traj.runtime_seconds));

  // Sup-norms over the last fifth of the run: the settled behavior.
  pairs.emplace_back("terminal_max_coord_err",
                     num(traj.terminal_sup(0.2, &MetricRecord::max_coord_err)));
  pairs.emplace_back("terminal_max_track_err",
                     num(traj.terminal_sup(0.2, &MetricRecord::max_track_err)));
  pairs.emplace_back("terminal_max_eid", num(traj.terminal_sup(0.2, &MetricRecord::max_abs_e_id)));
  pairs.emplace_back("terminal_max_nn_err",
                     num(traj.terminal_sup(0.2, &MetricRecord::max_abs_nn_err)));
  pairs.emplace_back("max_state_inf_norm",
                     num(traj.terminal_sup(1.0, &MetricRecord::max_state_inf)));
  if (!traj.records.empty()) {
    pairs.emplace_back("final_consensus_residual", num(traj.records.back().consensus));
    const MetricRecord& last = traj.records.back();
    for (std::size_t i = 0; i < last.agents.size(); ++i) {
      pairs.emplace_back("agent_" + std::to_string(i + 1) + "_y_final", num(last.agents[i].y));
    }
  }
  write_pairs(path, pairs);
}

void write_generator_summary(const std::string& path, const Scenario& scenario,
                             const GeneratorRun& run, const Eigen::VectorXd& y_star,
                             double kkt_residual) {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.emplace_back("name", scenario.name());
  pairs.emplace_back("config_hash", hash_hex(scenario.config_hash()));
  pairs.emplace_back("y_star", vec_fixed6(y_star));
  pairs.emplace_back("oracle_kkt_residual", num(kkt_residual));
  pairs.emplace_back("rows", std::to_string(run.times.size()));
  pairs.emplace_back("terminal_consensus_residual", num(run.terminal_consensus()));
  if (!run.distance_to_ystar.empty()) {
    pairs.emplace_back("terminal_distance_to_ystar", num(run.distance_to_ystar.back()));
  }
  write_pairs(path, pairs);
}

void write_config_echo(const std::string& path, const Scenario& scenario) {
  std::ofstream out = open_out(path);
  out << scenario.to_json().dump(2) << "\n";
  finish(out, path);
}

void write_outputs_svg(const std::string& path, const ClosedLoopSystem& system,
                       const Trajectory& traj) {
  std::vector<double> t;
  t.reserve(traj.records.size());
  std::vector<Series> series(traj.records.empty() ? 0 : traj.records.front().agents.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    series[i].label = "y_" + std::to_string(i + 1);
    series[i].values.reserve(traj.records.size());
  }
  for (const MetricRecord& rec : traj.records) {
    t.push_back(rec.t);
    for (std::size_t i = 0; i < series.size(); ++i) series[i].values.push_back(rec.agents[i].y);
  }
  const double y_ref = system.y_star().size() == 1 ? system.y_star()[0] : 0.0;
  write_chart_svg(path, "agent outputs", t, series,
                  system.y_star().size() == 1 ? &y_ref : nullptr);
}

void write_eid_svg(const std::string& path, const Trajectory& traj) {
  std::vector<double> t;
  t.reserve(traj.records.size());
  std::vector<Series> series(traj.records.empty() ? 0 : traj.records.front().agents.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    series[i].label = "eid_" + std::to_string(i + 1);
    series[i].values.reserve(traj.records.size());
  }
  for (const MetricRecord& rec : traj.records) {
    t.push_back(rec.t);
    for (std::size_t i = 0; i < series.size(); ++i) {
      series[i].values.push_back(rec.agents[i].e_id);
    }
  }
  write_chart_svg(path, "internal-model errors", t, series, nullptr);
}

}  // namespace opticoord
