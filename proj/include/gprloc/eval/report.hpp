#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gprloc/eval/metrics.hpp"
#include "gprloc/eval/svg.hpp"
#include "gprloc/io/csv.hpp"

namespace gprloc {

struct MethodSteps {
  std::string name;
  StepEstimates est;
};

struct NamedTrajectory {
  std::string name;
  std::vector<Pose> traj;
};

struct ReportInput {
  std::vector<double> truth_steps;            // per-step displacement, meters
  std::vector<MethodSteps> methods;           // per-step estimators to compare
  std::vector<Pose> truth_traj;               // empty -> trajectory section skipped
  std::vector<NamedTrajectory> trajectories;
};

// Side-by-side comparison tables and plots for one drive.
inline void compare_report(const ReportInput& in, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    CsvWriter w(out_dir + "/metrics.csv", {"method", "rmse_mm", "covered_steps", "total_steps"});
    for (const auto& m : in.methods) {
      std::size_t covered = 0;
      for (auto c : m.est.covered) covered += c;
      w.raw_row({m.name, format_double(rmse_mm(in.truth_steps, m.est)),
                 format_int(static_cast<std::int64_t>(covered)),
                 format_int(static_cast<std::int64_t>(in.truth_steps.size()))});
    }
  }

  {
    SvgPlot plot("Per-step displacement", "step", "displacement [m]");
    std::vector<double> idx(in.truth_steps.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
    plot.add_series("truth", idx, in.truth_steps);
    for (const auto& m : in.methods) {
      std::vector<double> x, y;
      for (std::size_t i = 0; i < m.est.value.size(); ++i) {
        if (!m.est.covered[i]) continue;
        x.push_back(static_cast<double>(i));
        y.push_back(m.est.value[i]);
      }
      plot.add_series(m.name, x, y);
    }
    plot.write(out_dir + "/steps.svg");
  }

  if (!in.truth_traj.empty() && !in.trajectories.empty()) {
    CsvWriter w(out_dir + "/ate.csv", {"trajectory", "ate_m", "ate_unaligned_m"});
    SvgPlot plot("Trajectories", "x [m]", "y [m]");
    {
      std::vector<double> x, y;
      for (const auto& p : in.truth_traj) {
        x.push_back(p.x);
        y.push_back(p.y);
      }
      plot.add_series("truth", x, y);
    }
    for (const auto& t : in.trajectories) {
      w.raw_row({t.name, format_double(rmse_ate(in.truth_traj, t.traj)),
                 format_double(rmse_ate(in.truth_traj, t.traj, AteAlignment::none))});
      std::vector<double> x, y;
      for (const auto& p : t.traj) {
        x.push_back(p.x);
        y.push_back(p.y);
      }
      plot.add_series(t.name, x, y);
    }
    plot.write(out_dir + "/traj.svg");
  }
}

}  // namespace gprloc
