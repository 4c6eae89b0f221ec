// Runs the conditioning chain one stage at a time on a simulated radargram
// and plots a single trace after each stage. Writes stages.svg.

#include <iostream>

#include "gprloc/eval/svg.hpp"
#include "gprloc/signal/filters.hpp"
#include "gprloc/sim/scene.hpp"
#include "gprloc/sim/sequence.hpp"

using namespace gprloc;

int main() {
  ScatterScene scene;
  scene.noise_sigma = 1.0;
  scene.wow_coefficients = {4.0, -0.05, 0.0005, -0.0000015};
  scene.scatterers = {{3.0, 0.5, 9.0, 0.0}, {6.0, 1.0, 12.0, 0.0}};

  MotionProfile motion;
  motion.waypoints = {{0.0, 0.0, 0.0, 0.0, false, -1.0}, {60.0, 9.0, 0.0, 0.0, false, -1.0}};

  const SimSequence sim = generate_sequence(scene, motion, 3);
  FilterConfig cfg;
  const BScan raw(preprocess_traces(sim.traces, cfg));
  std::cout << "stacked " << sim.traces.size() << " raw traces into " << raw.cols() << "\n";

  SvgPlot plot("Conditioning stages, middle trace", "sample index", "amplitude [mV]");
  std::vector<double> idx(static_cast<std::size_t>(raw.rows()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);

  Eigen::MatrixXd scan = raw.matrix();
  const auto mid = scan.cols() / 2;
  const auto add = [&](const std::string& name) {
    std::vector<double> ys(idx.size());
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = scan(static_cast<Eigen::Index>(i), mid);
    plot.add_series(name, idx, ys);
  };
  add("stacked");
  for (const FilterStage stage : cfg.order) {
    scan = apply_filter_stage(scan, stage, cfg);
    add(to_string(stage));
  }
  plot.write("stages.svg");
  std::cout << "wrote stages.svg\n";
  return 0;
}
