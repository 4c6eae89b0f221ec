#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "gprloc/core/error.hpp"

namespace gprloc {

// One A-scan: amplitudes in millivolts against two-way travel time.
struct Trace {
  Eigen::VectorXd samples;
  double timestamp = 0.0;  // seconds
};

// An ordered window of traces sharing a sample count. Rows index travel
// time, columns index trace, matching the usual radargram layout.
class BScan {
 public:
  BScan() = default;

  explicit BScan(std::vector<Trace> traces) : traces_(std::move(traces)) {
    if (traces_.empty()) throw InputError("BScan: empty trace window");
    const auto n = traces_.front().samples.size();
    for (std::size_t j = 1; j < traces_.size(); ++j) {
      if (traces_[j].samples.size() != n)
        throw InputError("BScan: traces differ in sample count");
      if (!(traces_[j].timestamp > traces_[j - 1].timestamp))
        throw InputError("BScan: timestamps not strictly increasing");
    }
  }

  int rows() const { return static_cast<int>(traces_.front().samples.size()); }
  int cols() const { return static_cast<int>(traces_.size()); }

  const Trace& trace(int j) const { return traces_[static_cast<std::size_t>(j)]; }
  Trace& trace(int j) { return traces_[static_cast<std::size_t>(j)]; }
  const std::vector<Trace>& traces() const { return traces_; }

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(rows(), cols());
    for (int j = 0; j < cols(); ++j) m.col(j) = traces_[static_cast<std::size_t>(j)].samples;
    return m;
  }

  // Replaces amplitudes, keeping per-trace timestamps.
  void set_matrix(const Eigen::MatrixXd& m) {
    if (m.rows() != rows() || m.cols() != cols())
      throw InputError("BScan: matrix shape mismatch");
    for (int j = 0; j < cols(); ++j) traces_[static_cast<std::size_t>(j)].samples = m.col(j);
  }

 private:
  std::vector<Trace> traces_;
};

}  // namespace gprloc
