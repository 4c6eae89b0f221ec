#pragma once

#include <cstdint>

namespace gprloc {

// Cumulative wheel tick counts; front/rear pairs share an axle track.
struct EncoderSample {
  double timestamp = 0.0;
  std::int64_t front_left = 0;
  std::int64_t front_right = 0;
  std::int64_t rear_left = 0;
  std::int64_t rear_right = 0;
};

// Body-frame accelerations; yaw is absolute, wrapped to (-pi, pi].
struct ImuSample {
  double timestamp = 0.0;
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double accel_x = 0.0;
  double accel_y = 0.0;
};

struct Pose {
  double timestamp = 0.0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

}  // namespace gprloc
