#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gprloc/core/sensors.hpp"
#include "gprloc/core/trace.hpp"
#include "gprloc/io/csv.hpp"
#include "gprloc/io/keyval.hpp"
#include "gprloc/sim/sequence.hpp"

namespace gprloc {

// On-disk layout of one drive: gpr.csv, encoders.csv, imu.csv, truth.csv
// and a manifest.txt carrying units and rig geometry.
struct SequenceData {
  std::vector<Trace> traces;
  std::vector<EncoderSample> encoders;
  std::vector<ImuSample> imu;
  std::vector<Pose> truth;
  KeyValDoc manifest;
};

inline void write_sequence_dir(const std::string& dir, const SequenceData& seq) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    std::vector<std::string> header = {"timestamp"};
    const auto samples = seq.traces.empty() ? 0 : seq.traces.front().samples.size();
    for (Eigen::Index i = 0; i < samples; ++i) header.push_back("a" + format_int(i));
    CsvWriter w(dir + "/gpr.csv", header);
    std::vector<double> row(static_cast<std::size_t>(samples) + 1);
    for (const auto& t : seq.traces) {
      row[0] = t.timestamp;
      for (Eigen::Index i = 0; i < samples; ++i) row[static_cast<std::size_t>(i) + 1] = t.samples[i];
      w.row(row);
    }
  }
  {
    CsvWriter w(dir + "/encoders.csv",
                {"timestamp", "front_left", "front_right", "rear_left", "rear_right"});
    for (const auto& e : seq.encoders)
      w.raw_row({format_double(e.timestamp), format_int(e.front_left), format_int(e.front_right),
                 format_int(e.rear_left), format_int(e.rear_right)});
  }
  {
    CsvWriter w(dir + "/imu.csv", {"timestamp", "yaw", "yaw_rate", "accel_x", "accel_y"});
    for (const auto& s : seq.imu) w.row({s.timestamp, s.yaw, s.yaw_rate, s.accel_x, s.accel_y});
  }
  {
    CsvWriter w(dir + "/truth.csv", {"timestamp", "x", "y", "yaw"});
    for (const auto& p : seq.truth) w.row({p.timestamp, p.x, p.y, p.yaw});
  }
  seq.manifest.save(dir + "/manifest.txt");
}

inline KeyValDoc make_manifest(const ScatterScene& scene, const MotionProfile& profile,
                               std::uint64_t seed) {
  KeyValDoc doc;
  doc.root["source"] = "simulated";
  doc.root["seed"] = format_int(static_cast<std::int64_t>(seed));
  doc.root["amplitude_unit"] = "mV";
  doc.root["time_unit"] = "s";
  doc.root["position_unit"] = "m";
  doc.root["trace_samples"] = format_int(scene.trace_samples);
  doc.root["sample_dt_ns"] = format_double(scene.sample_dt_ns);
  doc.root["gpr_rate_hz"] = format_double(profile.gpr_rate_hz);
  doc.root["encoder_rate_hz"] = format_double(profile.encoder_rate_hz);
  doc.root["imu_rate_hz"] = format_double(profile.imu_rate_hz);
  doc.root["encoder_ticks_per_meter"] = format_double(profile.encoder_ticks_per_meter);
  doc.root["wheel_separation_m"] = format_double(profile.wheel_separation_m);
  doc.root["wheel_radius_m"] = format_double(profile.wheel_radius_m);
  // Simulated traces arrive one per radar tick, already unstacked.
  doc.root["stack_size"] = "1";
  return doc;
}

inline SequenceData to_sequence_data(const SimSequence& sim, KeyValDoc manifest) {
  SequenceData d;
  d.traces = sim.traces;
  d.encoders = sim.encoders;
  d.imu = sim.imu;
  d.truth = sim.truth;
  d.manifest = std::move(manifest);
  return d;
}

inline SequenceData read_sequence_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("not a sequence directory: " + dir);
  SequenceData d;
  d.manifest = KeyValDoc::load(dir + "/manifest.txt");

  {
    auto t = read_csv(dir + "/gpr.csv");
    if (t.header.empty() || t.header[0] != "timestamp")
      throw InputError(dir + "/gpr.csv: first column must be timestamp");
    const auto samples = static_cast<Eigen::Index>(t.header.size()) - 1;
    if (samples < 1) throw InputError(dir + "/gpr.csv: no amplitude columns");
    double prev = -1e300;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Trace tr;
      tr.timestamp = t.num(r, 0);
      if (tr.timestamp < prev) throw InputError(dir + "/gpr.csv: timestamps decrease");
      prev = tr.timestamp;
      tr.samples.resize(samples);
      for (Eigen::Index i = 0; i < samples; ++i) tr.samples[i] = t.num(r, static_cast<int>(i) + 1);
      d.traces.push_back(std::move(tr));
    }
  }
  {
    auto t = read_csv(dir + "/encoders.csv");
    const int ts = t.column("timestamp");
    const int fl = t.column("front_left");
    const int fr = t.column("front_right");
    const int rl = t.column("rear_left");
    const int rr = t.column("rear_right");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      EncoderSample e;
      e.timestamp = t.num(r, ts);
      e.front_left = static_cast<std::int64_t>(t.num(r, fl));
      e.front_right = static_cast<std::int64_t>(t.num(r, fr));
      e.rear_left = static_cast<std::int64_t>(t.num(r, rl));
      e.rear_right = static_cast<std::int64_t>(t.num(r, rr));
      d.encoders.push_back(e);
    }
  }
  {
    auto t = read_csv(dir + "/imu.csv");
    const int ts = t.column("timestamp");
    const int yaw = t.column("yaw");
    const int rate = t.column("yaw_rate");
    const int ax = t.column("accel_x");
    const int ay = t.column("accel_y");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      ImuSample s;
      s.timestamp = t.num(r, ts);
      s.yaw = t.num(r, yaw);
      s.yaw_rate = t.num(r, rate);
      s.accel_x = t.num(r, ax);
      s.accel_y = t.num(r, ay);
      d.imu.push_back(s);
    }
  }
  {
    auto t = read_csv(dir + "/truth.csv");
    const int ts = t.column("timestamp");
    const int x = t.column("x");
    const int y = t.column("y");
    const int yaw = t.column("yaw");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      Pose p;
      p.timestamp = t.num(r, ts);
      p.x = t.num(r, x);
      p.y = t.num(r, y);
      p.yaw = t.num(r, yaw);
      d.truth.push_back(p);
    }
  }
  return d;
}

}  // namespace gprloc
