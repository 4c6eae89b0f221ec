#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gprloc/eval/report.hpp"
#include "gprloc/fusion/runner.hpp"
#include "gprloc/io/sequence_dir.hpp"
#include "gprloc/model/ablation.hpp"
#include "gprloc/model/checkpoint.hpp"
#include "gprloc/pipeline.hpp"

namespace {

using namespace gprloc;
namespace fs = std::filesystem;

struct GlobalOpts {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  int jobs = 1;
  bool json_errors = false;
};

// One keyval file drives every subcommand; each module reads its section.
struct Configs {
  FilterConfig filter;
  ModelConfig model;
  TrainConfig train;
  EkfConfig ekf;
  std::map<std::string, std::string> ekf_keys;  // raw section, for override detection
};

Configs load_configs(const std::string& path) {
  Configs c;
  if (path.empty()) return c;
  const KeyValDoc doc = KeyValDoc::load(path);
  if (!doc.root.empty())
    throw ConfigError(path + ": top-level keys must live in a [filter], [model], [train], or "
                             "[ekf] section");
  for (const auto& sec : doc.sections) {
    if (sec.name == "filter")
      c.filter = filter_config_from_keyval(sec.values);
    else if (sec.name == "model")
      c.model = model_config_from_keyval(sec.values);
    else if (sec.name == "train")
      c.train = train_config_from_keyval(sec.values);
    else if (sec.name == "ekf") {
      c.ekf = ekf_config_from_keyval(sec.values);
      c.ekf_keys = sec.values;
    } else {
      throw ConfigError(path + ": unknown section [" + sec.name +
                        "] (filter, model, train, ekf)");
    }
  }
  return c;
}

void require_out(const GlobalOpts& g, const std::string& cmd, const std::string& what) {
  if (g.out.empty()) throw InputError(cmd + " needs --out (" + what + ")");
}

// Entries may repeat the flag or pack several paths with commas.
std::vector<std::string> expand_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& entry : raw) {
    std::size_t pos = 0;
    while (pos <= entry.size()) {
      const std::size_t comma = entry.find(',', pos);
      const std::string item =
          entry.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!item.empty()) out.push_back(item);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return out;
}

std::vector<double> parse_value_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : expand_list({s})) out.push_back(parse_double(item, "sweep value"));
  if (out.empty()) throw InputError("--values needs a comma-separated list of numbers");
  return out;
}

// "name=path" with a bare path falling back to the file stem as the name.
std::pair<std::string, std::string> split_named_path(const std::string& spec) {
  const std::size_t eq = spec.find('=');
  if (eq != std::string::npos && eq > 0)
    return {spec.substr(0, eq), spec.substr(eq + 1)};
  return {fs::path(spec).stem().string(), spec};
}

// Already-filtered directories must not be conditioned twice.
FilterConfig effective_filter(const SequenceData& seq, const FilterConfig& requested) {
  return kv_get(seq.manifest.root, "filtered", false) ? passthrough_filter() : requested;
}

// Rig geometry defaults flow from the sequence manifest unless the [ekf]
// section pins them explicitly.
EkfConfig ekf_for_sequence(const Configs& cfgs, const SequenceData& seq) {
  EkfConfig ekf = cfgs.ekf;
  if (!kv_has(cfgs.ekf_keys, "ticks_per_meter"))
    ekf.ticks_per_meter = kv_get(seq.manifest.root, "encoder_ticks_per_meter", ekf.ticks_per_meter);
  if (!kv_has(cfgs.ekf_keys, "wheel_separation_m"))
    ekf.wheel_separation_m = kv_get(seq.manifest.root, "wheel_separation_m", ekf.wheel_separation_m);
  ekf.validate();
  return ekf;
}

void write_predictions_csv(const std::string& path, const WindowSet& ws,
                           const std::vector<double>& values) {
  CsvWriter w(path, {"start", "span", "t_start", "t_end", "value"});
  for (std::size_t i = 0; i < values.size(); ++i)
    w.raw_row({format_int(static_cast<std::int64_t>(ws.records[i].start)),
               format_int(ws.k - 1), format_double(ws.records[i].t_start),
               format_double(ws.records[i].t_end), format_double(values[i])});
}

std::vector<WindowPrediction> read_predictions_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int start = t.column("start");
  const int span = t.column("span");
  const int value = t.column("value");
  std::vector<WindowPrediction> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({static_cast<int>(t.num(r, start)), static_cast<int>(t.num(r, span)),
                   t.num(r, value)});
  return out;
}

void write_trajectory_csv(const std::string& path, const std::vector<Pose>& traj) {
  CsvWriter w(path, {"timestamp", "x", "y", "yaw"});
  for (const auto& p : traj) w.row({p.timestamp, p.x, p.y, p.yaw});
}

std::vector<Pose> read_trajectory_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int ts = t.column("timestamp");
  const int x = t.column("x");
  const int y = t.column("y");
  const int yaw = t.column("yaw");
  std::vector<Pose> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({t.num(r, ts), t.num(r, x), t.num(r, y), t.num(r, yaw)});
  return out;
}

struct LabeledWindows {
  TrainSet set;
  std::size_t sequences = 0;
};

LabeledWindows windows_from_dirs(const std::vector<std::string>& dirs, const FilterConfig& fcfg,
                                 const ModelConfig& mcfg, int stride) {
  if (dirs.empty()) throw InputError("no sequence directories given");
  LabeledWindows out;
  for (const auto& dir : dirs) {
    const SequenceData seq = read_sequence_dir(dir);
    if (seq.truth.size() < 2)
      throw InputError(dir + ": displacement labels need truth.csv with at least 2 poses");
    const PreparedSequence ps = prepare_sequence(seq, effective_filter(seq, fcfg));
    if (ps.scan.rows() != mcfg.input_dim)
      throw InputError(dir + ": " + std::to_string(ps.scan.rows()) +
                       " samples per trace after conditioning, model expects input_dim = " +
                       std::to_string(mcfg.input_dim));
    const WindowSet ws = build_windows(ps, mcfg.window_k, stride);
    const TrainSet part = to_train_set(ws);
    out.set.insert(out.set.end(), part.begin(), part.end());
    ++out.sequences;
  }
  return out;
}

std::vector<double> step_displacements(const PreparedSequence& ps) {
  if (ps.distance.size() < 2) throw InputError("sequence needs truth poses for step labels");
  std::vector<double> steps(ps.distance.size() - 1);
  for (std::size_t i = 0; i + 1 < ps.distance.size(); ++i)
    steps[i] = ps.distance[i + 1] - ps.distance[i];
  return steps;
}

int cmd_simulate(const GlobalOpts& g, const std::string& scene_path,
                 const std::string& motion_path) {
  require_out(g, "simulate", "output sequence directory");
  const ScatterScene scene = load_scene(scene_path);
  const MotionProfile motion = load_motion(motion_path);
  const std::uint64_t seed = g.seed_given ? g.seed : 1;
  const SimSequence sim = generate_sequence(scene, motion, seed);
  write_sequence_dir(g.out, to_sequence_data(sim, make_manifest(scene, motion, seed)));
  std::cout << "simulated " << sim.traces.size() << " traces, " << sim.encoders.size()
            << " encoder samples, " << sim.imu.size() << " imu samples, " << sim.truth.size()
            << " truth poses -> " << g.out << "\n";
  return 0;
}

int cmd_filter(const GlobalOpts& g, const Configs& cfgs, const std::string& in_dir) {
  require_out(g, "filter", "output sequence directory");
  SequenceData seq = read_sequence_dir(in_dir);
  if (kv_get(seq.manifest.root, "filtered", false))
    throw InputError(in_dir + " is already filtered; refusing to condition it twice");
  const FilterConfig& fcfg = cfgs.filter;
  const BScan scan = filter_pipeline(BScan(preprocess_traces(seq.traces, fcfg)), fcfg);
  const std::size_t raw_count = seq.traces.size();
  seq.traces = scan.traces();
  seq.manifest.root["filtered"] = "true";
  const std::int64_t prev_stack = kv_get(seq.manifest.root, "stack_size", std::int64_t{1});
  seq.manifest.root["stack_size"] = format_int(prev_stack * fcfg.stack_size);
  for (const auto& [k, v] : filter_config_to_keyval(fcfg).root)
    seq.manifest.root["filter_" + k] = v;
  write_sequence_dir(g.out, seq);
  std::cout << "conditioned " << raw_count << " raw traces into " << seq.traces.size()
            << " stacked traces -> " << g.out << "\n";
  return 0;
}

int cmd_train(const GlobalOpts& g, const Configs& cfgs, const std::vector<std::string>& train_dirs,
              const std::vector<std::string>& val_dirs) {
  require_out(g, "train", "output directory for checkpoint and loss log");
  ModelConfig mcfg = cfgs.model;
  if (g.seed_given) mcfg.seed = g.seed;
  const LabeledWindows train_w = windows_from_dirs(train_dirs, cfgs.filter, mcfg, 1);
  const LabeledWindows val_w = windows_from_dirs(val_dirs, cfgs.filter, mcfg, 1);
  std::cout << "training on " << train_w.set.size() << " windows from " << train_w.sequences
            << " sequences, validating on " << val_w.set.size() << " windows from "
            << val_w.sequences << "\n";
  fs::create_directories(g.out);
  const TrainResult res = train(train_w.set, val_w.set, mcfg, cfgs.train, &std::cout);
  save_checkpoint(res.best, g.out + "/model.ckpt");
  write_history(res.history, g.out + "/loss.csv");
  std::cout << "best epoch " << res.best_epoch << " (val mse "
            << format_double(res.history[static_cast<std::size_t>(res.best_epoch)].val_mse)
            << ") -> " << g.out << "/model.ckpt\n";
  return 0;
}

int cmd_infer(const GlobalOpts& g, const Configs& cfgs, const std::string& in_dir,
              const std::string& ckpt_path, int stride) {
  require_out(g, "infer", "predictions CSV path");
  const ModelParams params = load_checkpoint(ckpt_path);
  const SequenceData seq = read_sequence_dir(in_dir);
  const PreparedSequence ps = prepare_sequence(seq, effective_filter(seq, cfgs.filter));
  if (ps.scan.rows() != params.config.input_dim)
    throw InputError(in_dir + ": " + std::to_string(ps.scan.rows()) +
                     " samples per trace after conditioning, checkpoint expects input_dim = " +
                     std::to_string(params.config.input_dim));
  const WindowSet ws = build_windows(ps, params.config.window_k, stride);

  // Timed one window at a time: the per-sample latency is the figure of
  // interest, and it stays out of the output file so reruns are identical.
  // Weights are bound to the session once up front, like any deployed model.
  Predictor pred(params);
  std::vector<double> values;
  values.reserve(ws.inputs.size());
  double total_ms = 0.0;
  for (const auto& w : ws.inputs) {
    const auto t0 = std::chrono::steady_clock::now();
    values.push_back(pred.window(w));
    const auto t1 = std::chrono::steady_clock::now();
    total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  write_predictions_csv(g.out, ws, values);
  std::cout << "predicted " << values.size() << " windows (k=" << params.config.window_k
            << ", stride=" << stride << ") -> " << g.out << "\n";
  std::cout << "mean forward time: "
            << format_double(total_ms / static_cast<double>(values.size())) << " ms/window\n";
  return 0;
}

int cmd_fuse(const GlobalOpts& g, const Configs& cfgs, const std::string& in_dir,
             const std::string& pred_path, bool no_gpr) {
  require_out(g, "fuse", "trajectory CSV path");
  const SequenceData seq = read_sequence_dir(in_dir);
  const EkfConfig ekf = ekf_for_sequence(cfgs, seq);
  SensorLog log;
  log.encoders = seq.encoders;
  log.imu = seq.imu;
  const bool use_gpr = !no_gpr;
  if (use_gpr) {
    if (pred_path.empty())
      throw InputError("fuse needs --pred (window predictions CSV) unless --no-gpr is given");
    const std::vector<WindowPrediction> preds = read_predictions_csv(pred_path);
    const PreparedSequence ps = prepare_sequence(seq, effective_filter(seq, cfgs.filter));
    if (ps.times.size() < 2) throw InputError(in_dir + ": too few traces for GPR steps");
    const StepEstimates est =
        overlap_add(preds, static_cast<int>(ps.times.size()) - 1);
    log.gpr_steps = gpr_steps_from_estimates(est, ps.times);
  }
  const RunResult res = run_filter(log, ekf, use_gpr);
  write_trajectory_csv(g.out, res.trajectory);
  std::cout << "fused " << res.trajectory.size() << " poses (gpr "
            << (use_gpr ? "on" : "off") << ", dropped " << res.dropped_events
            << " late events) -> " << g.out << "\n";
  return 0;
}

int cmd_eval(const GlobalOpts& g, const Configs& cfgs, const std::string& in_dir,
             const std::vector<std::string>& pred_specs,
             const std::vector<std::string>& traj_specs) {
  require_out(g, "eval", "report directory");
  const SequenceData seq = read_sequence_dir(in_dir);
  if (seq.truth.size() < 2) throw InputError(in_dir + ": eval needs truth.csv poses");
  const PreparedSequence ps = prepare_sequence(seq, effective_filter(seq, cfgs.filter));
  const EkfConfig rig = ekf_for_sequence(cfgs, seq);

  ReportInput rin;
  rin.truth_steps = step_displacements(ps);
  const int n_steps = static_cast<int>(rin.truth_steps.size());

  {
    StepEstimates enc;
    enc.value = encoder_step_estimates(seq.encoders, ps.times, rig.ticks_per_meter);
    enc.covered.assign(enc.value.size(), 1);
    rin.methods.push_back({"wheel_encoder", std::move(enc)});
  }
  for (const auto& spec : pred_specs) {
    const auto [name, path] = split_named_path(spec);
    rin.methods.push_back({name, overlap_add(read_predictions_csv(path), n_steps)});
  }

  rin.truth_traj = seq.truth;
  const double init_yaw = seq.imu.empty() ? 0.0 : seq.imu.front().yaw;
  rin.trajectories.push_back(
      {"wheel_encoder",
       encoder_dead_reckoning(seq.encoders, rig.ticks_per_meter, rig.wheel_separation_m,
                              init_yaw)});
  for (const auto& spec : traj_specs) {
    const auto [name, path] = split_named_path(spec);
    rin.trajectories.push_back({name, read_trajectory_csv(path)});
  }

  compare_report(rin, g.out);

  std::cout << "per-step displacement RMSE (" << n_steps << " steps):\n";
  for (const auto& m : rin.methods)
    std::cout << "  " << m.name << ": " << format_double(rmse_mm(rin.truth_steps, m.est))
              << " mm\n";
  std::cout << "trajectory ATE (yaw-aligned about start / unaligned):\n";
  for (const auto& t : rin.trajectories)
    std::cout << "  " << t.name << ": " << format_double(rmse_ate(rin.truth_traj, t.traj))
              << " m / "
              << format_double(rmse_ate(rin.truth_traj, t.traj, AteAlignment::none)) << " m\n";
  std::cout << "report -> " << g.out << "\n";
  return 0;
}

int cmd_ablate(const GlobalOpts& g, const Configs& cfgs, const std::string& axis_str,
               const std::string& values_str, const std::vector<std::string>& train_dirs,
               const std::vector<std::string>& val_dirs, const std::string& eval_dir) {
  require_out(g, "ablate", "sweep output directory");
  const AblationAxis axis = parse_ablation_axis(axis_str);
  const std::vector<double> values = parse_value_list(values_str);
  if (eval_dir.empty()) throw InputError("ablate needs --eval-seq (held-out sequence directory)");

  ModelConfig mcfg = cfgs.model;
  if (g.seed_given) mcfg.seed = g.seed;

  const SequenceData eval_seq = read_sequence_dir(eval_dir);
  if (eval_seq.truth.size() < 2)
    throw InputError(eval_dir + ": ablation scoring needs truth.csv poses");
  if (axis == AblationAxis::kFiltering) {
    auto check_raw = [](const std::vector<std::string>& dirs) {
      for (const auto& d : dirs)
        if (kv_get(read_sequence_dir(d).manifest.root, "filtered", false))
          throw InputError(d + " is pre-filtered; the filtering axis needs raw sequences");
    };
    check_raw(train_dirs);
    check_raw(val_dirs);
    if (kv_get(eval_seq.manifest.root, "filtered", false))
      throw InputError(eval_dir + " is pre-filtered; the filtering axis needs raw sequences");
  }

  const auto provider = [&](const ModelConfig& cfg, bool filtered) {
    const FilterConfig fcfg = filtered ? cfgs.filter : passthrough_filter();
    SweepData d;
    d.train = windows_from_dirs(train_dirs, fcfg, cfg, 1).set;
    d.val = windows_from_dirs(val_dirs, fcfg, cfg, 1).set;
    return d;
  };
  const auto evaluate = [&](const ModelParams& p, bool filtered) {
    const FilterConfig fcfg = filtered ? cfgs.filter : passthrough_filter();
    const PreparedSequence ps = prepare_sequence(eval_seq, effective_filter(eval_seq, fcfg));
    const WindowSet ws = build_windows(ps, p.config.window_k, 1);
    const std::vector<double> vals = predict_window_set(p, ws);
    const std::vector<double> truth = step_displacements(ps);
    const StepEstimates est =
        overlap_add(to_window_predictions(ws, vals), static_cast<int>(truth.size()));
    return rmse_mm(truth, est);
  };

  const std::vector<SweepRow> rows =
      ablation_sweep(axis, values, mcfg, cfgs.train, provider, evaluate, &std::cout, g.jobs);

  fs::create_directories(g.out);
  const std::string stem = g.out + "/sweep_" + to_string(axis);
  {
    CsvWriter w(stem + ".csv", {"value", "rmse_mm"});
    for (const auto& r : rows) w.raw_row({format_double(r.value), format_double(r.rmse_mm)});
  }
  {
    SvgPlot plot("Ablation sweep: " + to_string(axis), to_string(axis), "RMSE [mm]");
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      xs.push_back(r.value);
      ys.push_back(r.rmse_mm);
    }
    plot.add_series("rmse", xs, ys);
    const SweepRow& best = rows[best_sweep_row(rows)];
    plot.add_marker("best", best.value, best.rmse_mm);
    plot.write(stem + ".svg");
    std::cout << "best " << to_string(axis) << " = " << format_double(best.value) << " (rmse "
              << format_double(best.rmse_mm) << " mm) -> " << stem << ".{csv,svg}\n";
  }
  return 0;
}

void report_error(const GlobalOpts& g, const std::string& type, const std::string& message,
                  int code) {
  if (g.json_errors) {
    const nlohmann::json j{
        {"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "error: " << message << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;
  // Best-effort early scan so even argument-parsing errors honor the flag.
  for (int i = 1; i < argc; ++i)
    if (std::string_view(argv[i]) == "--json-errors") g.json_errors = true;

  CLI::App app{"GPR-aided rover localization toolkit"};
  app.require_subcommand(1);
  app.add_option("--config", g.config,
                 "experiment config: keyval file with [filter] [model] [train] [ekf] sections");
  auto* seed_opt = app.add_option("--seed", g.seed, "seed for randomized stages");
  app.add_option("--out", g.out, "output path (file or directory, per subcommand)");
  app.add_option("--jobs", g.jobs, "worker threads for the ablation sweep")
      ->check(CLI::PositiveNumber);
  app.add_flag("--json-errors", g.json_errors, "emit errors as JSON on stderr");

  std::string scene_path, motion_path, in_dir, ckpt_path, pred_path, axis_str, values_str,
      eval_dir;
  std::vector<std::string> train_dirs, val_dirs, pred_specs, traj_specs;
  int stride = 1;
  bool no_gpr = false;

  auto* c_sim = app.add_subcommand("simulate", "generate a synthetic sequence directory");
  c_sim->add_option("--scene", scene_path, "scene file (scatterers + radar params)")->required();
  c_sim->add_option("--motion", motion_path, "motion profile file (waypoints + rates)")
      ->required();

  auto* c_filter = app.add_subcommand("filter", "condition a sequence's radargram");
  c_filter->add_option("--in", in_dir, "input sequence directory")->required();

  auto* c_train = app.add_subcommand("train", "train the displacement regressor");
  c_train->add_option("--train", train_dirs, "training sequence directories")->required();
  c_train->add_option("--val", val_dirs, "validation sequence directories")->required();

  auto* c_infer = app.add_subcommand("infer", "predict per-window displacements");
  c_infer->add_option("--in", in_dir, "input sequence directory")->required();
  c_infer->add_option("--ckpt", ckpt_path, "model checkpoint")->required();
  c_infer->add_option("--stride", stride, "window stride in traces")
      ->check(CLI::PositiveNumber);

  auto* c_fuse = app.add_subcommand("fuse", "run the sensor-fusion filter");
  c_fuse->add_option("--in", in_dir, "input sequence directory")->required();
  c_fuse->add_option("--pred", pred_path, "window predictions CSV (from infer)");
  c_fuse->add_flag("--no-gpr", no_gpr, "fuse wheel odometry and IMU only");

  auto* c_eval = app.add_subcommand("eval", "score estimates against truth");
  c_eval->add_option("--in", in_dir, "truth sequence directory")->required();
  c_eval->add_option("--pred", pred_specs, "name=predictions.csv (repeatable)");
  c_eval->add_option("--traj", traj_specs, "name=trajectory.csv (repeatable)");

  auto* c_ablate = app.add_subcommand("ablate", "retrain along one config axis");
  c_ablate->add_option("--axis", axis_str,
                       "axis: k, alpha, layers, dropout, pooling, encoder, filtering")
      ->required();
  c_ablate->add_option("--values", values_str, "comma-separated sweep values")->required();
  c_ablate->add_option("--train", train_dirs, "training sequence directories")->required();
  c_ablate->add_option("--val", val_dirs, "validation sequence directories")->required();
  c_ablate->add_option("--eval-seq", eval_dir, "held-out sequence directory for scoring")
      ->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
    g.seed_given = seed_opt->count() > 0;
    const Configs cfgs = load_configs(g.config);
    const auto train_list = expand_list(train_dirs);
    const auto val_list = expand_list(val_dirs);

    if (c_sim->parsed()) return cmd_simulate(g, scene_path, motion_path);
    if (c_filter->parsed()) return cmd_filter(g, cfgs, in_dir);
    if (c_train->parsed()) return cmd_train(g, cfgs, train_list, val_list);
    if (c_infer->parsed()) return cmd_infer(g, cfgs, in_dir, ckpt_path, stride);
    if (c_fuse->parsed()) return cmd_fuse(g, cfgs, in_dir, pred_path, no_gpr);
    if (c_eval->parsed()) return cmd_eval(g, cfgs, in_dir, pred_specs, traj_specs);
    if (c_ablate->parsed())
      return cmd_ablate(g, cfgs, axis_str, values_str, train_list, val_list, eval_dir);
    throw InputError("no subcommand given");
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help and friends
    if (g.json_errors) {
      report_error(g, "usage", e.what(), 2);
      return 2;
    }
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    report_error(g, "config", e.what(), 2);
    return 2;
  } catch (const InputError& e) {
    report_error(g, "input", e.what(), 2);
    return 2;
  } catch (const NumericalError& e) {
    report_error(g, "numerical", e.what(), 3);
    return 3;
  } catch (const std::exception& e) {
    report_error(g, "internal", e.what(), 3);
    return 3;
  }
}
