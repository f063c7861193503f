#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "keyflow/config.hpp"
#include "keyflow/errors.hpp"
#include "keyflow/eval.hpp"
#include "keyflow/fs_util.hpp"
#include "keyflow/json_io.hpp"
#include "keyflow/report.hpp"
#include "keyflow/sequence_io.hpp"
#include "keyflow/sweep.hpp"
#include "keyflow/synth.hpp"
#include "keyflow/tracker.hpp"

namespace keyflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

inline ExperimentConfig load_config(const CommonOptions& o) {
  ExperimentConfig cfg = load_experiment_config(o.config);
  if (o.seed) cfg.apply_seed(*o.seed);
  return cfg;
}

inline std::string percent(double fraction) { return detail::fmt("%.1f", 100.0 * fraction) + "%"; }

inline int cmd_synth(const CommonOptions& o, std::ostream& out) {
  const ExperimentConfig cfg = load_config(o);
  const std::filesystem::path dir = o.out.empty() ? cfg.output_dir : o.out;
  const SyntheticSequence seq = generate_sequence(cfg.sequence);
  write_sequence_dir(seq, dir);
  out << "sequence " << dir.string() << ": " << seq.width() << "x" << seq.height() << ", " << seq.frame_count()
      << " frames, " << std::max(0, seq.frame_count() - 1) << " flow files, " << seq.windows().size()
      << " difficulty windows, trajectory " << to_string(cfg.sequence.trajectory.kind) << ", seed "
      << cfg.sequence.seed << "\n";
  return kExitOk;
}

inline int cmd_track(const CommonOptions& o, const std::string& sequence_dir, const std::string& report_dir,
                     std::ostream& out) {
  const ExperimentConfig cfg = load_config(o);
  const DirectorySequence seq(sequence_dir);
  SyntheticScorer scorer(seq.gt_boxes(), seq.windows(), cfg.scorer, cfg.tracker.seed);
  std::vector<std::string> log;
  const TrackTrace trace = track_sequence(seq, seq.gt_boxes().front(), scorer, cfg.tracker, cfg.costs, &log);
  const MetricsReport m = evaluate(trace, seq.gt_boxes());

  const std::filesystem::path trace_path = o.out;
  if (trace_path.has_parent_path()) ensure_directory(trace_path.parent_path());
  write_file_atomic(trace_path, trace_to_json(trace).dump(2) + "\n");
  if (!report_dir.empty()) {
    ensure_directory(report_dir);
    const std::filesystem::path rd = report_dir;
    write_file_atomic(rd / "metrics.json", metrics_to_json(m).dump(2) + "\n");
    write_file_atomic(rd / "precision.svg", precision_svg(m));
    write_file_atomic(rd / "success.svg", success_svg(m));
  }
  for (const auto& line : log) out << line << "\n";
  out << "keyframe ratio " << percent(m.keyframe_ratio) << " (" << trace.keyframe_count << "/"
      << trace.records.size() << "), total cost " << detail::fmt("%.1f", m.total_cost) << ", AUC "
      << detail::fmt("%.4f", m.auc) << ", precision@20 " << detail::fmt("%.4f", m.precision_at_20) << "\n";
  return kExitOk;
}

inline int cmd_sweep(const CommonOptions& o, std::optional<int> jobs, std::ostream& out) {
  ExperimentConfig cfg = load_config(o);
  if (jobs) cfg.sweep.jobs = *jobs;
  const std::filesystem::path dir = o.out.empty() ? cfg.output_dir : o.out;
  const SweepResult r = sweep_threshold(cfg.sequence, cfg.tracker, cfg.scorer, cfg.costs, cfg.sweep, cfg.seed);

  ensure_directory(dir);
  const std::string summary = sweep_summary(r);
  write_file_atomic(dir / "sweep.csv", sweep_csv(r));
  write_file_atomic(dir / "sweep.json", sweep_to_json(r).dump(2) + "\n");
  write_file_atomic(dir / "keyframe_ratio.svg", keyframe_ratio_svg(r));
  write_file_atomic(dir / "auc.svg", auc_svg(r));
  write_file_atomic(dir / "summary.txt", summary);
  out << summary;
  const int violations = keyframe_ratio_violations(r);
  out << "keyframe ratio monotone in t: " << (violations == 0 ? "yes" : "no (" + std::to_string(violations) + " violations)")
      << "\n";
  return kExitOk;
}

/// Parses argv and dispatches. Exit codes: 0 success, 1 usage error,
/// 2 data or config error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"keyflow: keyframe/flow collaborative tracking experiments"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string sequence_dir;
  std::string report_dir;
  std::optional<int> jobs;

  auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", common.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    auto* o = sub->add_option("--out", common.out, "output path");
    if (out_required) o->required();
    sub->add_option("--seed", common.seed, "master seed, overrides the config");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic sequence directory");
  add_common(synth, false);
  CLI::App* track = app.add_subcommand("track", "track a sequence directory and write the trace");
  add_common(track, true);
  track->add_option("--sequence", sequence_dir, "sequence directory")->required();
  track->add_option("--report", report_dir, "also write metrics.json and curve SVGs here");
  CLI::App* sweep = app.add_subcommand("sweep", "score-threshold sweep: CSV, JSON and SVG report");
  add_common(sweep, false);
  sweep->add_option("--jobs", jobs, "parallel tracker runs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(common, out);
    if (*track) return cmd_track(common, sequence_dir, report_dir, out);
    if (*sweep) return cmd_sweep(common, jobs, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitData;
  } catch (const SequenceError& e) {
    err << "sequence error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace keyflow::cli
