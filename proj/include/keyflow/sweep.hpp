#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "keyflow/eval.hpp"
#include "keyflow/observation.hpp"
#include "keyflow/synth.hpp"
#include "keyflow/tracker.hpp"

namespace keyflow {

inline std::vector<double> default_t_values() {
  return {-std::numeric_limits<double>::infinity(), 2, 6, 10, 18, 26, 34, 42, 50, 58};
}

struct SweepSettings {
  std::vector<double> t_values = default_t_values();
  int sequences = 20;
  bool randomize = true;  // draw a fresh trajectory per sequence
  int jobs = 1;

  void validate() const {
    if (t_values.empty()) throw ConfigError("sweep: t_values must not be empty");
    for (double t : t_values) {
      if (std::isnan(t)) throw ConfigError("sweep: t_values must not contain NaN");
    }
    if (sequences < 1) throw ConfigError("sweep: sequences must be >= 1");
    if (jobs < 1) throw ConfigError("sweep: jobs must be >= 1");
  }
};

/// One tracker run of the sweep.
struct SweepRun {
  int sequence = 0;
  std::optional<double> t;  // absent for the all-keyframe baseline
  double keyframe_ratio = 0.0;
  double auc = 0.0;
  double precision20 = 0.0;
  double total_cost = 0.0;
  int escalations = 0;
  bool updates_on_keyframes_only = false;
  std::optional<std::string> error;
};

/// Mean over sequences for one threshold (or the baseline).
struct SweepRow {
  std::optional<double> t;
  double keyframe_ratio = 0.0;
  double auc = 0.0;
  double precision20 = 0.0;
  double total_cost = 0.0;
  double speedup = 0.0;  // from summed costs against the summed baseline
  int runs = 0;
  int failed_runs = 0;

  [[nodiscard]] bool is_baseline() const { return !t.has_value(); }
  [[nodiscard]] bool is_fixed_interval() const { return t && std::isinf(*t) && *t < 0; }
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending t, then the baseline row
  std::vector<SweepRun> runs;  // sequence-major, same t order, baseline last
  std::vector<SequenceSpec> sequences;

  [[nodiscard]] const SweepRow& baseline() const { return rows.back(); }
  [[nodiscard]] std::vector<SweepRow> threshold_rows() const { return {rows.begin(), rows.end() - 1}; }
};

/// Sequence j of a sweep uses seed master + j for its trajectory, noise,
/// candidate draws and scorer; the same seed is reused for every threshold.
inline SequenceSpec sweep_sequence_spec(const SequenceSpec& base, bool randomize, std::uint64_t master_seed,
                                        int j) {
  const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(j);
  if (randomize) return randomized_spec(base, seed);
  SequenceSpec s = base;
  s.seed = seed;
  return s;
}

inline SweepRun run_one(const SyntheticSequence& seq, int j, const TrackerConfig& cfg,
                        const SyntheticScorerParams& scorer_params, const CostModel& costs,
                        std::optional<double> t) {
  SweepRun run;
  run.sequence = j;
  run.t = t;
  try {
    SyntheticScorer scorer(seq.gt_boxes(), seq.windows(), scorer_params, cfg.seed);
    const TrackTrace trace = track_sequence(seq, seq.gt(1), scorer, cfg, costs);
    const MetricsReport m = evaluate(trace, seq.gt_boxes());
    run.keyframe_ratio = m.keyframe_ratio;
    run.auc = m.auc;
    run.precision20 = m.precision_at_20;
    run.total_cost = m.total_cost;
    run.escalations = trace.escalation_count;
    std::vector<int> updated;
    for (const auto& call : scorer.update_log()) updated.push_back(call.frame);
    run.updates_on_keyframes_only = updated == trace.keyframes();
  } catch (const Error& e) {
    run.error = e.what();
  }
  return run;
}

/// Runs every (sequence, threshold) pair plus an all-keyframe baseline per
/// sequence and aggregates by unweighted mean over sequences. Runs for one
/// sequence execute on up to `jobs` threads; results do not depend on it.
inline SweepResult sweep_threshold(const SequenceSpec& base, const TrackerConfig& base_cfg,
                                   const SyntheticScorerParams& scorer_params, const CostModel& costs,
                                   SweepSettings settings, std::uint64_t master_seed) {
  settings.validate();
  base_cfg.validate();
  costs.validate();
  std::vector<double> ts = settings.t_values;
  std::stable_sort(ts.begin(), ts.end());

  std::vector<std::optional<double>> variants(ts.begin(), ts.end());
  variants.push_back(std::nullopt);
  const std::size_t per_seq = variants.size();

  SweepResult result;
  result.runs.resize(per_seq * static_cast<std::size_t>(settings.sequences));
  for (int j = 0; j < settings.sequences; ++j) {
    SequenceSpec spec = sweep_sequence_spec(base, settings.randomize, master_seed, j);
    const SyntheticSequence seq(spec);
    result.sequences.push_back(std::move(spec));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t v = next++; v < per_seq; v = next++) {
        TrackerConfig cfg = base_cfg;
        cfg.seed = master_seed + static_cast<std::uint64_t>(j);
        if (variants[v]) {
          cfg.t = *variants[v];
        } else {
          cfg = all_keyframe_config(cfg);
        }
        result.runs[static_cast<std::size_t>(j) * per_seq + v] =
            run_one(seq, j, cfg, scorer_params, costs, variants[v]);
      }
    };
    const int threads = std::min<int>(settings.jobs, static_cast<int>(per_seq));
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    }
  }

  for (std::size_t v = 0; v < per_seq; ++v) {
    SweepRow row;
    row.t = variants[v];
    for (int j = 0; j < settings.sequences; ++j) {
      const SweepRun& run = result.runs[static_cast<std::size_t>(j) * per_seq + v];
      if (run.error) {
        ++row.failed_runs;
        continue;
      }
      ++row.runs;
      row.keyframe_ratio += run.keyframe_ratio;
      row.auc += run.auc;
      row.precision20 += run.precision20;
      row.total_cost += run.total_cost;
    }
    if (row.runs > 0) {
      const double n = row.runs;
      row.keyframe_ratio /= n;
      row.auc /= n;
      row.precision20 /= n;
      row.total_cost /= n;
    }
    result.rows.push_back(row);
  }
  const double base_cost = result.rows.back().total_cost;
  for (auto& row : result.rows) {
    row.speedup = row.total_cost > 0.0 ? (base_cost / row.total_cost - 1.0) * 100.0 : 0.0;
  }
  return result;
}

/// Number of adjacent threshold rows whose mean keyframe ratio decreases.
inline int keyframe_ratio_violations(const SweepResult& r) {
  const auto rows = r.threshold_rows();
  int violations = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].keyframe_ratio < rows[i - 1].keyframe_ratio) ++violations;
  }
  return violations;
}

}  // namespace keyflow
