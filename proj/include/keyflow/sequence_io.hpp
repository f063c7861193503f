#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "keyflow/errors.hpp"
#include "keyflow/flo_io.hpp"
#include "keyflow/fs_util.hpp"
#include "keyflow/json_io.hpp"
#include "keyflow/synth.hpp"

// On-disk sequence layout:
//   meta.json       dimensions, frame count, gt boxes, windows, spec echo
//   flow_%04d.flo   flow from frame i-1 to frame i, for i = 2..frames

namespace keyflow {

inline constexpr const char* kSequenceFormat = "keyflow-sequence/1";

inline std::string flow_file_name(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "flow_%04d.flo", frame);
  return buf;
}

inline json sequence_meta(const SyntheticSequence& seq) {
  json gt = json::array();
  for (const auto& b : seq.gt_boxes()) gt.push_back(box_to_json(b));
  json windows = json::array();
  for (const auto& w : seq.windows()) windows.push_back(window_to_json(w));
  return {{"format", kSequenceFormat},
          {"width", seq.width()},
          {"height", seq.height()},
          {"frames", seq.frame_count()},
          {"flow_files", "flow_%04d.flo"},
          {"gt_boxes", gt},
          {"windows", windows},
          {"spec", spec_to_json(seq.spec())}};
}

/// Writes the sequence into `dir`. The files are staged in a sibling
/// directory and moved into place at the end; an existing `dir` is replaced
/// only if it is empty or already holds a sequence.
inline void write_sequence_dir(const SyntheticSequence& seq, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw Error(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir) && !fs::exists(dir / "meta.json")) {
      throw Error("refusing to overwrite non-sequence directory " + dir.string());
    }
  }
  fs::path staging = dir;
  staging += ".partial";
  fs::remove_all(staging);
  ensure_directory(staging);
  for (int i = 2; i <= seq.frame_count(); ++i) write_flo(seq.flow(i), staging / flow_file_name(i));
  write_file_atomic(staging / "meta.json", sequence_meta(seq).dump(2) + "\n");
  fs::remove_all(dir);
  std::error_code ec;
  fs::rename(staging, dir, ec);
  if (ec) throw Error("cannot move " + staging.string() + " to " + dir.string() + ": " + ec.message());
}

/// Sequence read back from a directory. Flow files are checked for
/// existence up front and loaded on demand (one-slot cache, so a single
/// instance must not be shared across threads).
class DirectorySequence {
 public:
  explicit DirectorySequence(std::filesystem::path dir) : dir_(std::move(dir)) {
    const auto meta_path = dir_ / "meta.json";
    if (!std::filesystem::exists(meta_path)) throw SequenceError("sequence: missing " + meta_path.string());
    try {
      const json meta = json::parse(read_file(meta_path));
      if (meta.at("format").get<std::string>() != kSequenceFormat) {
        throw FormatError("sequence: unsupported format in " + meta_path.string());
      }
      width_ = meta.at("width").get<int>();
      height_ = meta.at("height").get<int>();
      frames_ = meta.at("frames").get<int>();
      for (const auto& b : meta.at("gt_boxes")) gt_.push_back(box_from_json(b));
      for (const auto& w : meta.at("windows")) {
        windows_.push_back({w.at("start").get<int>(), w.at("end").get<int>(), w.at("penalty").get<double>(),
                            w.at("flow_gain").get<double>()});
      }
    } catch (const json::exception& e) {
      throw FormatError("sequence: malformed meta.json: " + std::string(e.what()));
    }
    if (width_ < 1 || height_ < 1 || frames_ < 1 || static_cast<int>(gt_.size()) != frames_) {
      throw FormatError("sequence: inconsistent meta.json");
    }
    for (int i = 2; i <= frames_; ++i) {
      if (!std::filesystem::exists(dir_ / flow_file_name(i))) {
        throw SequenceError("sequence: missing flow file " + (dir_ / flow_file_name(i)).string());
      }
    }
  }

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int frame_count() const { return frames_; }
  [[nodiscard]] const std::vector<BoundingBox>& gt_boxes() const { return gt_; }
  [[nodiscard]] const std::vector<DifficultyWindow>& windows() const { return windows_; }

  [[nodiscard]] const FlowField& flow(int frame) const {
    if (frame < 2 || frame > frames_) throw SequenceError("sequence: no flow into frame " + std::to_string(frame));
    if (!cache_ || cache_->first != frame) {
      const auto path = dir_ / flow_file_name(frame);
      if (!std::filesystem::exists(path)) throw SequenceError("sequence: missing flow file " + path.string());
      cache_.emplace(frame, read_flo(path));
    }
    return cache_->second;
  }

 private:
  std::filesystem::path dir_;
  int width_ = 0;
  int height_ = 0;
  int frames_ = 0;
  std::vector<BoundingBox> gt_;
  std::vector<DifficultyWindow> windows_;
  mutable std::optional<std::pair<int, FlowField>> cache_;
};

static_assert(FlowProvider<DirectorySequence>);

}  // namespace keyflow
