// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pluvia/compositor.hpp"

namespace pluvia {

/// Per-frame camera speed: a fixed value or a uniform draw in km/h.
struct EgoSpeedPolicy {
  enum class Mode { kFixed, kUniform };
  Mode mode = Mode::kFixed;
  double fixed_mps = 0.0;
  double lo_kmh = 0.0;
  double hi_kmh = 0.0;
};

/// Returns meters per second. Uniform draws are converted from km/h.
double ego_speed_for_frame(const EgoSpeedPolicy& policy, std::mt19937_64& rng);

struct JobConfig {
  std::string input;           // file, directory, or glob (* in the filename)
  std::string depth_path;      // file, directory, or template with {} / {stem}
  double depth_unit_scale = 0.0;
  std::string calib_path;      // optional; defaults used when empty
  std::vector<double> rain_rates_mmph;
  std::vector<double> fog_visibilities_m;
  std::uint64_t seed = 0;
  std::string out_dir;
  EgoSpeedPolicy ego;
  bool ego_from_policy = false;  // false: take the calibration file's speed
  std::string streak_db_dir;
  bool force_procedural_streaks = false;
  bool dump_env = false;
  bool dump_streaks = false;
  int jobs = 1;
  AugmentOptions augment;  // rain params' rate is set per condition

  void validate() const;
};

struct JobReport {
  std::size_t frames_total = 0;
  std::size_t frames_processed = 0;
  std::size_t files_written = 0;
  std::map<std::string, double> mean_luminance_delta;  // per condition label
  double wall_time_per_frame_s = 0.0;
  int exit_code = 0;  // 0 ok, 2 all frames failed

  std::string to_text() const;
};

/// Seed for one (frame, condition) pair; depends on the frame's stem, not its
/// position, so reordering inputs never changes an output.
std::uint64_t frame_seed(std::uint64_t job_seed, std::string_view stem,
                         std::string_view condition);

/// Condition labels used in output filenames: rain50mm, rain0.5mm, fog37.5m.
std::string rain_label(double rate_mmph);
std::string fog_label(double visibility_m);

/// Run the batch: every frame x condition writes <stem>_<label>.png into the
/// output directory. Frames with missing/unreadable depth are skipped with a
/// warning on stderr.
JobReport run_job(const JobConfig& config);

}  // namespace pluvia
