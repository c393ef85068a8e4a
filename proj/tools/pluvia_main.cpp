// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "pluvia/job.hpp"

namespace {

bool parse_ego_speed(const std::string& text, pluvia::EgoSpeedPolicy& policy) {
  if (text.rfind("uniform:", 0) == 0) {
    const std::string range = text.substr(8);
    const auto dash = range.find('-');
    if (dash == std::string::npos) return false;
    try {
      policy.mode = pluvia::EgoSpeedPolicy::Mode::kUniform;
      policy.lo_kmh = std::stod(range.substr(0, dash));
      policy.hi_kmh = std::stod(range.substr(dash + 1));
    } catch (...) {
      return false;
    }
    return policy.lo_kmh >= 0.0 && policy.hi_kmh >= policy.lo_kmh;
  }
  try {
    policy.mode = pluvia::EgoSpeedPolicy::Mode::kFixed;
    policy.fixed_mps = std::stod(text) / 3.6;  // CLI takes km/h
  } catch (...) {
    return false;
  }
  return policy.fixed_mps >= 0.0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pluvia - physically based rain and fog augmentation for images with depth"};

  pluvia::JobConfig config;
  std::string ego_text;
  std::vector<double> rain, fog;

  app.add_option("--input", config.input, "Input image file, directory, or glob")->required();
  app.add_option("--depth", config.depth_path,
                 "Depth file, directory, or template with {stem} (16-bit PNG or PFM)")
      ->required();
  app.add_option("--depth-scale", config.depth_unit_scale,
                 "Meters per stored unit for 16-bit PNG depth (PFM is already metric)");
  app.add_option("--calib", config.calib_path, "Calibration file (key: value lines)");
  app.add_option("--rain", rain, "Rain rates in mm/hr (comma separated)")->delimiter(',');
  app.add_option("--fog", fog, "Fog max visibilities in meters (comma separated)")->delimiter(',');
  app.add_option("--seed", config.seed, "Job seed (per-frame seeds derive from it)");
  app.add_option("--ego-speed", ego_text,
                 "Ego speed in km/h: a number, or uniform:LO-HI for per-frame draws");
  app.add_option("--streak-db", config.streak_db_dir,
                 "Directory of cv{j}_osc{k}.png streak sprites (procedural fallback if absent)");
  app.add_flag("--procedural-streaks", config.force_procedural_streaks,
               "Force the procedural streak database");
  app.add_option("--out", config.out_dir, "Output directory")->required();
  app.add_flag("--dump-env", config.dump_env, "Write the estimated environment map per frame");
  app.add_flag("--dump-streaks", config.dump_streaks, "Write streak geometry per rain condition");
  app.add_option("--jobs", config.jobs, "Parallel frame workers")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  config.rain_rates_mmph = rain;
  config.fog_visibilities_m = fog;
  if (!ego_text.empty()) {
    if (!parse_ego_speed(ego_text, config.ego)) {
      std::cerr << "error: bad --ego-speed value '" << ego_text << "'\n";
      return 1;
    }
    config.ego_from_policy = true;
  }

  try {
    const pluvia::JobReport report = pluvia::run_job(config);
    std::cout << report.to_text();
    return report.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
