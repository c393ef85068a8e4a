// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include "pluvia/job.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pluvia/depth.hpp"
#include "pluvia/image_io.hpp"
#include "pluvia/random.hpp"

namespace fs = std::filesystem;

namespace pluvia {
namespace {

constexpr int kRefineRadiusPx = 8;
constexpr float kRefineEps = 1.0e-4f;

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

bool glob_match(const std::string& pattern, const std::string& name) {
  // Supports '*' and '?' in the filename component.
  std::size_t p = 0, n = 0, star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<fs::path> expand_inputs(const std::string& input) {
  std::vector<fs::path> files;
  const fs::path in(input);
  if (input.find('*') != std::string::npos || input.find('?') != std::string::npos) {
    const fs::path dir = in.parent_path().empty() ? fs::path(".") : in.parent_path();
    const std::string pattern = in.filename().string();
    if (fs::is_directory(dir))
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && glob_match(pattern, entry.path().filename().string()))
          files.push_back(entry.path());
  } else if (fs::is_directory(in)) {
    for (const auto& entry : fs::directory_iterator(in))
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  } else if (fs::is_regular_file(in)) {
    files.push_back(in);
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string resolve_depth_path(const std::string& spec, const std::string& stem) {
  std::string out = spec;
  for (const char* token : {"{stem}", "{}"}) {
    const auto pos = out.find(token);
    if (pos != std::string::npos) {
      out.replace(pos, std::string(token).size(), stem);
      return out;
    }
  }
  if (fs::is_directory(out)) {
    for (const char* ext : {".pfm", ".png"}) {
      const fs::path candidate = fs::path(out) / (stem + ext);
      if (fs::exists(candidate)) return candidate.string();
    }
    return (fs::path(out) / (stem + ".png")).string();  // reported missing later
  }
  return out;  // single explicit file
}

std::string format_value(double v) {
  if (v == static_cast<double>(static_cast<long long>(v)))
    return std::to_string(static_cast<long long>(v));
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

void dump_streak_geometry(const std::string& path, const std::vector<StreakGeometry>& streaks) {
  std::ofstream out(path);
  out << "# start_x start_y end_x end_y diameter_px depth_m\n";
  for (const StreakGeometry& g : streaks) {
    out << g.start_px.x() << ' ' << g.start_px.y() << ' ' << g.end_px.x() << ' ' << g.end_px.y()
        << ' ' << g.image_diameter_px << ' ' << g.depth_m << '\n';
  }
}

}  // namespace

double ego_speed_for_frame(const EgoSpeedPolicy& policy, std::mt19937_64& rng) {
  if (policy.mode == EgoSpeedPolicy::Mode::kFixed) {
    if (policy.fixed_mps < 0.0) throw std::invalid_argument("ego speed must be >= 0");
    return policy.fixed_mps;
  }
  if (policy.lo_kmh < 0.0 || policy.hi_kmh < policy.lo_kmh)
    throw std::invalid_argument("ego speed interval must satisfy 0 <= lo <= hi");
  return uniform_range(rng, policy.lo_kmh, policy.hi_kmh) / 3.6;
}

void JobConfig::validate() const {
  if (rain_rates_mmph.empty() && fog_visibilities_m.empty())
    throw std::invalid_argument("config: need at least one rain rate or fog visibility");
  if (input.empty()) throw std::invalid_argument("config: input is required");
  if (out_dir.empty()) throw std::invalid_argument("config: output directory is required");
  for (double r : rain_rates_mmph)
    if (r < 0.0) throw std::invalid_argument("config: rain rates must be >= 0");
  for (double v : fog_visibilities_m)
    if (!(v > 0.0)) throw std::invalid_argument("config: fog visibilities must be > 0");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
}

std::uint64_t frame_seed(std::uint64_t job_seed, std::string_view stem,
                         std::string_view condition) {
  std::uint64_t h = fnv1a64(std::to_string(job_seed));
  h = fnv1a64("|", h);
  h = fnv1a64(stem, h);
  h = fnv1a64("|", h);
  h = fnv1a64(condition, h);
  return h;
}

std::string rain_label(double rate_mmph) { return "rain" + format_value(rate_mmph) + "mm"; }
std::string fog_label(double visibility_m) { return "fog" + format_value(visibility_m) + "m"; }

JobReport run_job(const JobConfig& config) {
  config.validate();

  const std::vector<fs::path> inputs = expand_inputs(config.input);
  JobReport report;
  report.frames_total = inputs.size();
  if (inputs.empty()) {
    report.exit_code = 2;
    return report;
  }
  fs::create_directories(config.out_dir);

  CameraRig base_rig;
  if (!config.calib_path.empty()) base_rig = load_camera_rig(config.calib_path);

  const StreakDatabase db = config.force_procedural_streaks
                                ? StreakDatabase::procedural()
                                : StreakDatabase::load(config.streak_db_dir);

  for (const double v : config.fog_visibilities_m) FogParams{v, Rgb::Zero()}.validate();

  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::size_t processed = 0, written = 0;
  std::map<std::string, double> lum_delta_sum;
  const auto t_begin = std::chrono::steady_clock::now();

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= inputs.size()) return;
      const fs::path& path = inputs[i];
      const std::string stem = path.stem().string();
      try {
        const LinearImage img = load_image(path.string());
        const std::string depth_file = resolve_depth_path(config.depth_path, stem);
        DepthMap depth = load_depth(depth_file, config.depth_unit_scale);
        if (depth.rows() != img.height() || depth.cols() != img.width())
          throw std::runtime_error(depth_file + ": depth dimensions differ from image");
        depth = refine_depth_edges(depth, img, kRefineRadiusPx, kRefineEps);

        CameraRig rig = base_rig;
        if (config.ego_from_policy) {
          std::mt19937_64 ego_rng(frame_seed(config.seed, stem, "ego"));
          rig.ego_speed_mps = ego_speed_for_frame(config.ego, ego_rng);
        }

        if (config.dump_env) {
          const EnvironmentMap env = estimate_environment(img, rig, config.augment.env_height);
          save_image(env.radiance, (fs::path(config.out_dir) / (stem + "_env.png")).string());
        }

        const double img_mean = img.mean();
        std::size_t frame_written = 0;
        std::map<std::string, double> frame_delta;

        for (const double rate : config.rain_rates_mmph) {
          const std::string label = rain_label(rate);
          AugmentOptions opts = config.augment;
          opts.rain.rate_mmph = rate;
          AugmentTrace trace;
          const LinearImage out = augment_frame(img, depth, rig, opts, db,
                                                frame_seed(config.seed, stem, label),
                                                config.dump_streaks ? &trace : nullptr);
          save_image(out, (fs::path(config.out_dir) / (stem + "_" + label + ".png")).string());
          if (config.dump_streaks)
            dump_streak_geometry(
                (fs::path(config.out_dir) / (stem + "_" + label + "_streaks.txt")).string(),
                trace.visible);
          frame_delta[label] = out.mean() - img_mean;
          ++frame_written;
        }
        for (const double vis : config.fog_visibilities_m) {
          const std::string label = fog_label(vis);
          FogParams fog{vis, estimate_airlight(img)};
          const LinearImage out = render_fog(img, depth, fog);
          save_image(out, (fs::path(config.out_dir) / (stem + "_" + label + ".png")).string());
          frame_delta[label] = out.mean() - img_mean;
          ++frame_written;
        }

        std::lock_guard<std::mutex> lock(mutex);
        ++processed;
        written += frame_written;
        for (const auto& [label, delta] : frame_delta) lum_delta_sum[label] += delta;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mutex);
        std::cerr << "warning: skipping " << path.string() << ": " << e.what() << "\n";
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(config.jobs, static_cast<int>(inputs.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  report.frames_processed = processed;
  report.files_written = written;
  report.wall_time_per_frame_s = processed > 0 ? elapsed / static_cast<double>(processed) : 0.0;
  for (const auto& [label, sum] : lum_delta_sum)
    report.mean_luminance_delta[label] = processed > 0 ? sum / static_cast<double>(processed) : 0.0;
  report.exit_code = processed == 0 ? 2 : 0;
  return report;
}

std::string JobReport::to_text() const {
  std::ostringstream out;
  out << "frames_total: " << frames_total << "\n"
      << "frames_processed: " << frames_processed << "\n"
      << "files_written: " << files_written << "\n";
  for (const auto& [label, delta] : mean_luminance_delta)
    out << "mean_luminance_delta[" << label << "]: " << delta << "\n";
  out << "wall_time_per_frame_s: " << wall_time_per_frame_s << "\n";
  return out.str();
}

}  // namespace pluvia
