#include "ipt/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ipt/pnp.hpp"

namespace ipt {

namespace {

double wrap_deg(double d) {
  while (d > 180.0) d -= 360.0;
  while (d < -180.0) d += 360.0;
  return d;
}

EvalReport::AxisStats stats_of(const std::vector<double>& errors) {
  EvalReport::AxisStats s;
  if (errors.empty()) return s;
  double abs_sum = 0, sq_sum = 0;
  for (double e : errors) {
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  s.mae = abs_sum / static_cast<double>(errors.size());
  s.std = std::sqrt(sq_sum / static_cast<double>(errors.size()));
  return s;
}

// Deterministic carrier frame standing in for projected AR content: oriented
// sinusoid mixtures per channel. The texture is what the alignment search
// locks onto, so it must carry gradients everywhere; channel values stay off
// the gamut walls so the lightness offsets survive re-encoding.
ImagePlane synthetic_content(int w, int h) {
  ImagePlane img = ImagePlane::srgb8(w, h);
  std::mt19937 gen(424242);
  std::uniform_real_distribution<double> lambda(18.0, 90.0);
  std::uniform_real_distribution<double> angle(0.0, 2 * 3.14159265358979323846);
  for (int c = 0; c < 3; ++c) {
    struct Wave {
      double kx, ky, phi, amp;
    };
    std::vector<Wave> waves;
    double total = 0;
    for (int i = 0; i < 8; ++i) {
      const double lam = lambda(gen);
      const double th = angle(gen);
      const double amp = lam / 90.0 + 0.3;
      waves.push_back({2 * 3.14159265358979323846 * std::cos(th) / lam,
                       2 * 3.14159265358979323846 * std::sin(th) / lam, angle(gen), amp});
      total += amp;
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double v = 0;
        for (const Wave& wv : waves) {
          v += wv.amp * std::sin(wv.kx * x + wv.ky * y + wv.phi);
        }
        img.at_u8(x, y, c) = static_cast<uint8_t>(40 + (v / total + 1.0) * 85.0);
      }
    }
  }
  return img;
}

std::string format_row(const std::string& name, const EvalReport::AxisStats& s,
                       const char* unit) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "  %-6s %10.4f %10.4f  %s\n", name.c_str(), s.mae,
                s.std, unit);
  return buf;
}

}  // namespace

std::string EvalReport::to_json() const {
  nlohmann::json j;
  auto axis = [](const AxisStats& s) {
    return nlohmann::json{{"mae", s.mae}, {"std", s.std}};
  };
  j["position"] = {{"x", axis(x)}, {"y", axis(y)}, {"z", axis(z)}};
  j["rotation"] = {{"yaw", axis(yaw)}, {"pitch", axis(pitch)}, {"roll", axis(roll)}};
  j["detection_rate"] = detection_rate;
  j["mean_tags_per_frame"] = mean_tags_per_frame;
  j["throughput_fps"] = throughput_fps;
  j["frames_demodulated"] = frames_demodulated;
  j["frames_with_pose"] = frames_with_pose;
  j["scenario"] = scenario_name;
  nlohmann::json ids = nlohmann::json::object();
  for (const auto& [id, n] : id_counts) ids[std::to_string(id)] = n;
  j["id_counts"] = ids;
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << "scenario: " << scenario_name << "\n";
  out << "  axis          mae        std\n";
  out << format_row("x", x, "m") << format_row("y", y, "m") << format_row("z", z, "m");
  out << format_row("yaw", yaw, "deg") << format_row("pitch", pitch, "deg")
      << format_row("roll", roll, "deg");
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "  detection rate %.3f | tags/frame %.2f | throughput %.1f FPS | "
                "poses %d/%d\n",
                detection_rate, mean_tags_per_frame, throughput_fps, frames_with_pose,
                frames_demodulated);
  out << buf;
  return out.str();
}

EvalReport run_e2e_eval(const CaptureScenario& scenario, const TagMapConfig& map,
                        const EvalOptions& options) {
  scenario.validate();
  if (scenario.screen.width_px != map.map_width ||
      scenario.screen.height_px != map.map_height ||
      std::abs(scenario.screen.ratio_x - map.ratio_x) > 1e-12 ||
      std::abs(scenario.screen.ratio_y - map.ratio_y) > 1e-12) {
    throw ConfigError("eval: scenario screen geometry does not match the map");
  }

  // Static carrier content: N=2 distinct modulated frames cover the stream.
  const TagMapImage map_image = generate_map(map);
  ModulationConfig mod;
  mod.input_fps = scenario.camera_fps / 2.0;
  mod.output_fps = scenario.camera_fps;
  mod.delta_l = options.delta_l;
  mod.out_width = map.map_width;
  mod.out_height = map.map_height;
  mod.mask = map_image.mask;
  const ImagePlane content = options.content.empty()
                                 ? synthetic_content(map.map_width, map.map_height)
                                 : options.content;
  const std::vector<ImagePlane> modulated = modulate_frame(content, mod);

  const CaptureResult capture = simulate_capture(scenario, modulated);

  EvalReport report;
  report.scenario_name = "capture[" + std::to_string(capture.frames.size()) + " frames]";

  std::ofstream csv;
  if (!options.per_frame_csv.empty()) {
    csv.open(options.per_frame_csv);
    if (!csv) throw PipelineError("eval: cannot write " + options.per_frame_csv.string());
    csv << "t,ex,ey,ez,eyaw,epitch,eroll,speed,n_tags,rmse\n";
  }
  std::ofstream poses;
  if (!options.pose_csv.empty()) {
    poses.open(options.pose_csv);
    if (!poses) throw PipelineError("eval: cannot write " + options.pose_csv.string());
    poses << "t,x,y,z,yaw,pitch,roll,rmse,n_tags\n";
    poses.precision(10);
  }

  Demodulator demod(map, options.demod);
  std::vector<double> ex, ey, ez, eyaw, epitch, eroll;
  int frames_with_detection = 0;
  int64_t total_tags = 0;
  double pipeline_seconds = 0;

  for (size_t k = 0; k < capture.frames.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const FrameDetections fd = demod.process(capture.frames[k]);
    if (!fd.ready) continue;
    ++report.frames_demodulated;
    if (!fd.detections.empty()) ++frames_with_detection;
    total_tags += static_cast<int64_t>(fd.detections.size());
    for (const auto& d : fd.detections) ++report.id_counts[d.id];

    std::optional<WorldPose> world;
    double rmse = 0;
    if (!fd.detections.empty()) {
      PnpInput input;
      input.intrinsics = scenario.intrinsics;
      for (const auto& det : fd.detections) {
        for (int c = 0; c < 4; ++c) {
          input.points_2d.push_back(det.image_corners[c]);
          input.points_3d.push_back(det.world_corners[c]);
        }
      }
      try {
        const PlanarPnpResult pnp = solve_planar_pnp(input);
        world = invert_pose(pnp.pose);
        rmse = pnp.rmse;
      } catch (const std::exception&) {
        // Degenerate frame; counted as no pose.
      }
    }
    pipeline_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // The aligned difference lives in the previous frame's pixel grid, so the
    // pose estimate corresponds to ground-truth sample k-1.
    const TimedPose& gt = capture.ground_truth[k - 1];
    double speed = 0;
    if (k >= 2) {
      const double dt = capture.ground_truth[k - 1].t - capture.ground_truth[k - 2].t;
      if (dt > 0) {
        speed = (capture.ground_truth[k - 1].pose.translation -
                 capture.ground_truth[k - 2].pose.translation)
                    .norm() /
                dt;
      }
    }
    if (world && poses.is_open()) {
      poses << gt.t << ',' << world->translation.x() << ',' << world->translation.y()
            << ',' << world->translation.z() << ',' << world->yaw_deg << ','
            << world->pitch_deg << ',' << world->roll_deg << ',' << rmse << ','
            << fd.detections.size() << '\n';
    }
    if (world) {
      ++report.frames_with_pose;
      const Eigen::Vector3d dp = world->translation - gt.pose.translation;
      const auto gt_euler = body_euler_zyx_deg(gt.pose.rotation);
      const double dyaw = wrap_deg(world->yaw_deg - gt_euler[0]);
      const double dpitch = wrap_deg(world->pitch_deg - gt_euler[1]);
      const double droll = wrap_deg(world->roll_deg - gt_euler[2]);
      ex.push_back(dp.x());
      ey.push_back(dp.y());
      ez.push_back(dp.z());
      eyaw.push_back(dyaw);
      epitch.push_back(dpitch);
      eroll.push_back(droll);
      if (csv.is_open()) {
        csv << gt.t << ',' << dp.x() << ',' << dp.y() << ',' << dp.z() << ',' << dyaw
            << ',' << dpitch << ',' << droll << ',' << speed << ','
            << fd.detections.size() << ',' << rmse << '\n';
      }
    } else if (csv.is_open()) {
      csv << gt.t << ",,,,,,," << speed << ",0," << '\n';
    }
  }

  report.x = stats_of(ex);
  report.y = stats_of(ey);
  report.z = stats_of(ez);
  report.yaw = stats_of(eyaw);
  report.pitch = stats_of(epitch);
  report.roll = stats_of(eroll);
  if (report.frames_demodulated > 0) {
    report.detection_rate =
        static_cast<double>(frames_with_detection) / report.frames_demodulated;
    report.mean_tags_per_frame =
        static_cast<double>(total_tags) / report.frames_demodulated;
  }
  if (pipeline_seconds > 0) {
    report.throughput_fps = report.frames_demodulated / pipeline_seconds;
  }
  return report;
}

std::string BenchReport::to_json() const {
  nlohmann::json j{{"frames", frames},
                   {"fps_mean", fps_mean},
                   {"fps_median", fps_median},
                   {"ms_per_frame_mean", ms_per_frame_mean}};
  return j.dump(2);
}

BenchReport run_bench(int width, int height, int frames, uint64_t seed) {
  if (frames < 100) throw ParamError("bench: at least 100 frames required");

  // Few large tags so the onboard-resolution camera still decodes; the
  // pipeline cost is resolution-dominated either way.
  TagMapConfig map;
  map.rows = 3;
  map.cols = 3;
  map.map_width = 480;
  map.map_height = 540;
  map.tag_side = 120;
  map.ratio_x = 1.2 / 480;
  map.ratio_y = 1.35 / 540;
  map.family = load_family(std::filesystem::path(IPT_ASSET_DIR) / "tag36h11.codes");

  CaptureScenario scen;
  scen.intrinsics = {static_cast<double>(height), static_cast<double>(height),
                     width / 2.0, height / 2.0, width, height};
  scen.screen = {map.map_width, map.map_height, map.ratio_x, map.ratio_y};
  scen.camera_fps = 120;
  scen.noise_sigma = 1.0;
  scen.seed = seed;
  Eigen::Matrix3d nadir;
  nadir << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  for (int k = 0; k < frames; ++k) {
    TimedPose tp;
    tp.t = k / scen.camera_fps;
    tp.pose.convention = FrameConvention::CAMERA_TO_WORLD;
    tp.pose.rotation = nadir;
    // Slow drift keeps the alignment search honest.
    tp.pose.translation = {0.05 * std::sin(k * 0.02), 0.05 * std::cos(k * 0.017), 1.1};
    scen.trajectory.push_back(tp);
  }

  const TagMapImage map_image = generate_map(map);
  ModulationConfig mod;
  mod.input_fps = 60;
  mod.output_fps = 120;
  mod.delta_l = 4.0f;
  mod.out_width = map.map_width;
  mod.out_height = map.map_height;
  mod.mask = map_image.mask;
  const std::vector<ImagePlane> modulated =
      modulate_frame(synthetic_content(map.map_width, map.map_height), mod);
  const CaptureResult capture = simulate_capture(scen, modulated);

  Demodulator demod(map);
  std::vector<double> per_frame_ms;
  per_frame_ms.reserve(capture.frames.size());
  for (size_t k = 0; k < capture.frames.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const FrameDetections fd = demod.process(capture.frames[k]);
    if (fd.ready && !fd.detections.empty()) {
      PnpInput input;
      input.intrinsics = scen.intrinsics;
      for (const auto& det : fd.detections) {
        for (int c = 0; c < 4; ++c) {
          input.points_2d.push_back(det.image_corners[c]);
          input.points_3d.push_back(det.world_corners[c]);
        }
      }
      try {
        const PlanarPnpResult pnp = solve_planar_pnp(input);
        (void)invert_pose(pnp.pose);
      } catch (const std::exception&) {
      }
    }
    if (fd.ready) {
      per_frame_ms.push_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count());
    }
  }

  BenchReport report;
  report.frames = static_cast<int>(per_frame_ms.size());
  if (per_frame_ms.empty()) return report;
  const double mean_ms =
      std::accumulate(per_frame_ms.begin(), per_frame_ms.end(), 0.0) / per_frame_ms.size();
  std::vector<double> sorted = per_frame_ms;
  std::sort(sorted.begin(), sorted.end());
  const double median_ms = sorted[sorted.size() / 2];
  report.ms_per_frame_mean = mean_ms;
  report.fps_mean = 1000.0 / mean_ms;
  report.fps_median = 1000.0 / median_ms;
  return report;
}

}  // namespace ipt
