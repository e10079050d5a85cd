// ipt — invisible-projected-tag localization toolkit CLI.
//
// Subcommands wire the library end to end: gen-map, modulate, simulate,
// demodulate, e2e-eval, bench, send, listen. Exit codes: 0 success,
// 2 configuration error, 3 pipeline/runtime error.

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ipt/channel_sim.hpp"
#include "ipt/color.hpp"
#include "ipt/demod.hpp"
#include "ipt/eval.hpp"
#include "ipt/kernels.hpp"
#include "ipt/modulate.hpp"
#include "ipt/png_io.hpp"
#include "ipt/pnp.hpp"
#include "ipt/telemetry.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::filesystem::path default_family_path() {
  return std::filesystem::path(IPT_ASSET_DIR) / "tag36h11.codes";
}

ipt::TagMapConfig load_map(const std::string& path) {
  return ipt::TagMapConfig::load(path, std::filesystem::path(IPT_ASSET_DIR));
}

int cmd_gen_map(const std::string& out_dir, int rows, int cols, int map_width,
                int map_height, int tag_side, double ratio_x, double ratio_y,
                const std::string& family_path, bool json_out) {
  ipt::TagMapConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.map_width = map_width;
  cfg.map_height = map_height;
  cfg.tag_side = tag_side;
  cfg.ratio_x = ratio_x;
  cfg.ratio_y = ratio_y;
  const std::filesystem::path family =
      family_path.empty() ? default_family_path() : std::filesystem::path(family_path);
  cfg.family = ipt::load_family(family);

  const ipt::TagMapImage map = ipt::generate_map(cfg);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  ipt::write_png(dir / "map.png", map.image);
  ipt::write_png(dir / "map_mask.png", ipt::mask_to_plane(map));
  cfg.save(dir / "map.json", family.string());
  if (json_out) {
    nlohmann::json j{{"map", (dir / "map.png").string()},
                     {"mask", (dir / "map_mask.png").string()},
                     {"config", (dir / "map.json").string()},
                     {"tags", cfg.tag_count()}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "wrote " << cfg.tag_count() << "-tag map to " << out_dir << '\n';
  }
  return 0;
}

int cmd_modulate(const std::string& in_dir, const std::string& map_json, float delta_l,
                 double out_fps, const std::string& out_dir) {
  ipt::FrameManifest manifest;
  std::vector<ipt::ImagePlane> frames;
  {
    manifest = ipt::FrameManifest::load(in_dir);
    frames.reserve(manifest.frame_count);
    for (int i = 0; i < manifest.frame_count; ++i) {
      frames.push_back(ipt::read_png(ipt::frame_path(in_dir, i)));
    }
  }
  const ipt::TagMapConfig map = load_map(map_json);
  const ipt::TagMapImage map_image = ipt::generate_map(map);

  ipt::ModulationConfig cfg;
  cfg.input_fps = manifest.fps;
  cfg.output_fps = out_fps;
  cfg.delta_l = delta_l;
  cfg.out_width = map.map_width;
  cfg.out_height = map.map_height;
  cfg.mask = map_image.mask;

  const std::vector<ipt::ImagePlane> out = ipt::modulate_stream(frames, cfg);
  ipt::write_frame_sequence(out_dir, out, out_fps);
  std::cout << "modulated " << frames.size() << " frames -> " << out.size() << " at "
            << out_fps << " FPS in " << out_dir << '\n';
  return 0;
}

int cmd_simulate(const std::string& scenario_json, const std::string& frames_dir,
                 const std::string& out_dir) {
  const ipt::CaptureScenario scenario = ipt::CaptureScenario::load(scenario_json);
  const std::vector<ipt::ImagePlane> modulated = [&] {
    ipt::FrameManifest m = ipt::FrameManifest::load(frames_dir);
    std::vector<ipt::ImagePlane> f;
    f.reserve(m.frame_count);
    for (int i = 0; i < m.frame_count; ++i) {
      f.push_back(ipt::read_png(ipt::frame_path(frames_dir, i)));
    }
    return f;
  }();

  const ipt::CaptureResult result = ipt::simulate_capture(scenario, modulated);
  ipt::write_frame_sequence(out_dir, result.frames, scenario.camera_fps);
  ipt::write_ground_truth_csv(std::filesystem::path(out_dir) / "ground_truth.csv",
                              result.ground_truth);
  std::cout << "simulated " << result.frames.size() << " camera frames in " << out_dir
            << '\n';
  return 0;
}

int cmd_demodulate(const std::string& frames_dir, const std::string& map_json,
                   const std::string& out_path, int max_shift) {
  const ipt::TagMapConfig map = load_map(map_json);
  ipt::DemodConfig cfg;
  cfg.align.max_shift = max_shift;
  ipt::Demodulator demod(map, cfg);

  ipt::FrameManifest manifest = ipt::FrameManifest::load(frames_dir);
  std::ofstream out(out_path);
  if (!out) throw ipt::PipelineError("demodulate: cannot write " + out_path);

  for (int i = 0; i < manifest.frame_count; ++i) {
    const ipt::ImagePlane frame = ipt::read_png(ipt::frame_path(frames_dir, i));
    const ipt::FrameDetections fd = demod.process(frame);
    nlohmann::json j;
    j["frame"] = i;
    j["ready"] = fd.ready;
    j["shift"] = {fd.shift.first, fd.shift.second};
    j["detections"] = nlohmann::json::array();
    for (const auto& d : fd.detections) {
      nlohmann::json corners_i = nlohmann::json::array();
      nlohmann::json corners_w = nlohmann::json::array();
      for (int c = 0; c < 4; ++c) {
        corners_i.push_back({d.image_corners[c].x(), d.image_corners[c].y()});
        corners_w.push_back({d.world_corners[c].x(), d.world_corners[c].y(),
                             d.world_corners[c].z()});
      }
      j["detections"].push_back({{"id", d.id},
                                 {"hamming", d.hamming},
                                 {"p_i", corners_i},
                                 {"p_w", corners_w}});
    }
    out << j.dump() << '\n';
  }
  std::cout << "wrote detections to " << out_path << '\n';
  return 0;
}

int cmd_e2e_eval(const std::string& scenario_json, const std::string& map_json,
                 float delta_l, const std::string& content_png,
                 const std::string& per_frame_csv, const std::string& pose_csv,
                 const ipt::DemodConfig& knobs, bool json_out) {
  const ipt::CaptureScenario scenario = ipt::CaptureScenario::load(scenario_json);
  const ipt::TagMapConfig map = load_map(map_json);
  ipt::EvalOptions options;
  options.delta_l = delta_l;
  options.demod = knobs;
  if (!content_png.empty()) options.content = ipt::read_png(content_png);
  if (!per_frame_csv.empty()) options.per_frame_csv = per_frame_csv;
  if (!pose_csv.empty()) options.pose_csv = pose_csv;

  const ipt::EvalReport report = ipt::run_e2e_eval(scenario, map, options);
  std::cout << (json_out ? report.to_json() : report.to_table()) << '\n';
  return 0;
}

int cmd_bench(int width, int height, int frames, bool json_out) {
  const ipt::BenchReport report = ipt::run_bench(width, height, frames);
  if (json_out) {
    std::cout << report.to_json() << '\n';
  } else {
    std::cout << "demodulate+pose over " << report.frames << " frames at " << width
              << "x" << height << ": mean " << report.fps_mean << " FPS, median "
              << report.fps_median << " FPS (kernels: " << ipt::kernels::active_name()
              << ")\n";
  }
  return 0;
}

int cmd_send(const std::string& csv_path, const std::string& addr, double rate_hz) {
  const std::vector<ipt::TimedPose> poses = ipt::read_ground_truth_csv(csv_path);
  ipt::UdpSender sender(addr);
  uint32_t seq = 0;
  for (const ipt::TimedPose& tp : poses) {
    ipt::WorldPose wp;
    wp.rotation = tp.pose.rotation;
    wp.translation = tp.pose.translation;
    const auto bytes = ipt::encode_datagram(
        wp, seq++, static_cast<uint64_t>(tp.t * 1e6), 0.0, 0);
    sender.send(bytes);
    if (rate_hz > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(1.0 / rate_hz));
    }
  }
  std::cout << "sent " << seq << " datagrams\n";
  return 0;
}

int cmd_listen(const std::string& addr, int count, double timeout_s, bool json_out) {
  ipt::UdpReceiver receiver(addr);
  std::cout << "listening on port " << receiver.port() << '\n';
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  uint64_t last_printed = 0;
  while (static_cast<int>(receiver.accepted()) < count &&
         std::chrono::steady_clock::now() < deadline) {
    receiver.poll(200);
    const auto latest = receiver.latest();
    if (latest && receiver.accepted() != last_printed) {
      last_printed = receiver.accepted();
      if (json_out) {
        nlohmann::json j{{"seq", latest->seq},
                         {"t_us", latest->timestamp_us},
                         {"position", {latest->x, latest->y, latest->z}},
                         {"quaternion", {latest->qw, latest->qx, latest->qy, latest->qz}},
                         {"rmse", latest->rmse},
                         {"n_tags", latest->n_tags}};
        std::cout << j.dump() << '\n';
      } else {
        std::cout << "seq " << latest->seq << " pos (" << latest->x << ", " << latest->y
                  << ", " << latest->z << ") tags " << latest->n_tags << '\n';
      }
    }
  }
  std::cout << "accepted " << receiver.accepted() << ", stale "
            << receiver.discarded_stale() << ", decode failures "
            << receiver.decode_failures() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invisible projected tag (IPT) localization toolkit"};
  app.require_subcommand(1);

  // gen-map
  auto* gen = app.add_subcommand("gen-map", "Render the tag map, mask and config");
  std::string gen_out = "map_out";
  int rows = 9, cols = 9, map_w = 1920, map_h = 2160, tag_side = 120;
  double ratio_x = 2.17 / 1920, ratio_y = 2.47 / 2160;
  std::string family_path;
  bool gen_json = false;
  gen->add_option("--out", gen_out, "Output directory");
  gen->add_option("--rows", rows);
  gen->add_option("--cols", cols);
  gen->add_option("--width", map_w, "Map width in pixels");
  gen->add_option("--height", map_h, "Map height in pixels");
  gen->add_option("--tag-side", tag_side, "Tag bitmap side in pixels");
  gen->add_option("--ratio-x", ratio_x, "Meters per pixel, horizontal");
  gen->add_option("--ratio-y", ratio_y, "Meters per pixel, vertical");
  gen->add_option("--family", family_path, "Codebook file (default: bundled tag36h11)");
  gen->add_flag("--json", gen_json);

  // modulate
  auto* mod = app.add_subcommand("modulate", "Embed the tag map into a frame sequence");
  std::string mod_in, mod_map, mod_out = "modulated";
  float delta_l = 4.0f;
  double out_fps = 60.0;
  mod->add_option("--in", mod_in, "Input frame-sequence directory")->required();
  mod->add_option("--map", mod_map, "map.json")->required();
  mod->add_option("--delta-l", delta_l, "Lightness offset on the 0..255 L* scale");
  mod->add_option("--out-fps", out_fps);
  mod->add_option("--out", mod_out);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Render camera frames for a scenario");
  std::string sim_scenario, sim_frames, sim_out = "capture";
  sim->add_option("--scenario", sim_scenario, "scenario.json")->required();
  sim->add_option("--frames", sim_frames, "Modulated frame-sequence directory")->required();
  sim->add_option("--out", sim_out);

  // demodulate
  auto* dem = app.add_subcommand("demodulate", "Recover tags from camera frames");
  std::string dem_frames, dem_map, dem_out = "detections.jsonl";
  int dem_shift = 5;
  dem->add_option("--frames", dem_frames)->required();
  dem->add_option("--map", dem_map)->required();
  dem->add_option("--out", dem_out);
  dem->add_option("--max-shift", dem_shift, "Alignment search bound b");

  // e2e-eval
  auto* ev = app.add_subcommand("e2e-eval", "Run the full pipeline against ground truth");
  std::string ev_scenario, ev_map, ev_content, ev_csv, ev_poses;
  float ev_delta = 4.0f;
  ipt::DemodConfig ev_knobs;
  bool ev_json = false;
  ev->add_option("--scenario", ev_scenario)->required();
  ev->add_option("--map", ev_map)->required();
  ev->add_option("--delta-l", ev_delta);
  ev->add_option("--content", ev_content, "Carrier content PNG (default synthetic)");
  ev->add_option("--per-frame", ev_csv, "Per-frame error CSV output");
  ev->add_option("--poses", ev_poses, "Estimated pose records CSV output");
  ev->add_option("--mean-kernel", ev_knobs.mean_kernel, "Preprocess mean-filter kernel");
  ev->add_option("--open-kernel", ev_knobs.open_kernel, "Morphology OPEN kernel");
  ev->add_option("--close-kernel", ev_knobs.close_kernel, "Morphology CLOSE kernel");
  ev->add_option("--max-shift", ev_knobs.align.max_shift, "Alignment search bound b");
  ev->add_flag("--json", ev_json);

  // bench
  auto* bench = app.add_subcommand("bench", "Demodulate+pose throughput");
  int bw = 640, bh = 360, bframes = 120;
  bool bench_json = false;
  bench->add_option("--width", bw);
  bench->add_option("--height", bh);
  bench->add_option("--frames", bframes);
  bench->add_flag("--json", bench_json);

  // send / listen
  auto* send = app.add_subcommand("send", "Stream poses from a CSV over UDP");
  std::string send_csv, send_addr;
  double send_rate = 120.0;
  send->add_option("--csv", send_csv, "Pose CSV (t,x,y,z,qw,qx,qy,qz)")->required();
  send->add_option("--addr", send_addr, "host:port (default env/localhost:47001)");
  send->add_option("--rate", send_rate, "Datagrams per second; 0 = unthrottled");

  auto* listen = app.add_subcommand("listen", "Receive and validate pose datagrams");
  std::string listen_addr;
  int listen_count = 10;
  double listen_timeout = 10.0;
  bool listen_json = false;
  listen->add_option("--addr", listen_addr, "bind host:port");
  listen->add_option("--count", listen_count, "Stop after this many datagrams");
  listen->add_option("--timeout", listen_timeout, "Seconds to wait");
  listen->add_flag("--json", listen_json);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return cmd_gen_map(gen_out, rows, cols, map_w, map_h, tag_side, ratio_x, ratio_y,
                         family_path, gen_json);
    }
    if (mod->parsed()) return cmd_modulate(mod_in, mod_map, delta_l, out_fps, mod_out);
    if (sim->parsed()) return cmd_simulate(sim_scenario, sim_frames, sim_out);
    if (dem->parsed()) return cmd_demodulate(dem_frames, dem_map, dem_out, dem_shift);
    if (ev->parsed()) {
      return cmd_e2e_eval(ev_scenario, ev_map, ev_delta, ev_content, ev_csv, ev_poses,
                          ev_knobs, ev_json);
    }
    if (bench->parsed()) return cmd_bench(bw, bh, bframes, bench_json);
    if (send->parsed()) return cmd_send(send_csv, send_addr, send_rate);
    if (listen->parsed()) {
      return cmd_listen(listen_addr, listen_count, listen_timeout, listen_json);
    }
  } catch (const ipt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ipt::ParamError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
