#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "ipt/channel_sim.hpp"
#include "ipt/demod.hpp"
#include "ipt/modulate.hpp"

namespace ipt {

// Accuracy/throughput summary over one simulated capture. STD is the RMS
// deviation about ground truth, so MAE <= STD holds unconditionally.
struct EvalReport {
  struct AxisStats {
    double mae = 0;
    double std = 0;
  };
  AxisStats x, y, z;           // meters
  AxisStats yaw, pitch, roll;  // degrees
  double detection_rate = 0;   // frames with >= 1 detection / frames demodulated
  double mean_tags_per_frame = 0;
  double throughput_fps = 0;  // demodulate + pose wall clock
  int frames_demodulated = 0;
  int frames_with_pose = 0;
  std::map<int, int> id_counts;  // how often each tag id was detected
  std::string scenario_name;

  std::string to_json() const;
  std::string to_table() const;
};

struct EvalOptions {
  float delta_l = 4.0f;
  DemodConfig demod;
  ImagePlane content;  // optional carrier video frame; empty = synthetic
  std::filesystem::path per_frame_csv;  // when set, per-frame error/speed rows
  // When set, estimated pose records: t,x,y,z,yaw,pitch,roll,rmse,n_tags.
  std::filesystem::path pose_csv;
};

// Full loop: modulate -> simulate -> demodulate -> solve pose -> compare to
// the simulator's ground truth (aligned by timestamp). Throws ConfigError
// when scenario screen geometry does not match the map.
EvalReport run_e2e_eval(const CaptureScenario& scenario, const TagMapConfig& map,
                        const EvalOptions& options = {});

struct BenchReport {
  int frames = 0;
  double fps_mean = 0;
  double fps_median = 0;
  double ms_per_frame_mean = 0;
  std::string to_json() const;
};

// Throughput of demodulate+pose on a synthetic capture at the given camera
// resolution (640x360 default, an onboard-class setting).
BenchReport run_bench(int width = 640, int height = 360, int frames = 120,
                      uint64_t seed = 7);

}  // namespace ipt
