#include "ipt/channel_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ipt/color.hpp"

namespace ipt {

namespace {

constexpr double kPi = 3.14159265358979323846;

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Box-Muller on top of mt19937_64; self-contained so the byte stream does
// not depend on the standard library's normal_distribution.
class GaussianRng {
 public:
  explicit GaussianRng(uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0;
};

// Bilinear sample at pixel-center coordinates, zero outside the image.
inline double sample_black_outside(const ImagePlane& img, double x, double y, int c) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double wx = x - x0;
  const double wy = y - y0;
  auto px = [&](int xi, int yi) -> double {
    if (xi < 0 || yi < 0 || xi >= img.width() || yi >= img.height()) return 0.0;
    return img.at_u8(xi, yi, c);
  };
  return (1 - wy) * ((1 - wx) * px(x0, y0) + wx * px(x0 + 1, y0)) +
         wy * ((1 - wx) * px(x0, y0 + 1) + wx * px(x0 + 1, y0 + 1));
}

// Row coverage mask for an even-odd polygon fill at pixel centers.
std::vector<std::pair<int, int>> polygon_row_spans(
    const std::vector<Eigen::Vector2d>& poly, double yc, int width) {
  std::vector<double> xs;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % n];
    if ((a.y() <= yc && b.y() > yc) || (b.y() <= yc && a.y() > yc)) {
      xs.push_back(a.x() + (yc - a.y()) / (b.y() - a.y()) * (b.x() - a.x()));
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<int, int>> spans;
  for (size_t i = 0; i + 1 < xs.size(); i += 2) {
    const int x0 = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(xs[i + 1] - 0.5)));
    if (x0 <= x1) spans.emplace_back(x0, x1);
  }
  return spans;
}

}  // namespace

ImagePlane render_view(const ImagePlane& screen_frame, const ScreenGeometry& geometry,
                       const CameraIntrinsics& intr, const Pose& camera_to_world) {
  screen_frame.require(ColorSpace::SRGB8, "render_view");
  intr.validate();
  if (camera_to_world.convention != FrameConvention::CAMERA_TO_WORLD) {
    throw ParamError("render_view: CAMERA_TO_WORLD pose required");
  }
  camera_to_world.validate();
  if (screen_frame.width() != geometry.width_px ||
      screen_frame.height() != geometry.height_px) {
    throw ShapeError("render_view: screen frame does not match geometry");
  }

  const Eigen::Matrix3d& r = camera_to_world.rotation;
  const Eigen::Vector3d c = camera_to_world.translation;
  // Optical axis must descend onto the plane from above.
  if (c.z() <= 0 || r.col(2).z() >= -1e-12) {
    throw PipelineError("render_view: camera does not face the screen plane");
  }

  ImagePlane out = ImagePlane::srgb8(intr.width, intr.height);
  const Eigen::Vector3d dx = r.col(0) / intr.fx;  // per-pixel ray increment
  for (int v = 0; v < intr.height; ++v) {
    Eigen::Vector3d ray = r.col(0) * ((0 - intr.u0) / intr.fx) +
                          r.col(1) * ((v - intr.v0) / intr.fy) + r.col(2);
    uint8_t* row = out.row_u8(v);
    for (int u = 0; u < intr.width; ++u, ray += dx) {
      if (ray.z() >= -1e-15) continue;  // ray escapes the plane: black
      const double t = -c.z() / ray.z();
      const double wx = c.x() + t * ray.x();
      const double wy = c.y() + t * ray.y();
      const double ex = wx / geometry.ratio_x + geometry.width_px / 2.0;
      const double ey = geometry.height_px / 2.0 - wy / geometry.ratio_y;
      for (int ch = 0; ch < 3; ++ch) {
        const double s = sample_black_outside(screen_frame, ex - 0.5, ey - 0.5, ch);
        row[3 * u + ch] = static_cast<uint8_t>(std::lround(std::clamp(s, 0.0, 255.0)));
      }
    }
  }
  return out;
}

ImagePlane apply_motion(const ImagePlane& frame, int dx, int dy) {
  if (std::abs(dx) > 32 || std::abs(dy) > 32) {
    throw ParamError("apply_motion: |shift| must be <= 32");
  }
  if (!frame.is_u8()) throw ShapeError("apply_motion: u8 plane required");
  ImagePlane out(frame.width(), frame.height(), frame.channels(), frame.space());
  const int w = frame.width(), h = frame.height(), ch = frame.channels();
  for (int y = 0; y < h; ++y) {
    const int sy = std::clamp(y - dy, 0, h - 1);
    for (int x = 0; x < w; ++x) {
      const int sx = std::clamp(x - dx, 0, w - 1);
      for (int c = 0; c < ch; ++c) out.at_u8(x, y, c) = frame.at_u8(sx, sy, c);
    }
  }
  return out;
}

ImagePlane apply_noise(const ImagePlane& frame, double sigma, uint64_t seed) {
  if (sigma < 0) throw ParamError("apply_noise: sigma must be >= 0");
  if (sigma == 0) return frame;
  frame.require(ColorSpace::SRGB8, "apply_noise");
  ImagePlane lab = rgb_to_lab(frame, LabScale::Byte);
  GaussianRng rng(splitmix64(seed));
  float* data = lab.f32().data();
  const size_t px = static_cast<size_t>(frame.width()) * frame.height();
  for (size_t i = 0; i < px; ++i) {
    const double l = data[3 * i] + sigma * rng.next();
    data[3 * i] = static_cast<float>(std::clamp(l, 0.0, 255.0));
  }
  return lab_to_rgb(lab, LabScale::Byte);
}

ImagePlane apply_shadow(const ImagePlane& frame,
                        const std::vector<Eigen::Vector2d>& polygon_px,
                        double attenuation) {
  if (polygon_px.size() < 3) throw ParamError("apply_shadow: polygon needs >= 3 vertices");
  if (attenuation < 0 || attenuation > 1) {
    throw ParamError("apply_shadow: attenuation must be in [0, 1]");
  }
  if (attenuation == 1.0) return frame;
  frame.require(ColorSpace::SRGB8, "apply_shadow");
  ImagePlane lab = rgb_to_lab(frame, LabScale::Byte);
  float* data = lab.f32().data();
  for (int y = 0; y < frame.height(); ++y) {
    for (const auto& [x0, x1] : polygon_row_spans(polygon_px, y + 0.5, frame.width())) {
      for (int x = x0; x <= x1; ++x) {
        const size_t i = static_cast<size_t>(y) * frame.width() + x;
        data[3 * i] = static_cast<float>(data[3 * i] * attenuation);
      }
    }
  }
  return lab_to_rgb(lab, LabScale::Byte);
}

void CaptureScenario::validate() const {
  intrinsics.validate();
  if (screen.width_px <= 0 || screen.height_px <= 0 || screen.ratio_x <= 0 ||
      screen.ratio_y <= 0) {
    throw ConfigError("scenario: bad screen geometry");
  }
  if (trajectory.empty()) throw ConfigError("scenario: empty trajectory");
  if (camera_fps <= 0) throw ConfigError("scenario: camera_fps must be positive");
  if (noise_sigma < 0) throw ConfigError("scenario: noise_sigma must be >= 0");
  if (shadow && shadow->polygon_world.size() < 3) {
    throw ConfigError("scenario: shadow polygon needs >= 3 vertices");
  }
  for (const TimedPose& tp : trajectory) tp.pose.validate();
}

CaptureResult simulate_capture(const CaptureScenario& scenario,
                               const std::vector<ImagePlane>& modulated) {
  scenario.validate();
  if (modulated.empty()) throw ParamError("simulate_capture: no modulated frames");

  // Shadow lives on the screen plane; attenuate the projected frames once.
  std::unordered_map<size_t, ImagePlane> shadowed;
  auto screen_frame = [&](size_t idx) -> const ImagePlane& {
    if (!scenario.shadow || scenario.shadow->attenuation == 1.0) return modulated[idx];
    auto it = shadowed.find(idx);
    if (it == shadowed.end()) {
      std::vector<Eigen::Vector2d> poly_px;
      poly_px.reserve(scenario.shadow->polygon_world.size());
      for (const auto& w : scenario.shadow->polygon_world) {
        poly_px.push_back(scenario.screen.world_to_screen_px(w));
      }
      it = shadowed
               .emplace(idx, apply_shadow(modulated[idx], poly_px,
                                          scenario.shadow->attenuation))
               .first;
    }
    return it->second;
  };

  CaptureResult result;
  result.frames.reserve(scenario.trajectory.size());
  result.ground_truth = scenario.trajectory;
  for (size_t k = 0; k < scenario.trajectory.size(); ++k) {
    const size_t idx = k % modulated.size();
    ImagePlane view = render_view(screen_frame(idx), scenario.screen,
                                  scenario.intrinsics, scenario.trajectory[k].pose);
    if (scenario.noise_sigma > 0) {
      view = apply_noise(view, scenario.noise_sigma, splitmix64(scenario.seed) ^ k);
    }
    result.frames.push_back(std::move(view));
  }
  return result;
}

CaptureScenario CaptureScenario::load(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw ConfigError("scenario: cannot open " + json_path.string());
  nlohmann::json j;
  in >> j;
  CaptureScenario s;
  const auto& ji = j.at("intrinsics");
  s.intrinsics.fx = ji.at("fx").get<double>();
  s.intrinsics.fy = ji.at("fy").get<double>();
  s.intrinsics.u0 = ji.at("u0").get<double>();
  s.intrinsics.v0 = ji.at("v0").get<double>();
  s.intrinsics.width = ji.at("width").get<int>();
  s.intrinsics.height = ji.at("height").get<int>();
  const auto& js = j.at("screen");
  s.screen.width_px = js.at("width_px").get<int>();
  s.screen.height_px = js.at("height_px").get<int>();
  s.screen.ratio_x = js.at("ratio_x").get<double>();
  s.screen.ratio_y = js.at("ratio_y").get<double>();
  for (const auto& jt : j.at("trajectory")) {
    TimedPose tp;
    tp.t = jt.at("t").get<double>();
    const auto& pos = jt.at("position");
    tp.pose.translation = {pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};
    const auto& q = jt.at("quaternion");
    tp.pose.rotation = rotation_from_wxyz(
        {q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>()});
    tp.pose.convention = FrameConvention::CAMERA_TO_WORLD;
    s.trajectory.push_back(tp);
  }
  s.camera_fps = j.value("camera_fps", 120.0);
  s.noise_sigma = j.value("noise_sigma", 0.0);
  s.seed = j.value("seed", uint64_t{0});
  if (j.contains("shadow") && !j.at("shadow").is_null()) {
    ShadowSpec shadow;
    for (const auto& v : j.at("shadow").at("polygon")) {
      shadow.polygon_world.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    shadow.attenuation = j.at("shadow").at("attenuation").get<double>();
    s.shadow = std::move(shadow);
  }
  s.validate();
  return s;
}

void CaptureScenario::save(const std::filesystem::path& json_path) const {
  validate();
  nlohmann::json j;
  j["intrinsics"] = {{"fx", intrinsics.fx}, {"fy", intrinsics.fy},
                     {"u0", intrinsics.u0}, {"v0", intrinsics.v0},
                     {"width", intrinsics.width}, {"height", intrinsics.height}};
  j["screen"] = {{"width_px", screen.width_px}, {"height_px", screen.height_px},
                 {"ratio_x", screen.ratio_x}, {"ratio_y", screen.ratio_y}};
  j["trajectory"] = nlohmann::json::array();
  for (const TimedPose& tp : trajectory) {
    const Eigen::Vector4d q = quaternion_wxyz(tp.pose.rotation);
    j["trajectory"].push_back(
        {{"t", tp.t},
         {"position", {tp.pose.translation.x(), tp.pose.translation.y(), tp.pose.translation.z()}},
         {"quaternion", {q[0], q[1], q[2], q[3]}}});
  }
  j["camera_fps"] = camera_fps;
  j["noise_sigma"] = noise_sigma;
  j["seed"] = seed;
  if (shadow) {
    nlohmann::json poly = nlohmann::json::array();
    for (const auto& v : shadow->polygon_world) poly.push_back({v.x(), v.y()});
    j["shadow"] = {{"polygon", poly}, {"attenuation", shadow->attenuation}};
  }
  std::ofstream out(json_path);
  if (!out) throw PipelineError("scenario: cannot write " + json_path.string());
  out << j.dump(2) << '\n';
}

void write_ground_truth_csv(const std::filesystem::path& path,
                            const std::vector<TimedPose>& poses) {
  std::ofstream out(path);
  if (!out) throw PipelineError("ground truth: cannot write " + path.string());
  out << "t,x,y,z,qw,qx,qy,qz\n";
  out.precision(12);
  for (const TimedPose& tp : poses) {
    const Eigen::Vector4d q = quaternion_wxyz(tp.pose.rotation);
    out << tp.t << ',' << tp.pose.translation.x() << ',' << tp.pose.translation.y()
        << ',' << tp.pose.translation.z() << ',' << q[0] << ',' << q[1] << ',' << q[2]
        << ',' << q[3] << '\n';
  }
}

std::vector<TimedPose> read_ground_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("ground truth: cannot open " + path.string());
  std::vector<TimedPose> poses;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("t,", 0) == 0) continue;  // header
    }
    std::istringstream ls(line);
    std::array<double, 8> v{};
    char comma;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!(ls >> v[i])) throw ConfigError("ground truth: bad line '" + line + "'");
      if (i + 1 < v.size()) ls >> comma;
    }
    TimedPose tp;
    tp.t = v[0];
    tp.pose.translation = {v[1], v[2], v[3]};
    tp.pose.rotation = rotation_from_wxyz({v[4], v[5], v[6], v[7]});
    tp.pose.convention = FrameConvention::CAMERA_TO_WORLD;
    poses.push_back(tp);
  }
  return poses;
}

}  // namespace ipt
