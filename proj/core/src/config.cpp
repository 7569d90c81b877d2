#include "radarsr/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "radarsr/diffusion.hpp"
#include "radarsr/errors.hpp"
#include "radarsr/rng.hpp"

namespace radarsr {

RigidTransform ExtrinsicConfig::radar_to_lidar() const {
  return RigidTransform::from_rpy(rpy.x(), rpy.y(), rpy.z(), translation, "radar", "lidar");
}

ToyDenoiserConfig PipelineConfig::model_config() const {
  ToyDenoiserConfig m = model;
  m.height = sensors.lidar_height;
  m.width = sensors.lidar_width;
  m.cond_channels = sensors.channels;
  m.seed = SeededRng::derive(seed, 0x6d6f64656cULL);
  return m;
}

void PipelineConfig::validate() const {
  sensors.lidar_geometry().validate();
  sensors.radar_geometry().validate();
  if (sensors.channels < 1 || sensors.channels > 32) throw ConfigError("sensors.channels must be in [1, 32]");
  if (!(sensors.max_time_skew >= 0.0)) throw ConfigError("sensors.max_time_skew must be >= 0");
  sensors.extrinsic.radar_to_lidar();
  if (synth.frames < 1 || synth.lidar_oversample < 1 || synth.map_range_bins < 1) {
    throw ConfigError("synth: counts must be >= 1");
  }
  if (!(synth.radar_ray_fraction > 0.0 && synth.radar_ray_fraction <= 1.0)) {
    throw ConfigError("synth.radar_ray_fraction must be in (0, 1]");
  }
  if (!(synth.ghost_rate >= 0.0 && synth.ghost_rate < 1.0) ||
      !(synth.penetration_prob >= 0.0 && synth.penetration_prob <= 1.0) || !(synth.range_jitter >= 0.0) ||
      !(synth.lidar_azimuth_margin >= 0.0) || !(synth.frame_period > 0.0)) {
    throw ConfigError("synth: probabilities/jitter out of range");
  }
  if (preprocess.filter.eps <= 0.0 || preprocess.filter.min_pts < 1) throw ConfigError("preprocess.dbscan invalid");
  cfar.validate();
  make_schedule(schedule.sigma_min, schedule.sigma_max, schedule.rho, schedule.steps);
  const auto m = model_config();
  m.validate();
  if (m.cond_height() != sensors.radar_height || m.cond_width() != sensors.radar_width) {
    throw ConfigError("radar image must be (lidar_height/2) x (lidar_width/(2*horizontal_factor)) = " +
                      std::to_string(m.cond_height()) + "x" + std::to_string(m.cond_width()));
  }
  train.validate();
  if (!(metrics.tau > 0.0)) throw ConfigError("metrics.tau must be > 0");
  if (!(sample.valid_threshold > -1.0 && sample.valid_threshold < 1.0)) {
    throw ConfigError("sample.valid_threshold must be in (-1, 1)");
  }
}

namespace {

// Reads the keys of one mapping, rejecting any it does not know.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (present() && !node_.IsMap()) throw ConfigError(path_ + ": expected a mapping");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0 || !present()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + qualified(key) + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!present()) return;
    const YAML::Node value = std::as_const(node_)[key];
    if (!value) return;
    try {
      out = value.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("config key '" + qualified(key) + "' has the wrong type");
    }
  }
  void get_vec3(const char* key, Eigen::Vector3d& out) {
    std::vector<double> v{out.x(), out.y(), out.z()};
    get(key, v);
    if (v.size() != 3) throw ConfigError("config key '" + qualified(key) + "' needs 3 values");
    out = {v[0], v[1], v[2]};
  }
  Section sub(const char* key) {
    seen_.insert(key);
    return Section(present() ? std::as_const(node_)[key] : YAML::Node(), qualified(key));
  }

 private:
  // Missing sections and "key:" with no value both read as empty.
  bool present() const { return node_ && !node_.IsNull(); }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename E>
void get_enum(Section& s, const char* key, E& out, const std::map<std::string, E>& names) {
  std::string current;
  for (const auto& [k, v] : names) {
    if (v == out) current = k;
  }
  std::string value = current;
  s.get(key, value);
  const auto it = names.find(value);
  if (it == names.end()) throw ConfigError(std::string("config key '") + key + "' has unknown value '" + value + "'");
  out = it->second;
}

const std::map<std::string, SliceSpacing> kSpacing{{"uniform", SliceSpacing::kUniform}, {"log", SliceSpacing::kLog}};
const std::map<std::string, CfarWindow> kWindow{{"range", CfarWindow::kRange},
                                                {"range_azimuth", CfarWindow::kRangeAzimuth}};
const std::map<std::string, RadarSource> kSource{{"cloud", RadarSource::kCloud}, {"map", RadarSource::kPowerMap}};

void visit(Section& root, PipelineConfig& c) {
  root.get("seed", c.seed);
  {
    auto s = root.sub("sensors");
    {
      auto f = s.sub("fov");
      f.get("theta_min", c.sensors.fov.theta_min);
      f.get("theta_max", c.sensors.fov.theta_max);
      f.get("phi_min", c.sensors.fov.phi_min);
      f.get("phi_max", c.sensors.fov.phi_max);
      f.get("r_min", c.sensors.fov.r_min);
      f.get("r_max", c.sensors.fov.r_max);
    }
    {
      auto l = s.sub("lidar_image");
      l.get("height", c.sensors.lidar_height);
      l.get("width", c.sensors.lidar_width);
    }
    {
      auto r = s.sub("radar_image");
      r.get("height", c.sensors.radar_height);
      r.get("width", c.sensors.radar_width);
    }
    s.get("channels", c.sensors.channels);
    get_enum(s, "slice_spacing", c.sensors.spacing, kSpacing);
    {
      auto e = s.sub("radar_to_lidar");
      e.get_vec3("translation", c.sensors.extrinsic.translation);
      e.get_vec3("rpy", c.sensors.extrinsic.rpy);
    }
    s.get("max_time_skew", c.sensors.max_time_skew);
  }
  {
    auto s = root.sub("synth");
    s.get("frames", c.synth.frames);
    s.get("lidar_oversample", c.synth.lidar_oversample);
    s.get("lidar_azimuth_margin", c.synth.lidar_azimuth_margin);
    s.get("radar_ray_fraction", c.synth.radar_ray_fraction);
    s.get("range_jitter", c.synth.range_jitter);
    s.get("ghost_rate", c.synth.ghost_rate);
    s.get("penetration_prob", c.synth.penetration_prob);
    s.get("frame_period", c.synth.frame_period);
    s.get("radar_time_offset", c.synth.radar_time_offset);
    s.get("map_range_bins", c.synth.map_range_bins);
  }
  {
    auto s = root.sub("preprocess");
    get_enum(s, "radar_source", c.preprocess.radar_source, kSource);
    {
      auto g = s.sub("ground");
      g.get("iterations", c.preprocess.ground.iterations);
      g.get("dist_tol", c.preprocess.ground.dist_tol);
      g.get("angle_tol_deg", c.preprocess.ground.angle_tol_deg);
      g.get("min_inlier_fraction", c.preprocess.ground.min_inlier_fraction);
      g.get("flip_pass", c.preprocess.ground.flip_pass);
    }
    {
      auto d = s.sub("dbscan");
      d.get("eps", c.preprocess.filter.eps);
      d.get("min_pts", c.preprocess.filter.min_pts);
    }
  }
  {
    auto s = root.sub("cfar");
    s.get("guard", c.cfar.guard);
    s.get("train", c.cfar.train);
    s.get("k_rank", c.cfar.k_rank);
    s.get("alpha", c.cfar.alpha);
    get_enum(s, "window", c.cfar.window, kWindow);
  }
  {
    auto s = root.sub("diffusion");
    s.get("sigma_min", c.schedule.sigma_min);
    s.get("sigma_max", c.schedule.sigma_max);
    s.get("rho", c.schedule.rho);
    s.get("steps", c.schedule.steps);
  }
  {
    auto s = root.sub("model");
    s.get("base_channels", c.model.base_channels);
    s.get("cond_features", c.model.cond_features);
    s.get("horizontal_factor", c.model.horizontal_factor);
  }
  {
    auto s = root.sub("train");
    s.get("learning_rate", c.train.learning_rate);
    s.get("steps", c.train.steps);
    s.get("batch_size", c.train.batch_size);
    s.get("p_mean", c.train.p_mean);
    s.get("p_std", c.train.p_std);
    s.get("grad_clip", c.train.grad_clip);
    s.get("log_every", c.train.log_every);
    auto w = s.sub("weights");
    w.get("mse", c.train.weights.mse);
    w.get("perceptual", c.train.weights.perceptual);
    w.get("pixel", c.train.weights.pixel);
  }
  {
    auto s = root.sub("sample");
    s.get("valid_threshold", c.sample.valid_threshold);
  }
  {
    auto s = root.sub("metrics");
    s.get("tau", c.metrics.tau);
    s.get("write_cdf", c.metrics.write_cdf);
  }
}

}  // namespace

PipelineConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  PipelineConfig c;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  {
    Section s(root, "");
    visit(s, c);
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string to_yaml(const PipelineConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  auto vec = [&](const Eigen::Vector3d& v) {
    out << YAML::Flow << YAML::BeginSeq << v.x() << v.y() << v.z() << YAML::EndSeq;
  };
  auto name_of = [](auto value, const auto& names) {
    for (const auto& [k, v] : names) {
      if (v == value) return k;
    }
    return std::string{};
  };
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "sensors" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "fov" << YAML::Value << YAML::BeginMap << YAML::Key << "theta_min" << YAML::Value
      << c.sensors.fov.theta_min << YAML::Key << "theta_max" << YAML::Value << c.sensors.fov.theta_max << YAML::Key
      << "phi_min" << YAML::Value << c.sensors.fov.phi_min << YAML::Key << "phi_max" << YAML::Value
      << c.sensors.fov.phi_max << YAML::Key << "r_min" << YAML::Value << c.sensors.fov.r_min << YAML::Key << "r_max"
      << YAML::Value << c.sensors.fov.r_max << YAML::EndMap;
  out << YAML::Key << "lidar_image" << YAML::Value << YAML::BeginMap << YAML::Key << "height" << YAML::Value
      << c.sensors.lidar_height << YAML::Key << "width" << YAML::Value << c.sensors.lidar_width << YAML::EndMap;
  out << YAML::Key << "radar_image" << YAML::Value << YAML::BeginMap << YAML::Key << "height" << YAML::Value
      << c.sensors.radar_height << YAML::Key << "width" << YAML::Value << c.sensors.radar_width << YAML::EndMap;
  out << YAML::Key << "channels" << YAML::Value << c.sensors.channels;
  out << YAML::Key << "slice_spacing" << YAML::Value << name_of(c.sensors.spacing, kSpacing);
  out << YAML::Key << "radar_to_lidar" << YAML::Value << YAML::BeginMap << YAML::Key << "translation" << YAML::Value;
  vec(c.sensors.extrinsic.translation);
  out << YAML::Key << "rpy" << YAML::Value;
  vec(c.sensors.extrinsic.rpy);
  out << YAML::EndMap;
  out << YAML::Key << "max_time_skew" << YAML::Value << c.sensors.max_time_skew;
  out << YAML::EndMap;

  out << YAML::Key << "synth" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "frames" << YAML::Value << c.synth.frames;
  out << YAML::Key << "lidar_oversample" << YAML::Value << c.synth.lidar_oversample;
  out << YAML::Key << "lidar_azimuth_margin" << YAML::Value << c.synth.lidar_azimuth_margin;
  out << YAML::Key << "radar_ray_fraction" << YAML::Value << c.synth.radar_ray_fraction;
  out << YAML::Key << "range_jitter" << YAML::Value << c.synth.range_jitter;
  out << YAML::Key << "ghost_rate" << YAML::Value << c.synth.ghost_rate;
  out << YAML::Key << "penetration_prob" << YAML::Value << c.synth.penetration_prob;
  out << YAML::Key << "frame_period" << YAML::Value << c.synth.frame_period;
  out << YAML::Key << "radar_time_offset" << YAML::Value << c.synth.radar_time_offset;
  out << YAML::Key << "map_range_bins" << YAML::Value << c.synth.map_range_bins;
  out << YAML::EndMap;

  out << YAML::Key << "preprocess" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "radar_source" << YAML::Value << name_of(c.preprocess.radar_source, kSource);
  out << YAML::Key << "ground" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "iterations" << YAML::Value << c.preprocess.ground.iterations;
  out << YAML::Key << "dist_tol" << YAML::Value << c.preprocess.ground.dist_tol;
  out << YAML::Key << "angle_tol_deg" << YAML::Value << c.preprocess.ground.angle_tol_deg;
  out << YAML::Key << "min_inlier_fraction" << YAML::Value << c.preprocess.ground.min_inlier_fraction;
  out << YAML::Key << "flip_pass" << YAML::Value << c.preprocess.ground.flip_pass;
  out << YAML::EndMap;
  out << YAML::Key << "dbscan" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "eps" << YAML::Value << c.preprocess.filter.eps;
  out << YAML::Key << "min_pts" << YAML::Value << c.preprocess.filter.min_pts;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "cfar" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "guard" << YAML::Value << c.cfar.guard;
  out << YAML::Key << "train" << YAML::Value << c.cfar.train;
  out << YAML::Key << "k_rank" << YAML::Value << c.cfar.k_rank;
  out << YAML::Key << "alpha" << YAML::Value << c.cfar.alpha;
  out << YAML::Key << "window" << YAML::Value << name_of(c.cfar.window, kWindow);
  out << YAML::EndMap;

  out << YAML::Key << "diffusion" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sigma_min" << YAML::Value << c.schedule.sigma_min;
  out << YAML::Key << "sigma_max" << YAML::Value << c.schedule.sigma_max;
  out << YAML::Key << "rho" << YAML::Value << c.schedule.rho;
  out << YAML::Key << "steps" << YAML::Value << c.schedule.steps;
  out << YAML::EndMap;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "base_channels" << YAML::Value << c.model.base_channels;
  out << YAML::Key << "cond_features" << YAML::Value << c.model.cond_features;
  out << YAML::Key << "horizontal_factor" << YAML::Value << c.model.horizontal_factor;
  out << YAML::EndMap;

  out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "learning_rate" << YAML::Value << c.train.learning_rate;
  out << YAML::Key << "steps" << YAML::Value << c.train.steps;
  out << YAML::Key << "batch_size" << YAML::Value << c.train.batch_size;
  out << YAML::Key << "p_mean" << YAML::Value << c.train.p_mean;
  out << YAML::Key << "p_std" << YAML::Value << c.train.p_std;
  out << YAML::Key << "grad_clip" << YAML::Value << c.train.grad_clip;
  out << YAML::Key << "log_every" << YAML::Value << c.train.log_every;
  out << YAML::Key << "weights" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mse" << YAML::Value << c.train.weights.mse;
  out << YAML::Key << "perceptual" << YAML::Value << c.train.weights.perceptual;
  out << YAML::Key << "pixel" << YAML::Value << c.train.weights.pixel;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "sample" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "valid_threshold" << YAML::Value << c.sample.valid_threshold;
  out << YAML::EndMap;

  out << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tau" << YAML::Value << c.metrics.tau;
  out << YAML::Key << "write_cdf" << YAML::Value << c.metrics.write_cdf;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace radarsr
