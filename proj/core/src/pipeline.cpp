#include "radarsr/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "radarsr/cfar.hpp"
#include "radarsr/cloud_io.hpp"
#include "radarsr/diffusion.hpp"
#include "radarsr/errors.hpp"
#include "radarsr/metrics.hpp"
#include "radarsr/preprocess.hpp"
#include "radarsr/range_image_io.hpp"
#include "radarsr/rng.hpp"
#include "radarsr/synth.hpp"

namespace fs = std::filesystem;

namespace radarsr {

namespace {

// Stream ids for SeededRng::derive, one per stage.
constexpr std::uint64_t kGroundStream = 0x67726e64;
constexpr std::uint64_t kTrainStream = 0x7472616e;
constexpr std::uint64_t kSampleStream = 0x73616d70;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.9g", v); }

void prepare_out(const PipelineConfig& config, const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw RuntimeError("cannot create " + out.string() + ": " + ec.message());
  std::ofstream os(out / "run.yaml");
  os << to_yaml(config);
  if (!os) throw RuntimeError("cannot write " + (out / "run.yaml").string());
}

void make_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw RuntimeError("cannot create " + p.string() + ": " + ec.message());
}

// Runs fn(0..n-1) over worker threads. Every task writes only its own outputs; the
// first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void require_dir(const fs::path& p) {
  if (!fs::is_directory(p)) throw ConfigError("not a directory: " + p.string());
}

RangeImage single_channel(const MultiChannelRangeImage& img, const fs::path& path) {
  if (img.channel_count() != 1) throw LoadError(path.string(), 0, "expected a single-channel range image");
  return img.channels.front();
}

void check_geometry(const ImageGeometry& got, const ImageGeometry& want, const fs::path& path) {
  if (got.height != want.height || got.width != want.width || got.fov != want.fov) {
    throw LoadError(path.string(), 0, "image geometry does not match the configuration");
  }
}

struct FrameStamp {
  int id = 0;
  double lidar = 0.0;
  double radar = 0.0;
  RigidTransform pose;
};

void write_frames(const fs::path& path, const std::vector<FrameStamp>& stamps) {
  std::ofstream os(path);
  os << "# id lidar_stamp radar_stamp pose_row_major_3x4\n";
  for (const auto& s : stamps) {
    os << frame_name(s.id) << ' ' << fmt("%.17g", s.lidar) << ' ' << fmt("%.17g", s.radar);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) os << ' ' << fmt("%.17g", s.pose.rotation()(r, c));
      os << ' ' << fmt("%.17g", s.pose.translation()(r));
    }
    os << '\n';
  }
  if (!os) throw RuntimeError("cannot write " + path.string());
}

std::vector<FrameStamp> read_frames(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw LoadError(path.string(), 0, "cannot open");
  std::vector<FrameStamp> out;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    FrameStamp s;
    Eigen::Matrix3d R;
    Eigen::Vector3d t;
    ls >> s.id >> s.lidar >> s.radar;
    for (int r = 0; r < 3; ++r) {
      ls >> R(r, 0) >> R(r, 1) >> R(r, 2) >> t(r);
    }
    std::string extra;
    if (!ls || (ls >> extra)) throw LoadError(path.string(), line_no, "malformed frame line");
    try {
      s.pose = RigidTransform(R, t, "lidar", "world");
    } catch (const ConfigError& e) {
      throw LoadError(path.string(), line_no, e.what());
    }
    out.push_back(s);
  }
  return out;
}

PointCloud read_cloud(const fs::path& path, const std::string& frame_id) {
  if (path.extension() == ".bin") return read_lidar_bin(path, frame_id);
  if (path.extension() == ".ply") return read_ply(path, frame_id);
  if (path.extension() == ".rimg") return backproject(read_range_image(path), frame_id);
  throw ConfigError("unsupported cloud file: " + path.string());
}

// First extension among `exts` that has frames in `dir`.
std::string detect_ext(const fs::path& dir, std::initializer_list<const char*> exts) {
  for (const char* e : exts) {
    if (!list_frames(dir, e).empty()) return e;
  }
  return {};
}

}  // namespace

FrameRange FrameRange::parse(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v < 0) throw ConfigError("bad frame range '" + text + "'");
    return v;
  };
  FrameRange r;
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    r.begin = to_int(text);
    r.end = r.begin + 1;
    return r;
  }
  const std::string a = text.substr(0, colon);
  const std::string b = text.substr(colon + 1);
  if (!a.empty()) r.begin = to_int(a);
  if (!b.empty()) r.end = to_int(b);
  if (r.end < r.begin) throw ConfigError("bad frame range '" + text + "'");
  return r;
}

std::string frame_name(int id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", id);
  return buf;
}

std::vector<int> list_frames(const fs::path& dir, const std::string& ext, const FrameRange& frames) {
  std::vector<int> ids;
  if (!fs::is_directory(dir)) return ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ext) continue;
    const std::string stem = entry.path().stem().string();
    if (stem.size() != 6 || !std::all_of(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    const int id = std::stoi(stem);
    if (frames.contains(id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

TrainingExample load_example(const PipelineConfig& config, const fs::path& prep_dir, int id) {
  const fs::path tpath = prep_dir / "target" / (frame_name(id) + ".rimg");
  const fs::path cpath = prep_dir / "cond" / (frame_name(id) + ".rimg");
  const RangeImage target = single_channel(read_range_image(tpath), tpath);
  check_geometry(target.geometry(), config.sensors.lidar_geometry(), tpath);
  const MultiChannelRangeImage cond = read_range_image(cpath);
  check_geometry(cond.geometry(), config.sensors.radar_geometry(), cpath);
  if (cond.channel_count() != config.sensors.channels) {
    throw LoadError(cpath.string(), 0, "channel count does not match the configuration");
  }
  NormalizedImage t = normalize(target);
  NormalizedImage c = normalize(cond);
  return {std::move(t.values), std::move(t.valid), std::move(c.values)};
}

std::string run_synth(const PipelineConfig& config, const fs::path& out, const FrameRange& frames) {
  prepare_out(config, out);
  for (const char* sub : {"lidar", "radar", "radar_map"}) make_dir(out / sub);
  std::vector<int> ids;
  for (int i = frames.begin; i < std::min(frames.end, config.synth.frames); ++i) ids.push_back(i);
  std::vector<FrameStamp> stamps(ids.size());
  std::vector<std::size_t> lidar_pts(ids.size()), radar_pts(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) {
    const int id = ids[k];
    const SynthFrame f = synth_frame(config.seed, id, config.sensors, config.synth);
    const std::string name = frame_name(id);
    write_lidar_bin(out / "lidar" / (name + ".bin"), f.record.lidar);
    write_lidar_bin(out / "radar" / (name + ".bin"), f.record.radar);
    write_power_map(out / "radar_map" / (name + ".pwm"), f.radar_map);
    stamps[k] = {id, f.record.timestamp, f.record.radar_timestamp, f.record.pose};
    lidar_pts[k] = f.record.lidar.size();
    radar_pts[k] = f.record.radar.size();
  });
  write_frames(out / "frames.txt", stamps);
  const auto nl = std::accumulate(lidar_pts.begin(), lidar_pts.end(), std::size_t{0});
  const auto nr = std::accumulate(radar_pts.begin(), radar_pts.end(), std::size_t{0});
  return "synth: frames=" + std::to_string(ids.size()) + " lidar_points=" + std::to_string(nl) +
         " radar_points=" + std::to_string(nr) + " out=" + out.string();
}

std::string run_preprocess(const PipelineConfig& config, const fs::path& in, const fs::path& out,
                           const FrameRange& frames) {
  require_dir(in);
  std::vector<FrameStamp> all = read_frames(in / "frames.txt");
  std::vector<FrameStamp> stamps;
  for (const auto& s : all) {
    if (frames.contains(s.id)) stamps.push_back(s);
  }
  // Radar sweeps are matched to LiDAR stamps by nearest time.
  std::vector<std::size_t> order(stamps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return stamps[a].radar < stamps[b].radar; });
  std::vector<double> lidar_t, radar_t;
  for (const auto& s : stamps) lidar_t.push_back(s.lidar);
  for (auto i : order) radar_t.push_back(stamps[i].radar);
  const FrameAssociation assoc = associate_frames(lidar_t, radar_t, config.sensors.max_time_skew);

  prepare_out(config, out);
  for (const char* sub : {"target", "cond", "truth", "radar"}) make_dir(out / sub);
  const RigidTransform r2l = config.sensors.extrinsic.radar_to_lidar();
  const auto& fov = config.sensors.fov;
  std::vector<FrameStamp> kept(assoc.pairs.size());
  std::vector<std::size_t> truth_pts(assoc.pairs.size()), radar_pts(assoc.pairs.size());
  parallel_for(assoc.pairs.size(), [&](std::size_t k) {
    const FrameStamp& ls = stamps[assoc.pairs[k].first];
    const FrameStamp& rs = stamps[order[assoc.pairs[k].second]];
    const std::string lname = frame_name(ls.id);
    const std::string rname = frame_name(rs.id);
    const PointCloud lidar = read_lidar_bin(in / "lidar" / (lname + ".bin"), "lidar");
    PointCloud radar_raw;
    if (config.preprocess.radar_source == RadarSource::kPowerMap) {
      radar_raw = detections_to_cloud(os_cfar(read_power_map(in / "radar_map" / (rname + ".pwm")), config.cfar));
    } else {
      radar_raw = read_lidar_bin(in / "radar" / (rname + ".bin"), "radar");
    }
    const PointCloud radar = shared_fov_crop(apply_transform(radar_raw, r2l), fov);
    GroundRemovalParams gp = config.preprocess.ground;
    gp.seed = SeededRng::derive(SeededRng::derive(config.seed, kGroundStream), static_cast<std::uint64_t>(ls.id));
    const GroundRemoval ground = remove_ground_and_ceiling(shared_fov_crop(lidar, fov), gp);
    const PointCloud truth = radar_guided_filter(ground.cloud, radar, config.preprocess.filter);

    write_range_image(out / "target" / (lname + ".rimg"), project(truth, config.sensors.lidar_geometry()).image);
    write_range_image(
        out / "cond" / (lname + ".rimg"),
        slice_multichannel(radar, config.sensors.radar_geometry(), config.sensors.channels, config.sensors.spacing)
            .image);
    write_ply(out / "truth" / (lname + ".ply"), truth);
    write_ply(out / "radar" / (lname + ".ply"), radar);
    kept[k] = {ls.id, ls.lidar, rs.radar, ls.pose};
    truth_pts[k] = truth.size();
    radar_pts[k] = radar.size();
  });
  write_frames(out / "frames.txt", kept);
  const auto nt = std::accumulate(truth_pts.begin(), truth_pts.end(), std::size_t{0});
  const auto nr = std::accumulate(radar_pts.begin(), radar_pts.end(), std::size_t{0});
  return "preprocess: frames=" + std::to_string(kept.size()) + " dropped=" + std::to_string(assoc.dropped) +
         " truth_points=" + std::to_string(nt) + " radar_points=" + std::to_string(nr) + " out=" + out.string();
}

std::string run_project(const PipelineConfig& config, const fs::path& in, const fs::path& out,
                        const FrameRange& frames, int channels) {
  require_dir(in);
  if (channels < 1) throw ConfigError("project: channels must be >= 1");
  const std::string ext = detect_ext(in, {".bin", ".ply"});
  if (ext.empty()) throw ConfigError("project: no .bin or .ply frames in " + in.string());
  const auto ids = list_frames(in, ext, frames);
  prepare_out(config, out);
  std::vector<std::size_t> in_fov(ids.size()), valid(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) {
    const std::string name = frame_name(ids[k]);
    const PointCloud cloud = read_cloud(in / (name + ext), {});
    const auto proj =
        slice_multichannel(cloud, config.sensors.lidar_geometry(), channels, config.sensors.spacing);
    write_range_image(out / (name + ".rimg"), proj.image);
    in_fov[k] = proj.stats.in_fov;
    valid[k] = proj.image.valid_count();
  });
  const auto nf = std::accumulate(in_fov.begin(), in_fov.end(), std::size_t{0});
  const auto nv = std::accumulate(valid.begin(), valid.end(), std::size_t{0});
  const double retention = nf == 0 ? 1.0 : static_cast<double>(nv) / static_cast<double>(nf);
  return "project: frames=" + std::to_string(ids.size()) + " channels=" + std::to_string(channels) +
         " retention=" + fmt("%.4f", retention) + " out=" + out.string();
}

std::string run_detect(const PipelineConfig& config, const fs::path& in, const fs::path& out,
                       const FrameRange& frames) {
  require_dir(in);
  const fs::path dir = fs::is_directory(in / "radar_map") ? in / "radar_map" : in;
  const auto ids = list_frames(dir, ".pwm", frames);
  prepare_out(config, out);
  std::vector<std::size_t> counts(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) {
    const std::string name = frame_name(ids[k]);
    const PointCloud cloud = detections_to_cloud(os_cfar(read_power_map(dir / (name + ".pwm")), config.cfar));
    write_lidar_bin(out / (name + ".bin"), cloud);
    write_ply(out / (name + ".ply"), cloud);
    counts[k] = cloud.size();
  });
  const auto n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  return "detect: frames=" + std::to_string(ids.size()) + " detections=" + std::to_string(n) + " out=" + out.string();
}

std::string run_train(const PipelineConfig& config, const fs::path& in, const fs::path& out,
                      const FrameRange& frames) {
  require_dir(in);
  const auto ids = list_frames(in / "target", ".rimg", frames);
  if (ids.empty()) throw ConfigError("train: no preprocessed frames in " + in.string());
  std::vector<TrainingExample> examples(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) { examples[k] = load_example(config, in, ids[k]); });

  ToyDenoiserConfig mc = config.model_config();
  mc.sigma_data = measure_sigma_data(examples);
  ToyDenoiser model(mc);
  TrainConfig tc = config.train;
  tc.seed = SeededRng::derive(config.seed, kTrainStream);

  prepare_out(config, out);
  const TrainResult result = train(model, examples, tc);
  write_checkpoint(out / "model.ckpt", model);
  std::ofstream loss(out / "loss.txt");
  loss << "# step loss\n";
  for (std::size_t i = 0; i < result.losses.size(); ++i) loss << i << ' ' << num(result.losses[i]) << '\n';
  if (!loss) throw RuntimeError("cannot write " + (out / "loss.txt").string());
  const SmoothedLoss s = smoothed_loss(result.losses);
  return "train: frames=" + std::to_string(ids.size()) + " steps=" + std::to_string(result.losses.size()) +
         " params=" + std::to_string(model.parameter_count()) + " sigma_data=" + fmt("%.4f", mc.sigma_data) +
         " loss_initial=" + fmt("%.5f", s.initial) + " loss_final=" + fmt("%.5f", s.final) + " out=" + out.string();
}

std::string run_sample(const PipelineConfig& config, const fs::path& model_path, const fs::path& in,
                       const fs::path& out, const FrameRange& frames, bool zero_condition) {
  require_dir(in);
  const ToyDenoiser model = read_checkpoint(model_path);
  const ToyDenoiserConfig& mc = model.config();
  const ImageGeometry geom = config.sensors.lidar_geometry();
  if (mc.height != geom.height || mc.width != geom.width || mc.cond_channels != config.sensors.channels) {
    throw ConfigError("sample: checkpoint shape does not match the configuration");
  }
  const auto ids = list_frames(in / "cond", ".rimg", frames);
  if (ids.empty()) throw ConfigError("sample: no condition images in " + (in / "cond").string());
  const auto& sp = config.schedule;
  const NoiseSchedule schedule = make_schedule(sp.sigma_min, sp.sigma_max, sp.rho, sp.steps);
  prepare_out(config, out);
  std::vector<std::size_t> valid(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) {
    const std::string name = frame_name(ids[k]);
    const fs::path cpath = in / "cond" / (name + ".rimg");
    const MultiChannelRangeImage cond_img = read_range_image(cpath);
    check_geometry(cond_img.geometry(), config.sensors.radar_geometry(), cpath);
    Tensor cond = normalize(cond_img).values;
    if (zero_condition) cond.fill(0.0);
    SeededRng rng(SeededRng::derive(SeededRng::derive(config.seed, kSampleStream), static_cast<std::uint64_t>(ids[k])));
    const Tensor x = heun_sample(model, schedule, 1, geom.height, geom.width, cond, rng);
    if (!x.all_finite()) throw RuntimeError("sample: non-finite output for frame " + name);
    const RangeImage img = from_prediction(x, geom, config.sample.valid_threshold);
    write_range_image(out / (name + ".rimg"), img);
    valid[k] = img.valid_count();
  });
  const auto nv = std::accumulate(valid.begin(), valid.end(), std::size_t{0});
  return "sample: frames=" + std::to_string(ids.size()) + " steps=" + std::to_string(sp.steps) +
         " zero_condition=" + (zero_condition ? "1" : "0") + " valid_pixels=" + std::to_string(nv) +
         " out=" + out.string();
}

std::string run_eval(const PipelineConfig& config, const fs::path& pred, const fs::path& truth, const fs::path& out,
                     const FrameRange& frames) {
  require_dir(pred);
  require_dir(truth);
  const std::string pext = detect_ext(pred, {".rimg", ".ply", ".bin"});
  const std::string text = detect_ext(truth, {".ply", ".bin", ".rimg"});
  if (pext.empty() || text.empty()) throw ConfigError("eval: no frames found");
  const auto pred_ids = list_frames(pred, pext, frames);
  const auto truth_ids = list_frames(truth, text, frames);
  std::vector<int> ids;
  std::set_intersection(pred_ids.begin(), pred_ids.end(), truth_ids.begin(), truth_ids.end(), std::back_inserter(ids));
  if (ids.empty()) throw ConfigError("eval: prediction and truth share no frame ids");

  prepare_out(config, out);
  if (config.metrics.write_cdf) make_dir(out / "cdf");
  std::vector<std::string> rows(ids.size());
  std::vector<double> cd(ids.size()), mh(ids.size()), fs_(ids.size());
  parallel_for(ids.size(), [&](std::size_t k) {
    const std::string name = frame_name(ids[k]);
    const PointCloud p = read_cloud(pred / (name + pext), "lidar");
    const PointCloud t = read_cloud(truth / (name + text), "lidar");
    std::string row = "frame=" + name;
    if (p.empty() || t.empty()) {
      // Nothing to match against: record the frame as maximally wrong.
      cd[k] = mh[k] = std::numeric_limits<double>::infinity();
      fs_[k] = 0.0;
      row += " cd=inf mhd=inf fscore=0 precision=0 recall=0";
    } else {
      const MetricReport r = evaluate_clouds(p, t, config.metrics.tau);
      cd[k] = r.cd;
      mh[k] = r.mhd;
      fs_[k] = r.fscore;
      row += " cd=" + num(r.cd) + " mhd=" + num(r.mhd) + " fscore=" + num(r.fscore) + " precision=" +
             num(r.precision) + " recall=" + num(r.recall);
      if (config.metrics.write_cdf) {
        std::vector<double> d = r.pred_to_truth;
        d.insert(d.end(), r.truth_to_pred.begin(), r.truth_to_pred.end());
        std::ofstream os(out / "cdf" / (name + ".txt"));
        write_cdf(os, empirical_cdf(std::move(d)));
        if (!os) throw RuntimeError("cannot write cdf for frame " + name);
      }
    }
    row += " n_pred=" + std::to_string(p.size()) + " n_truth=" + std::to_string(t.size());
    rows[k] = row;
  });

  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  std::ofstream metrics(out / "metrics.txt");
  for (const auto& r : rows) metrics << r << '\n';
  std::ofstream summary(out / "summary.txt");
  summary << "frames=" << ids.size() << "\nmean_cd=" << num(mean(cd)) << "\nmean_mhd=" << num(mean(mh))
          << "\nmean_fscore=" << num(mean(fs_)) << "\ntau=" << num(config.metrics.tau) << '\n';
  std::ofstream report(out / "report.txt");
  report << "frame      CD[m]      MHD[m]     F-score[%]\n";
  for (std::size_t k = 0; k < ids.size(); ++k) {
    char line[128];
    std::snprintf(line, sizeof line, "%s  %9.4f  %9.4f  %9.2f\n", frame_name(ids[k]).c_str(), cd[k], mh[k], fs_[k]);
    report << line;
  }
  char line[128];
  std::snprintf(line, sizeof line, "mean    %9.4f  %9.4f  %9.2f\n", mean(cd), mean(mh), mean(fs_));
  report << line;
  if (!metrics || !summary || !report) throw RuntimeError("cannot write eval outputs in " + out.string());
  return "eval: frames=" + std::to_string(ids.size()) + " mean_cd=" + fmt("%.4f", mean(cd)) +
         " mean_mhd=" + fmt("%.4f", mean(mh)) + " mean_fscore=" + fmt("%.2f", mean(fs_)) + " out=" + out.string();
}

std::string run_export(const PipelineConfig& config, const fs::path& in, const fs::path& out,
                       const FrameRange& frames) {
  require_dir(in);
  std::vector<std::pair<int, std::string>> items;
  for (const char* ext : {".rimg", ".bin"}) {
    for (int id : list_frames(in, ext, frames)) items.emplace_back(id, ext);
  }
  if (items.empty()) throw ConfigError("export: no .rimg or .bin frames in " + in.string());
  prepare_out(config, out);
  std::vector<std::size_t> counts(items.size());
  parallel_for(items.size(), [&](std::size_t k) {
    const std::string name = frame_name(items[k].first);
    const PointCloud cloud = read_cloud(in / (name + items[k].second), {});
    write_ply(out / (name + ".ply"), cloud);
    counts[k] = cloud.size();
  });
  const auto n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  return "export: files=" + std::to_string(items.size()) + " points=" + std::to_string(n) + " out=" + out.string();
}

std::vector<std::pair<std::string, std::string>> parse_kv_line(const std::string& line) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("not a key=value token: '" + tok + "'");
    out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return out;
}

}  // namespace radarsr
