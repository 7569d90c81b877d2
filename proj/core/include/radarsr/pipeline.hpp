#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "radarsr/config.hpp"
#include "radarsr/model.hpp"

namespace radarsr {

/// Half-open range of frame ids, written "a:b" ("a:" and ":b" leave a side open, a
/// bare "a" selects one frame).
struct FrameRange {
  int begin = 0;
  int end = std::numeric_limits<int>::max();

  bool contains(int id) const { return id >= begin && id < end; }
  static FrameRange parse(const std::string& text);
};

/// Six-digit zero-padded frame id used as the file stem everywhere.
std::string frame_name(int id);

/// Frame ids of the files `dir/NNNNNN<ext>`, ascending, restricted to `frames`.
std::vector<int> list_frames(const std::filesystem::path& dir, const std::string& ext, const FrameRange& frames = {});

/// Normalized LiDAR target and radar condition for one preprocessed frame.
TrainingExample load_example(const PipelineConfig& config, const std::filesystem::path& prep_dir, int id);

// Each stage reads its inputs, writes to `out` (created if needed) together with the
// effective configuration as out/run.yaml, and returns a one-line summary.

/// Box-world dataset: out/lidar/*.bin, out/radar/*.bin, out/radar_map/*.pwm, out/frames.txt.
std::string run_synth(const PipelineConfig& config, const std::filesystem::path& out, const FrameRange& frames);

/// Alignment, cropping, ground/ceiling removal, radar-guided filtering and projection:
/// out/target/*.rimg, out/cond/*.rimg, out/truth/*.ply, out/radar/*.ply, out/frames.txt.
std::string run_preprocess(const PipelineConfig& config, const std::filesystem::path& in,
                           const std::filesystem::path& out, const FrameRange& frames);

/// Projects every cloud (.bin or .ply) in `in` at the LiDAR geometry into `channels` slices.
std::string run_project(const PipelineConfig& config, const std::filesystem::path& in,
                        const std::filesystem::path& out, const FrameRange& frames, int channels);

/// OS-CFAR over in/radar_map/*.pwm (or *.pwm directly in `in`): out/*.bin and out/*.ply in the radar frame.
std::string run_detect(const PipelineConfig& config, const std::filesystem::path& in,
                       const std::filesystem::path& out, const FrameRange& frames);

/// Trains the denoiser on preprocessed frames: out/model.ckpt, out/loss.txt.
std::string run_train(const PipelineConfig& config, const std::filesystem::path& in,
                      const std::filesystem::path& out, const FrameRange& frames);

/// Heun samples per frame from in/cond: out/*.rimg. `zero_condition` replaces the
/// radar stack with zeros.
std::string run_sample(const PipelineConfig& config, const std::filesystem::path& model,
                       const std::filesystem::path& in, const std::filesystem::path& out, const FrameRange& frames,
                       bool zero_condition);

/// Scores predictions (.rimg, .ply or .bin) against truth clouds with the same frame id:
/// out/metrics.txt (one key=value line per frame), out/summary.txt, out/report.txt, out/cdf/.
std::string run_eval(const PipelineConfig& config, const std::filesystem::path& pred,
                     const std::filesystem::path& truth, const std::filesystem::path& out, const FrameRange& frames);

/// Converts range images and .bin clouds in `in` to ASCII PLY.
std::string run_export(const PipelineConfig& config, const std::filesystem::path& in,
                       const std::filesystem::path& out, const FrameRange& frames);

/// Parses a metrics.txt line "k=v k=v ..." into pairs, in order.
std::vector<std::pair<std::string, std::string>> parse_kv_line(const std::string& line);

}  // namespace radarsr
