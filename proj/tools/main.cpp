// radarsr: command line driver for the radar super-resolution pipeline.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 runtime or input error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "radarsr/config.hpp"
#include "radarsr/errors.hpp"
#include "radarsr/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 3;

struct Args {
  std::string config;
  std::string in;
  std::string out;
  std::string model;
  std::string pred;
  std::string truth;
  std::string frames;
  std::optional<std::uint64_t> seed;
  std::optional<int> channels;
  std::optional<int> steps;
  bool zero_condition = false;
};

fs::path required(const std::string& value, const char* flag) {
  if (value.empty()) throw radarsr::ConfigError(std::string("missing required option ") + flag);
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar-to-LiDAR super-resolution pipeline"};
  app.require_subcommand(1, 1);
  Args a;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", a.config, "YAML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", a.seed, "Override the configured seed");
    sub->add_option("--frames", a.frames, "Frame id range a:b (half-open)");
    sub->add_option("--out", a.out, "Output directory")->required();
  };

  auto* synth = app.add_subcommand("synth", "Generate the synthetic box-world dataset");
  common(synth);
  auto* prep = app.add_subcommand("preprocess", "Align, crop, filter and project a dataset");
  common(prep);
  prep->add_option("--in", a.in, "Dataset directory")->required();
  prep->add_option("--channels", a.channels, "Radar range slices");
  auto* proj = app.add_subcommand("project", "Project clouds to range images");
  common(proj);
  proj->add_option("--in", a.in, "Directory of .bin/.ply clouds")->required();
  proj->add_option("--channels", a.channels, "Range slices (default 1)");
  auto* detect = app.add_subcommand("detect", "OS-CFAR detection on power maps");
  common(detect);
  detect->add_option("--in", a.in, "Dataset or power-map directory")->required();
  auto* train = app.add_subcommand("train", "Train the denoiser");
  common(train);
  train->add_option("--in", a.in, "Preprocessed directory")->required();
  train->add_option("--steps", a.steps, "Override the number of training steps");
  train->add_option("--channels", a.channels, "Radar range slices");
  auto* sample = app.add_subcommand("sample", "Generate LiDAR-like range images");
  common(sample);
  sample->add_option("--in", a.in, "Preprocessed directory")->required();
  sample->add_option("--model", a.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  sample->add_option("--channels", a.channels, "Radar range slices");
  sample->add_flag("--zero-condition", a.zero_condition, "Replace the radar condition with zeros");
  auto* eval = app.add_subcommand("eval", "Score predictions against truth clouds");
  common(eval);
  eval->add_option("--pred", a.pred, "Prediction directory")->required();
  eval->add_option("--truth", a.truth, "Truth directory")->required();
  auto* exp = app.add_subcommand("export", "Convert range images and clouds to PLY");
  common(exp);
  exp->add_option("--in", a.in, "Input directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    radarsr::PipelineConfig cfg = a.config.empty() ? radarsr::PipelineConfig{} : radarsr::load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    if (a.channels) cfg.sensors.channels = *a.channels;
    if (a.steps) cfg.train.steps = *a.steps;
    cfg.validate();
    const radarsr::FrameRange frames = a.frames.empty() ? radarsr::FrameRange{} : radarsr::FrameRange::parse(a.frames);
    const fs::path out = a.out;

    std::string summary;
    if (*synth) {
      summary = radarsr::run_synth(cfg, out, frames);
    } else if (*prep) {
      summary = radarsr::run_preprocess(cfg, required(a.in, "--in"), out, frames);
    } else if (*proj) {
      summary = radarsr::run_project(cfg, required(a.in, "--in"), out, frames, a.channels.value_or(1));
    } else if (*detect) {
      summary = radarsr::run_detect(cfg, required(a.in, "--in"), out, frames);
    } else if (*train) {
      summary = radarsr::run_train(cfg, required(a.in, "--in"), out, frames);
    } else if (*sample) {
      summary = radarsr::run_sample(cfg, required(a.model, "--model"), required(a.in, "--in"), out, frames,
                                    a.zero_condition);
    } else if (*eval) {
      summary = radarsr::run_eval(cfg, required(a.pred, "--pred"), required(a.truth, "--truth"), out, frames);
    } else if (*exp) {
      summary = radarsr::run_export(cfg, required(a.in, "--in"), out, frames);
    }
    std::cout << summary << '\n';
    return 0;
  } catch (const radarsr::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const radarsr::LoadError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
