#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "radarsr/diffusion.hpp"
#include "radarsr/layers.hpp"
#include "radarsr/losses.hpp"

namespace radarsr {

/// Shape and width settings of the toy conditional denoiser.
///
/// Target images are 1 x height x width. A width-only "horizontal" stage first divides
/// the width by `horizontal_factor`, then two stride-2 stages halve both axes. The
/// radar condition stack (cond_channels x height/2 x width/(2 f)) is never resized: a
/// condition encoder produces features at the first and second downsampled scales and
/// they are concatenated there.
struct ToyDenoiserConfig {
  int height = 32;
  int width = 128;
  int cond_channels = 16;
  int base_channels = 8;
  int cond_features = 8;
  int horizontal_factor = 4;
  double sigma_data = 0.5;
  std::uint64_t seed = 0;

  int cond_height() const { return height / 2; }
  int cond_width() const { return width / (2 * horizontal_factor); }
  void validate() const;

  friend bool operator==(const ToyDenoiserConfig&, const ToyDenoiserConfig&) = default;
};

/// Preconditioning scalars for data std s_d:
/// c_skip = s_d^2/(sigma^2+s_d^2), c_out = sigma s_d/sqrt(sigma^2+s_d^2),
/// c_in = 1/sqrt(sigma^2+s_d^2), c_noise = ln(sigma)/4.
struct Preconditioning {
  double c_skip = 0.0;
  double c_out = 0.0;
  double c_in = 0.0;
  double c_noise = 0.0;

  static Preconditioning at(double sigma, double sigma_data);
};

class ToyDenoiser final : public Denoiser {
 public:
  explicit ToyDenoiser(const ToyDenoiserConfig& config);

  const ToyDenoiserConfig& config() const { return config_; }
  nn::ParameterStore& parameters() { return params_; }
  const nn::ParameterStore& parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  /// An empty condition is treated as an all-zero stack.
  Tensor denoise(const Tensor& x, double sigma, const Tensor& condition) const override;

  /// Intermediate activations kept for the backward pass.
  struct Activations;
  Tensor forward(const Tensor& x, double sigma, const Tensor& condition, Activations& acts) const;
  /// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(output).
  void backward(const Activations& acts, const Tensor& grad_output, nn::Gradients& grads) const;

 private:
  Tensor checked_condition(const Tensor& condition) const;

  ToyDenoiserConfig config_;
  nn::ParameterStore params_;
  nn::Conv2d conv_in_, conv_horizontal_, conv_down1_, conv_merge1_, conv_down2_, conv_mid_;
  nn::Conv2d cond_in_, cond_down_;
  nn::Conv2d conv_up2_, conv_up1_, conv_up0_, conv_out_;
  nn::Film film0_, film1_, film2_, film3_;
};

struct ToyDenoiser::Activations {
  Preconditioning pre;
  Tensor x, xin, a0, f0, h0, a1, f1, h1, a2, f2, h2;
  Tensor cond, ca1, c1, m1, a3, h3, ca2, c2, a4, f4, h4, m2, a5, h5;
  Tensor u2in, a6, h6, u1in, a7, h7, u0in, a8, h8, out;
};

/// One supervised pair: normalized LiDAR target (invalid pixels filled), its validity
/// mask, and the normalized radar condition stack.
struct TrainingExample {
  Tensor target;
  std::vector<std::uint8_t> valid;
  Tensor condition;
};

struct NoiseDraw {
  double sigma = 1.0;
  Tensor noise;  // standard normal, target-shaped
};

struct BatchItem {
  std::size_t example = 0;
  NoiseDraw draw;
};

struct GradientResult {
  double loss = 0.0;  // batch mean of the combined loss
  double mse = 0.0;
  double perceptual = 0.0;
  double pixel = 0.0;
  nn::Gradients grads;
};

/// Reverse-mode gradient of the batch-mean combined loss at x_t = target + sigma * noise.
/// Throws RuntimeError naming the term when a loss value is non-finite.
GradientResult gradients(const ToyDenoiser& model, std::span<const TrainingExample> examples,
                         std::span<const BatchItem> batch, const LossWeights& weights,
                         const PerceptualFeatureExtractor& extractor);

struct TrainConfig {
  double learning_rate = 2e-3;
  int steps = 2000;
  int batch_size = 4;
  double p_mean = -1.2;
  double p_std = 1.2;
  LossWeights weights;
  double grad_clip = 1.0;  // global L2 norm; 0 disables
  double beta1 = 0.9;
  double beta2 = 0.999;
  int log_every = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  std::vector<double> losses;  // one per step
};

using TrainLogger = std::function<void(int step, double loss)>;

/// Adam updates on batches drawn with replacement. Aborts with RuntimeError when the
/// loss exceeds 1000x its first value.
TrainResult train(ToyDenoiser& model, std::span<const TrainingExample> examples, const TrainConfig& config,
                  const TrainLogger& log = {});

/// Standard deviation of all target values, used as sigma_data.
double measure_sigma_data(std::span<const TrainingExample> examples);

/// Mean of the first `head` and the last `tail` entries of a loss curve.
struct SmoothedLoss {
  double initial = 0.0;
  double final = 0.0;
};
SmoothedLoss smoothed_loss(const std::vector<double>& losses, std::size_t head = 20, std::size_t tail = 100);

// Checkpoint file (".ckpt"), little-endian:
//   "TDCK" | u32 version = 1 | u32 tensor_count |
//   per tensor: u32 name_length | name bytes (UTF-8, no terminator) | u32 rank |
//               u32 dims[rank] | f32 values[prod(dims)]
// The first two tensors are "meta.config" = [height, width, cond_channels,
// base_channels, cond_features, horizontal_factor] and "meta.sigma_data" = [s_d];
// the remaining tensors are the parameters in construction order.
inline constexpr char kCheckpointMagic[5] = "TDCK";

void write_checkpoint(std::ostream& os, const ToyDenoiser& model);
void write_checkpoint(const std::filesystem::path& path, const ToyDenoiser& model);
ToyDenoiser read_checkpoint(std::istream& is, const std::string& name = "<stream>");
ToyDenoiser read_checkpoint(const std::filesystem::path& path);

}  // namespace radarsr
