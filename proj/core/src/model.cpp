#include "radarsr/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radarsr/errors.hpp"

namespace radarsr {

using nn::Conv2d;

void ToyDenoiserConfig::validate() const {
  if (height < 4 || width < 4 || cond_channels < 1 || base_channels < 1 || cond_features < 1 ||
      horizontal_factor < 1) {
    throw ConfigError("toy denoiser: sizes must be positive");
  }
  if (height % 4 != 0) throw ConfigError("toy denoiser: height must be divisible by 4");
  if (width % (4 * horizontal_factor) != 0) {
    throw ConfigError("toy denoiser: width must be divisible by 4 * horizontal_factor");
  }
  if (!(sigma_data > 0.0)) throw ConfigError("toy denoiser: sigma_data must be > 0");
}

Preconditioning Preconditioning::at(double sigma, double sigma_data) {
  const double sd2 = sigma_data * sigma_data;
  const double v = sigma * sigma + sd2;
  return {sd2 / v, sigma * sigma_data / std::sqrt(v), 1.0 / std::sqrt(v), std::log(sigma) / 4.0};
}

ToyDenoiser::ToyDenoiser(const ToyDenoiserConfig& config) : config_(config) {
  config_.validate();
  const int f = config_.base_channels;
  const int fc = config_.cond_features;
  const int hf = config_.horizontal_factor;
  auto k3 = [](int in, int out, int stride = 1) { return Conv2d::Spec{in, out, 3, 3, stride, stride, 1, 1}; };

  conv_in_ = Conv2d(params_, "enc.in", k3(1, f));
  film0_ = nn::Film(params_, "enc.in.film", f);
  conv_horizontal_ = Conv2d(params_, "enc.horizontal", {f, f, 3, hf, 1, hf, 1, 0});
  film1_ = nn::Film(params_, "enc.horizontal.film", f);
  conv_down1_ = Conv2d(params_, "enc.down1", k3(f, 2 * f, 2));
  film2_ = nn::Film(params_, "enc.down1.film", 2 * f);
  cond_in_ = Conv2d(params_, "cond.in", k3(config_.cond_channels, fc));
  conv_merge1_ = Conv2d(params_, "enc.merge1", k3(2 * f + fc, 2 * f));
  cond_down_ = Conv2d(params_, "cond.down", k3(fc, fc, 2));
  conv_down2_ = Conv2d(params_, "enc.down2", k3(2 * f, 2 * f, 2));
  film3_ = nn::Film(params_, "enc.down2.film", 2 * f);
  conv_mid_ = Conv2d(params_, "mid", k3(2 * f + fc, 2 * f));
  conv_up2_ = Conv2d(params_, "dec.up2", k3(4 * f, 2 * f));
  conv_up1_ = Conv2d(params_, "dec.up1", k3(3 * f, f));
  conv_up0_ = Conv2d(params_, "dec.up0", k3(2 * f, f));
  conv_out_ = Conv2d(params_, "dec.out", k3(f, 1));

  SeededRng rng(config_.seed);
  for (const Conv2d* c : {&conv_in_, &conv_horizontal_, &conv_down1_, &cond_in_, &conv_merge1_, &cond_down_,
                          &conv_down2_, &conv_mid_, &conv_up2_, &conv_up1_, &conv_up0_}) {
    c->init(params_, rng);
  }
  conv_out_.init(params_, rng, 0.1);
}

Tensor ToyDenoiser::checked_condition(const Tensor& condition) const {
  if (condition.empty()) return Tensor(config_.cond_channels, config_.cond_height(), config_.cond_width());
  if (condition.channels() != config_.cond_channels || condition.height() != config_.cond_height() ||
      condition.width() != config_.cond_width()) {
    throw ConfigError("toy denoiser: condition shape mismatch");
  }
  return condition;
}

Tensor ToyDenoiser::denoise(const Tensor& x, double sigma, const Tensor& condition) const {
  Activations acts;
  return forward(x, sigma, condition, acts);
}

Tensor ToyDenoiser::forward(const Tensor& x, double sigma, const Tensor& condition, Activations& a) const {
  if (x.channels() != 1 || x.height() != config_.height || x.width() != config_.width) {
    throw ConfigError("toy denoiser: input shape mismatch");
  }
  if (!(sigma > 0.0)) throw ConfigError("toy denoiser: sigma must be > 0");
  const int hf = config_.horizontal_factor;
  a.pre = Preconditioning::at(sigma, config_.sigma_data);
  const double e = a.pre.c_noise;
  const auto& p = params_;

  a.x = x;
  a.xin = x;
  a.xin.scale(a.pre.c_in);
  a.a0 = conv_in_.forward(p, a.xin);
  a.f0 = film0_.forward(p, a.a0, e);
  a.h0 = nn::silu(a.f0);
  a.a1 = conv_horizontal_.forward(p, a.h0);
  a.f1 = film1_.forward(p, a.a1, e);
  a.h1 = nn::silu(a.f1);
  a.a2 = conv_down1_.forward(p, a.h1);
  a.f2 = film2_.forward(p, a.a2, e);
  a.h2 = nn::silu(a.f2);

  a.cond = checked_condition(condition);
  a.ca1 = cond_in_.forward(p, a.cond);
  a.c1 = nn::silu(a.ca1);
  a.m1 = nn::concat_channels(a.h2, a.c1);
  a.a3 = conv_merge1_.forward(p, a.m1);
  a.h3 = nn::silu(a.a3);

  a.ca2 = cond_down_.forward(p, a.c1);
  a.c2 = nn::silu(a.ca2);
  a.a4 = conv_down2_.forward(p, a.h3);
  a.f4 = film3_.forward(p, a.a4, e);
  a.h4 = nn::silu(a.f4);
  a.m2 = nn::concat_channels(a.h4, a.c2);
  a.a5 = conv_mid_.forward(p, a.m2);
  a.h5 = nn::silu(a.a5);

  a.u2in = nn::concat_channels(nn::upsample_nearest(a.h5, 2, 2), a.h3);
  a.a6 = conv_up2_.forward(p, a.u2in);
  a.h6 = nn::silu(a.a6);
  a.u1in = nn::concat_channels(nn::upsample_nearest(a.h6, 2, 2), a.h1);
  a.a7 = conv_up1_.forward(p, a.u1in);
  a.h7 = nn::silu(a.a7);
  a.u0in = nn::concat_channels(nn::upsample_nearest(a.h7, 1, hf), a.h0);
  a.a8 = conv_up0_.forward(p, a.u0in);
  a.h8 = nn::silu(a.a8);
  a.out = conv_out_.forward(p, a.h8);

  Tensor d(1, config_.height, config_.width);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.pre.c_skip * x[i] + a.pre.c_out * a.out[i];
  return d;
}

void ToyDenoiser::backward(const Activations& a, const Tensor& grad_output, nn::Gradients& g) const {
  if (g.size() != params_.size()) g.assign(params_.size(), 0.0);
  const int hf = config_.horizontal_factor;
  const double e = a.pre.c_noise;
  const auto& p = params_;
  Tensor lhs, rhs;

  Tensor g_out = grad_output;
  g_out.scale(a.pre.c_out);
  Tensor g_h8 = conv_out_.backward(p, g, a.h8, g_out);
  Tensor g_u0 = conv_up0_.backward(p, g, a.u0in, nn::silu_backward(a.a8, g_h8));
  nn::split_channels(g_u0, a.h7.channels(), lhs, rhs);
  Tensor g_h7 = nn::upsample_nearest_backward(lhs, 1, hf);
  Tensor g_h0 = std::move(rhs);

  Tensor g_u1 = conv_up1_.backward(p, g, a.u1in, nn::silu_backward(a.a7, g_h7));
  nn::split_channels(g_u1, a.h6.channels(), lhs, rhs);
  Tensor g_h6 = nn::upsample_nearest_backward(lhs, 2, 2);
  Tensor g_h1 = std::move(rhs);

  Tensor g_u2 = conv_up2_.backward(p, g, a.u2in, nn::silu_backward(a.a6, g_h6));
  nn::split_channels(g_u2, a.h5.channels(), lhs, rhs);
  Tensor g_h5 = nn::upsample_nearest_backward(lhs, 2, 2);
  Tensor g_h3 = std::move(rhs);

  Tensor g_m2 = conv_mid_.backward(p, g, a.m2, nn::silu_backward(a.a5, g_h5));
  nn::split_channels(g_m2, a.h4.channels(), lhs, rhs);
  Tensor g_c2 = std::move(rhs);
  Tensor g_f4 = nn::silu_backward(a.f4, lhs);
  Tensor g_a4 = film3_.backward(p, g, a.a4, e, g_f4);
  g_h3.axpy(1.0, conv_down2_.backward(p, g, a.h3, g_a4));
  Tensor g_c1 = cond_down_.backward(p, g, a.c1, nn::silu_backward(a.ca2, g_c2));

  Tensor g_m1 = conv_merge1_.backward(p, g, a.m1, nn::silu_backward(a.a3, g_h3));
  nn::split_channels(g_m1, a.h2.channels(), lhs, rhs);
  g_c1.axpy(1.0, rhs);
  cond_in_.backward(p, g, a.cond, nn::silu_backward(a.ca1, g_c1));

  Tensor g_a2 = film2_.backward(p, g, a.a2, e, nn::silu_backward(a.f2, lhs));
  g_h1.axpy(1.0, conv_down1_.backward(p, g, a.h1, g_a2));
  Tensor g_a1 = film1_.backward(p, g, a.a1, e, nn::silu_backward(a.f1, g_h1));
  g_h0.axpy(1.0, conv_horizontal_.backward(p, g, a.h0, g_a1));
  Tensor g_a0 = film0_.backward(p, g, a.a0, e, nn::silu_backward(a.f0, g_h0));
  conv_in_.backward(p, g, a.xin, g_a0);
}

GradientResult gradients(const ToyDenoiser& model, std::span<const TrainingExample> examples,
                         std::span<const BatchItem> batch, const LossWeights& weights,
                         const PerceptualFeatureExtractor& extractor) {
  if (batch.empty()) throw ConfigError("gradients: empty batch");
  GradientResult out;
  out.grads.assign(model.parameter_count(), 0.0);
  const double inv = 1.0 / static_cast<double>(batch.size());
  ToyDenoiser::Activations acts;
  for (const auto& item : batch) {
    if (item.example >= examples.size()) throw ConfigError("gradients: example index out of range");
    const auto& ex = examples[item.example];
    if (!item.draw.noise.same_shape(ex.target)) throw ConfigError("gradients: noise shape mismatch");
    Tensor xt = ex.target;
    xt.axpy(item.draw.sigma, item.draw.noise);
    const Tensor d = model.forward(xt, item.draw.sigma, ex.condition, acts);
    auto loss = combined_loss(ex.target, d, ex.valid, weights, extractor, true);
    for (auto [name, v] : {std::pair{"mse", loss.mse}, std::pair{"perceptual", loss.perceptual},
                           std::pair{"pixel", loss.pixel}}) {
      if (!std::isfinite(v)) throw RuntimeError(std::string("gradients: non-finite ") + name + " loss");
    }
    out.loss += inv * loss.total;
    out.mse += inv * loss.mse;
    out.perceptual += inv * loss.perceptual;
    out.pixel += inv * loss.pixel;
    loss.grad.scale(inv);
    model.backward(acts, loss.grad, out.grads);
  }
  return out;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || steps < 0 || batch_size < 1 || !(p_std > 0.0) || log_every < 1 ||
      !(grad_clip >= 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train config: invalid values");
  }
  weights.validate();
}

double measure_sigma_data(std::span<const TrainingExample> examples) {
  double s = 0.0;
  double s2 = 0.0;
  std::size_t n = 0;
  for (const auto& ex : examples) {
    for (double v : ex.target.values()) {
      s += v;
      s2 += v * v;
      ++n;
    }
  }
  if (n == 0) throw ConfigError("measure_sigma_data: no data");
  const double mean = s / static_cast<double>(n);
  return std::sqrt(std::max(s2 / static_cast<double>(n) - mean * mean, 1e-12));
}

TrainResult train(ToyDenoiser& model, std::span<const TrainingExample> examples, const TrainConfig& config,
                  const TrainLogger& log) {
  config.validate();
  if (examples.empty()) throw ConfigError("train: empty dataset");
  const GradientPyramidExtractor extractor;
  SeededRng rng(config.seed);
  auto& values = model.parameters().values();
  std::vector<double> m(values.size(), 0.0);
  std::vector<double> v(values.size(), 0.0);
  constexpr double kAdamEps = 1e-8;
  constexpr double kDivergenceFactor = 1e3;

  TrainResult result;
  result.losses.reserve(config.steps);
  std::vector<BatchItem> batch(config.batch_size);
  const auto& shape = examples.front().target;
  for (int step = 0; step < config.steps; ++step) {
    for (auto& item : batch) {
      item.example = rng.below(examples.size());
      item.draw.sigma = sample_training_sigma(rng, config.p_mean, config.p_std);
      item.draw.noise = Tensor(shape.channels(), shape.height(), shape.width());
      for (std::size_t i = 0; i < item.draw.noise.size(); ++i) item.draw.noise[i] = rng.normal();
    }
    auto g = gradients(model, examples, batch, config.weights, extractor);
    result.losses.push_back(g.loss);
    if (g.loss > kDivergenceFactor * result.losses.front()) {
      throw RuntimeError("train: diverged at step " + std::to_string(step) + " (loss " + std::to_string(g.loss) +
                         ", initial " + std::to_string(result.losses.front()) + ")");
    }
    if (log && (step % config.log_every == 0 || step + 1 == config.steps)) log(step, g.loss);

    if (config.grad_clip > 0.0) {
      double norm2 = 0.0;
      for (double x : g.grads) norm2 += x * x;
      const double norm = std::sqrt(norm2);
      if (norm > config.grad_clip) {
        const double k = config.grad_clip / norm;
        for (double& x : g.grads) x *= k;
      }
    }
    const double bc1 = 1.0 - std::pow(config.beta1, step + 1);
    const double bc2 = 1.0 - std::pow(config.beta2, step + 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g.grads[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g.grads[i] * g.grads[i];
      values[i] -= config.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
    }
  }
  return result;
}

SmoothedLoss smoothed_loss(const std::vector<double>& losses, std::size_t head, std::size_t tail) {
  if (losses.empty()) throw ConfigError("smoothed_loss: empty curve");
  head = std::min(head, losses.size());
  tail = std::min(tail, losses.size());
  SmoothedLoss s;
  for (std::size_t i = 0; i < head; ++i) s.initial += losses[i];
  for (std::size_t i = losses.size() - tail; i < losses.size(); ++i) s.final += losses[i];
  s.initial /= static_cast<double>(head);
  s.final /= static_cast<double>(tail);
  return s;
}

}  // namespace radarsr
