#include "radarsr/losses.hpp"

#include <cmath>

#include "radarsr/errors.hpp"

namespace radarsr {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) throw ConfigError(std::string(what) + ": shape mismatch");
  if (a.empty()) throw ConfigError(std::string(what) + ": empty tensor");
}

Tensor avg_pool(const Tensor& in, int k) {
  Tensor out(in.channels(), in.height() / k, in.width() / k);
  const double inv = 1.0 / (k * k);
  for (int c = 0; c < out.channels(); ++c) {
    for (int h = 0; h < out.height(); ++h) {
      for (int w = 0; w < out.width(); ++w) {
        double s = 0.0;
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < k; ++j) s += in.at(c, h * k + i, w * k + j);
        }
        out.at(c, h, w) = s * inv;
      }
    }
  }
  return out;
}

// Adds the pooling VJP of `g_out` into `g_in`.
void avg_pool_backward(const Tensor& g_out, int k, Tensor& g_in) {
  const double inv = 1.0 / (k * k);
  for (int c = 0; c < g_out.channels(); ++c) {
    for (int h = 0; h < g_out.height(); ++h) {
      for (int w = 0; w < g_out.width(); ++w) {
        const double g = g_out.at(c, h, w) * inv;
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < k; ++j) g_in.at(c, h * k + i, w * k + j) += g;
        }
      }
    }
  }
}

double dx_at(const Tensor& t, int c, int h, int w) { return w + 1 < t.width() ? t.at(c, h, w + 1) - t.at(c, h, w) : 0.0; }
double dy_at(const Tensor& t, int c, int h, int w) { return h + 1 < t.height() ? t.at(c, h + 1, w) - t.at(c, h, w) : 0.0; }

Tensor gradient_magnitude(const Tensor& in, double eps) {
  Tensor out(in.channels(), in.height(), in.width());
  for (int c = 0; c < in.channels(); ++c) {
    for (int h = 0; h < in.height(); ++h) {
      for (int w = 0; w < in.width(); ++w) {
        const double gx = dx_at(in, c, h, w);
        const double gy = dy_at(in, c, h, w);
        out.at(c, h, w) = std::sqrt(gx * gx + gy * gy + eps * eps);
      }
    }
  }
  return out;
}

void gradient_magnitude_backward(const Tensor& in, const Tensor& g_out, double eps, Tensor& g_in) {
  for (int c = 0; c < in.channels(); ++c) {
    for (int h = 0; h < in.height(); ++h) {
      for (int w = 0; w < in.width(); ++w) {
        const double gx = dx_at(in, c, h, w);
        const double gy = dy_at(in, c, h, w);
        const double m = std::sqrt(gx * gx + gy * gy + eps * eps);
        const double g = g_out.at(c, h, w) / m;
        if (w + 1 < in.width()) {
          g_in.at(c, h, w + 1) += g * gx;
          g_in.at(c, h, w) -= g * gx;
        }
        if (h + 1 < in.height()) {
          g_in.at(c, h + 1, w) += g * gy;
          g_in.at(c, h, w) -= g * gy;
        }
      }
    }
  }
}

}  // namespace

GradientPyramidExtractor::GradientPyramidExtractor(int levels, int pool, double eps)
    : levels_(levels), pool_(pool), eps_(eps) {
  if (levels_ < 1 || pool_ < 1 || !(eps_ > 0.0)) throw ConfigError("gradient pyramid: invalid parameters");
}

std::vector<Tensor> GradientPyramidExtractor::features(const Tensor& img) const {
  std::vector<Tensor> out;
  Tensor level = img;
  for (int l = 0; l < levels_; ++l) {
    out.push_back(gradient_magnitude(level, eps_));
    if (level.height() >= pool_ && level.width() >= pool_) out.push_back(avg_pool(level, pool_));
    if (l + 1 == levels_ || level.height() < 4 || level.width() < 4) break;
    level = avg_pool(level, 2);
  }
  return out;
}

Tensor GradientPyramidExtractor::backward(const Tensor& img, const std::vector<Tensor>& feature_grads) const {
  // Replay the forward pass to recover each level's input.
  std::vector<Tensor> levels{img};
  std::vector<bool> pooled;
  std::size_t expected = 0;
  for (int l = 0; l < levels_; ++l) {
    const Tensor& lv = levels.back();
    pooled.push_back(lv.height() >= pool_ && lv.width() >= pool_);
    expected += pooled.back() ? 2 : 1;
    if (l + 1 == levels_ || lv.height() < 4 || lv.width() < 4) break;
    levels.push_back(avg_pool(lv, 2));
  }
  if (feature_grads.size() != expected) throw ConfigError("gradient pyramid: wrong number of feature gradients");

  // Walk levels from coarse to fine, accumulating into each level's input gradient.
  std::vector<std::size_t> first(levels.size());
  for (std::size_t l = 0, k = 0; l < levels.size(); ++l) {
    first[l] = k;
    k += pooled[l] ? 2 : 1;
  }
  Tensor carry;
  for (std::size_t l = levels.size(); l-- > 0;) {
    const Tensor& lv = levels[l];
    Tensor g(lv.channels(), lv.height(), lv.width());
    gradient_magnitude_backward(lv, feature_grads[first[l]], eps_, g);
    if (pooled[l]) avg_pool_backward(feature_grads[first[l] + 1], pool_, g);
    if (!carry.empty()) avg_pool_backward(carry, 2, g);
    carry = std::move(g);
  }
  return carry;
}

void LossWeights::validate() const {
  if (!(mse >= 0.0) || !(perceptual >= 0.0) || !(pixel >= 0.0)) throw ConfigError("loss weights must be >= 0");
}

double mse_loss(const Tensor& x0, const Tensor& d) {
  require_same_shape(x0, d, "mse_loss");
  double s = 0.0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const double e = x0[i] - d[i];
    s += e * e;
  }
  return s / static_cast<double>(x0.size());
}

LossGrad mse_loss_grad(const Tensor& x0, const Tensor& d) {
  LossGrad out{mse_loss(x0, d), Tensor(d.channels(), d.height(), d.width())};
  const double k = 2.0 / static_cast<double>(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) out.grad[i] = k * (d[i] - x0[i]);
  return out;
}

double perceptual_loss(const Tensor& x0, const Tensor& d, const PerceptualFeatureExtractor& extractor) {
  require_same_shape(x0, d, "perceptual_loss");
  const auto fa = extractor.features(x0);
  const auto fb = extractor.features(d);
  double total = 0.0;
  for (std::size_t k = 0; k < fa.size(); ++k) total += mse_loss(fa[k], fb[k]);
  return total;
}

LossGrad perceptual_loss_grad(const Tensor& x0, const Tensor& d, const PerceptualFeatureExtractor& extractor) {
  require_same_shape(x0, d, "perceptual_loss");
  const auto fa = extractor.features(x0);
  const auto fb = extractor.features(d);
  LossGrad out;
  std::vector<Tensor> grads;
  grads.reserve(fa.size());
  for (std::size_t k = 0; k < fa.size(); ++k) {
    auto term = mse_loss_grad(fa[k], fb[k]);
    out.value += term.value;
    grads.push_back(std::move(term.grad));
  }
  out.grad = extractor.backward(d, grads);
  return out;
}

LossGrad pixel_distance_loss_grad(const Tensor& x0, const Tensor& d, std::span<const std::uint8_t> valid) {
  require_same_shape(x0, d, "pixel_distance_loss");
  if (!valid.empty() && valid.size() != x0.size()) throw ConfigError("pixel_distance_loss: mask size mismatch");
  LossGrad out{0.0, Tensor(d.channels(), d.height(), d.width())};
  std::size_t n = 0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!valid.empty() && !valid[i]) continue;
    ++n;
    out.value += std::abs(x0[i] - d[i]);
  }
  if (n == 0) {
    out.no_valid_pixels = true;
    return out;
  }
  const double inv = 1.0 / static_cast<double>(n);
  out.value *= inv;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!valid.empty() && !valid[i]) continue;
    const double e = d[i] - x0[i];
    out.grad[i] = e > 0.0 ? inv : (e < 0.0 ? -inv : 0.0);
  }
  return out;
}

double pixel_distance_loss(const Tensor& x0, const Tensor& d, std::span<const std::uint8_t> valid) {
  return pixel_distance_loss_grad(x0, d, valid).value;
}

CombinedLoss combined_loss(const Tensor& x0, const Tensor& d, std::span<const std::uint8_t> valid,
                           const LossWeights& weights, const PerceptualFeatureExtractor& extractor, bool with_grad) {
  weights.validate();
  CombinedLoss out;
  if (!with_grad) {
    out.mse = mse_loss(x0, d);
    out.perceptual = perceptual_loss(x0, d, extractor);
    const auto px = pixel_distance_loss_grad(x0, d, valid);
    out.pixel = px.value;
    out.no_valid_pixels = px.no_valid_pixels;
  } else {
    auto m = mse_loss_grad(x0, d);
    auto p = perceptual_loss_grad(x0, d, extractor);
    auto c = pixel_distance_loss_grad(x0, d, valid);
    out.mse = m.value;
    out.perceptual = p.value;
    out.pixel = c.value;
    out.no_valid_pixels = c.no_valid_pixels;
    out.grad = Tensor(d.channels(), d.height(), d.width());
    out.grad.axpy(weights.mse, m.grad);
    out.grad.axpy(weights.perceptual, p.grad);
    out.grad.axpy(weights.pixel, c.grad);
  }
  out.total = weights.mse * out.mse + weights.perceptual * out.perceptual + weights.pixel * out.pixel;
  return out;
}

}  // namespace radarsr
