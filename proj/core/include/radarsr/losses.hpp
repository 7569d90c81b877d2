#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "radarsr/tensor.hpp"

namespace radarsr {

/// Maps an image to feature tensors at several scales. backward() is the
/// vector-Jacobian product: given d(loss)/d(feature_k) it returns d(loss)/d(img).
class PerceptualFeatureExtractor {
 public:
  virtual ~PerceptualFeatureExtractor() = default;
  virtual std::vector<Tensor> features(const Tensor& img) const = 0;
  virtual Tensor backward(const Tensor& img, const std::vector<Tensor>& feature_grads) const = 0;
};

/// Dependency-free structural features. For each level of a 2x2 average-pooled pyramid:
///   - gradient magnitude sqrt(gx^2 + gy^2 + eps^2) from forward differences
///     (zero difference past the last row/column),
///   - non-overlapping 4x4 average pooling (skipped once the level is smaller than 4x4).
/// Levels stop early if a dimension would drop below 2.
class GradientPyramidExtractor final : public PerceptualFeatureExtractor {
 public:
  explicit GradientPyramidExtractor(int levels = 3, int pool = 4, double eps = 1e-3);

  std::vector<Tensor> features(const Tensor& img) const override;
  Tensor backward(const Tensor& img, const std::vector<Tensor>& feature_grads) const override;

 private:
  int levels_;
  int pool_;
  double eps_;
};

struct LossWeights {
  double mse = 1.0;         // lambda_m
  double perceptual = 0.5;  // lambda_p
  double pixel = 1.0;       // lambda_c

  void validate() const;
};

/// Loss value with its gradient with respect to the prediction `d`.
struct LossGrad {
  double value = 0.0;
  Tensor grad;
  bool no_valid_pixels = false;
};

/// mean((x0 - d)^2)
double mse_loss(const Tensor& x0, const Tensor& d);
LossGrad mse_loss_grad(const Tensor& x0, const Tensor& d);

/// sum over feature tensors of mean((g(x0) - g(d))^2)
double perceptual_loss(const Tensor& x0, const Tensor& d, const PerceptualFeatureExtractor& extractor);
LossGrad perceptual_loss_grad(const Tensor& x0, const Tensor& d, const PerceptualFeatureExtractor& extractor);

/// mean |x0 - d| over pixels valid in x0. An empty mask means every pixel is valid.
/// With no valid pixels the value is 0 and `no_valid_pixels` is set.
LossGrad pixel_distance_loss_grad(const Tensor& x0, const Tensor& d, std::span<const std::uint8_t> valid = {});
double pixel_distance_loss(const Tensor& x0, const Tensor& d, std::span<const std::uint8_t> valid = {});

struct CombinedLoss {
  double total = 0.0;
  double mse = 0.0;
  double perceptual = 0.0;
  double pixel = 0.0;
  bool no_valid_pixels = false;
  Tensor grad;  // d(total)/d(d); empty unless requested
};

/// lambda_m L_m + lambda_p L_p + lambda_c L_c with the per-term breakdown.
CombinedLoss combined_loss(const Tensor& x0, const Tensor& d, std::span<const std::uint8_t> valid,
                           const LossWeights& weights, const PerceptualFeatureExtractor& extractor,
                           bool with_grad = false);

}  // namespace radarsr
