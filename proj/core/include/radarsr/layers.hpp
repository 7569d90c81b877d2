#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "radarsr/rng.hpp"
#include "radarsr/tensor.hpp"

namespace radarsr::nn {

/// Named tensor inside a flat parameter buffer.
struct ParamSlot {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// All trainable values in one contiguous buffer; gradients use the same layout.
class ParameterStore {
 public:
  std::size_t add(std::string name, std::vector<int> shape);

  const std::vector<ParamSlot>& slots() const { return slots_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const ParamSlot& slot(std::size_t i) const { return slots_[i]; }
  double* data(std::size_t slot) { return values_.data() + slots_[slot].offset; }
  const double* data(std::size_t slot) const { return values_.data() + slots_[slot].offset; }

 private:
  std::vector<ParamSlot> slots_;
  std::vector<double> values_;
};

using Gradients = std::vector<double>;

/// 2-D convolution, weights [out][in][kh][kw], zero padding. Implemented as im2col + GEMM.
class Conv2d {
 public:
  struct Spec {
    int in = 1;
    int out = 1;
    int kh = 3;
    int kw = 3;
    int sh = 1;
    int sw = 1;
    int ph = 1;
    int pw = 1;
  };

  Conv2d() = default;
  Conv2d(ParameterStore& store, const std::string& name, const Spec& spec);

  const Spec& spec() const { return spec_; }
  int out_height(int h) const { return (h + 2 * spec_.ph - spec_.kh) / spec_.sh + 1; }
  int out_width(int w) const { return (w + 2 * spec_.pw - spec_.kw) / spec_.sw + 1; }

  /// Scaled normal init: std = gain / sqrt(fan_in); bias zero.
  void init(ParameterStore& store, SeededRng& rng, double gain = 1.0) const;

  Tensor forward(const ParameterStore& p, const Tensor& x) const;
  /// Accumulates weight/bias gradients into `g`, returns d(loss)/dx.
  Tensor backward(const ParameterStore& p, Gradients& g, const Tensor& x, const Tensor& grad_out) const;

 private:
  Spec spec_;
  std::size_t weight_ = 0;
  std::size_t bias_ = 0;
};

/// Per-channel scalar modulation by a noise embedding e: y = x (1 + gamma e) + beta e.
class Film {
 public:
  Film() = default;
  Film(ParameterStore& store, const std::string& name, int channels);

  Tensor forward(const ParameterStore& p, const Tensor& x, double e) const;
  Tensor backward(const ParameterStore& p, Gradients& g, const Tensor& x, double e, const Tensor& grad_out) const;

 private:
  int channels_ = 0;
  std::size_t gamma_ = 0;
  std::size_t beta_ = 0;
};

Tensor silu(const Tensor& x);
Tensor silu_backward(const Tensor& x, const Tensor& grad_out);

Tensor upsample_nearest(const Tensor& x, int fh, int fw);
Tensor upsample_nearest_backward(const Tensor& grad_out, int fh, int fw);

Tensor concat_channels(const Tensor& a, const Tensor& b);
/// Splits a channel-concatenated gradient back into the two inputs' shapes.
void split_channels(const Tensor& g, int a_channels, Tensor& ga, Tensor& gb);

}  // namespace radarsr::nn
