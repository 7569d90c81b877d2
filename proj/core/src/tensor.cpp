#include "radarsr/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "radarsr/errors.hpp"

namespace radarsr {

Tensor::Tensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) throw ConfigError("tensor: negative dimension");
  data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

std::span<double> Tensor::channel(int c) {
  const std::size_t plane = static_cast<std::size_t>(height_) * width_;
  return std::span<double>(data_).subspan(c * plane, plane);
}

std::span<const double> Tensor::channel(int c) const {
  const std::size_t plane = static_cast<std::size_t>(height_) * width_;
  return std::span<const double>(data_).subspan(c * plane, plane);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::axpy(double a, const Tensor& x) {
  if (!same_shape(x)) throw ConfigError("tensor: shape mismatch in axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
}

void Tensor::scale(double a) {
  for (auto& v : data_) v *= a;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace radarsr
