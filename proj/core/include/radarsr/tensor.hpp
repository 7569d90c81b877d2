#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace radarsr {

/// Dense C x H x W array of doubles, row-major within each channel.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int channels, int height, int width, double fill = 0.0);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool same_shape(const Tensor& o) const {
    return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
  }

  double& at(int c, int h, int w) { return data_[index(c, h, w)]; }
  double at(int c, int h, int w) const { return data_[index(c, h, w)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> channel(int c);
  std::span<const double> channel(int c) const;
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  void fill(double v);
  /// this += a * x
  void axpy(double a, const Tensor& x);
  void scale(double a);
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t index(int c, int h, int w) const {
    return (static_cast<std::size_t>(c) * height_ + h) * width_ + w;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

}  // namespace radarsr
