#include "radarsr/layers.hpp"

#include <Eigen/Core>
#include <cmath>
#include <numeric>

#include "radarsr/errors.hpp"

namespace radarsr::nn {

namespace {
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRow = Eigen::Map<RowMat>;
using ConstMapRow = Eigen::Map<const RowMat>;
}  // namespace

std::size_t ParameterStore::add(std::string name, std::vector<int> shape) {
  const auto n = static_cast<std::size_t>(std::accumulate(shape.begin(), shape.end(), 1LL, std::multiplies<>()));
  slots_.push_back({std::move(name), std::move(shape), values_.size(), n});
  values_.resize(values_.size() + n, 0.0);
  return slots_.size() - 1;
}

Conv2d::Conv2d(ParameterStore& store, const std::string& name, const Spec& spec) : spec_(spec) {
  if (spec.in < 1 || spec.out < 1 || spec.kh < 1 || spec.kw < 1 || spec.sh < 1 || spec.sw < 1 || spec.ph < 0 ||
      spec.pw < 0) {
    throw ConfigError("conv2d '" + name + "': invalid spec");
  }
  weight_ = store.add(name + ".weight", {spec.out, spec.in, spec.kh, spec.kw});
  bias_ = store.add(name + ".bias", {spec.out});
}

void Conv2d::init(ParameterStore& store, SeededRng& rng, double gain) const {
  const double stddev = gain / std::sqrt(static_cast<double>(spec_.in * spec_.kh * spec_.kw));
  double* w = store.data(weight_);
  for (std::size_t i = 0; i < store.slot(weight_).size; ++i) w[i] = stddev * rng.normal();
  double* b = store.data(bias_);
  for (std::size_t i = 0; i < store.slot(bias_).size; ++i) b[i] = 0.0;
}

namespace {

// cols is (in*kh*kw) x (oh*ow), row-major.
void im2col(const Tensor& x, const Conv2d::Spec& s, int oh, int ow, RowMat& cols) {
  cols.resize(static_cast<Eigen::Index>(s.in) * s.kh * s.kw, static_cast<Eigen::Index>(oh) * ow);
  Eigen::Index row = 0;
  for (int c = 0; c < s.in; ++c) {
    for (int i = 0; i < s.kh; ++i) {
      for (int j = 0; j < s.kw; ++j, ++row) {
        double* dst = cols.row(row).data();
        for (int y = 0; y < oh; ++y) {
          const int iy = y * s.sh - s.ph + i;
          for (int xq = 0; xq < ow; ++xq) {
            const int ix = xq * s.sw - s.pw + j;
            dst[y * ow + xq] = (iy >= 0 && iy < x.height() && ix >= 0 && ix < x.width()) ? x.at(c, iy, ix) : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const RowMat& cols, const Conv2d::Spec& s, int oh, int ow, Tensor& gx) {
  Eigen::Index row = 0;
  for (int c = 0; c < s.in; ++c) {
    for (int i = 0; i < s.kh; ++i) {
      for (int j = 0; j < s.kw; ++j, ++row) {
        const double* src = cols.row(row).data();
        for (int y = 0; y < oh; ++y) {
          const int iy = y * s.sh - s.ph + i;
          if (iy < 0 || iy >= gx.height()) continue;
          for (int xq = 0; xq < ow; ++xq) {
            const int ix = xq * s.sw - s.pw + j;
            if (ix >= 0 && ix < gx.width()) gx.at(c, iy, ix) += src[y * ow + xq];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor Conv2d::forward(const ParameterStore& p, const Tensor& x) const {
  if (x.channels() != spec_.in) throw ConfigError("conv2d: input channel mismatch");
  const int oh = out_height(x.height());
  const int ow = out_width(x.width());
  RowMat cols;
  im2col(x, spec_, oh, ow, cols);
  const Eigen::Index k = cols.rows();
  ConstMapRow w(p.data(weight_), spec_.out, k);
  Tensor y(spec_.out, oh, ow);
  MapRow out(y.data(), spec_.out, static_cast<Eigen::Index>(oh) * ow);
  out.noalias() = w * cols;
  const double* b = p.data(bias_);
  for (int o = 0; o < spec_.out; ++o) out.row(o).array() += b[o];
  return y;
}

Tensor Conv2d::backward(const ParameterStore& p, Gradients& g, const Tensor& x, const Tensor& grad_out) const {
  const int oh = out_height(x.height());
  const int ow = out_width(x.width());
  if (grad_out.channels() != spec_.out || grad_out.height() != oh || grad_out.width() != ow) {
    throw ConfigError("conv2d: gradient shape mismatch");
  }
  RowMat cols;
  im2col(x, spec_, oh, ow, cols);
  const Eigen::Index k = cols.rows();
  const Eigen::Index npix = static_cast<Eigen::Index>(oh) * ow;
  ConstMapRow gy(grad_out.data(), spec_.out, npix);
  ConstMapRow w(p.data(weight_), spec_.out, k);

  MapRow gw(g.data() + p.slot(weight_).offset, spec_.out, k);
  gw.noalias() += gy * cols.transpose();
  double* gb = g.data() + p.slot(bias_).offset;
  for (int o = 0; o < spec_.out; ++o) gb[o] += gy.row(o).sum();

  RowMat gcols = w.transpose() * gy;
  Tensor gx(x.channels(), x.height(), x.width());
  col2im(gcols, spec_, oh, ow, gx);
  return gx;
}

Film::Film(ParameterStore& store, const std::string& name, int channels) : channels_(channels) {
  gamma_ = store.add(name + ".gamma", {channels});
  beta_ = store.add(name + ".beta", {channels});
}

Tensor Film::forward(const ParameterStore& p, const Tensor& x, double e) const {
  if (x.channels() != channels_) throw ConfigError("film: channel mismatch");
  Tensor y = x;
  const double* gamma = p.data(gamma_);
  const double* beta = p.data(beta_);
  for (int c = 0; c < channels_; ++c) {
    const double scale = 1.0 + gamma[c] * e;
    const double shift = beta[c] * e;
    for (double& v : y.channel(c)) v = v * scale + shift;
  }
  return y;
}

Tensor Film::backward(const ParameterStore& p, Gradients& g, const Tensor& x, double e, const Tensor& grad_out) const {
  Tensor gx(x.channels(), x.height(), x.width());
  const double* gamma = p.data(gamma_);
  double* g_gamma = g.data() + p.slot(gamma_).offset;
  double* g_beta = g.data() + p.slot(beta_).offset;
  for (int c = 0; c < channels_; ++c) {
    const auto xs = x.channel(c);
    const auto gs = grad_out.channel(c);
    auto dst = gx.channel(c);
    const double scale = 1.0 + gamma[c] * e;
    double sg = 0.0;
    double sgx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sg += gs[i];
      sgx += gs[i] * xs[i];
      dst[i] = gs[i] * scale;
    }
    g_gamma[c] += sgx * e;
    g_beta[c] += sg * e;
  }
  return gx;
}

Tensor silu(const Tensor& x) {
  Tensor y(x.channels(), x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / (1.0 + std::exp(-x[i]));
  return y;
}

Tensor silu_backward(const Tensor& x, const Tensor& grad_out) {
  Tensor gx(x.channels(), x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-x[i]));
    gx[i] = grad_out[i] * (s + x[i] * s * (1.0 - s));
  }
  return gx;
}

Tensor upsample_nearest(const Tensor& x, int fh, int fw) {
  Tensor y(x.channels(), x.height() * fh, x.width() * fw);
  for (int c = 0; c < y.channels(); ++c) {
    for (int h = 0; h < y.height(); ++h) {
      for (int w = 0; w < y.width(); ++w) y.at(c, h, w) = x.at(c, h / fh, w / fw);
    }
  }
  return y;
}

Tensor upsample_nearest_backward(const Tensor& grad_out, int fh, int fw) {
  Tensor gx(grad_out.channels(), grad_out.height() / fh, grad_out.width() / fw);
  for (int c = 0; c < grad_out.channels(); ++c) {
    for (int h = 0; h < grad_out.height(); ++h) {
      for (int w = 0; w < grad_out.width(); ++w) gx.at(c, h / fh, w / fw) += grad_out.at(c, h, w);
    }
  }
  return gx;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.height() != b.height() || a.width() != b.width()) throw ConfigError("concat: spatial size mismatch");
  Tensor y(a.channels() + b.channels(), a.height(), a.width());
  std::copy(a.values().begin(), a.values().end(), y.values().begin());
  std::copy(b.values().begin(), b.values().end(), y.values().begin() + static_cast<std::ptrdiff_t>(a.size()));
  return y;
}

void split_channels(const Tensor& g, int a_channels, Tensor& ga, Tensor& gb) {
  ga = Tensor(a_channels, g.height(), g.width());
  gb = Tensor(g.channels() - a_channels, g.height(), g.width());
  std::copy(g.values().begin(), g.values().begin() + static_cast<std::ptrdiff_t>(ga.size()), ga.values().begin());
  std::copy(g.values().begin() + static_cast<std::ptrdiff_t>(ga.size()), g.values().end(), gb.values().begin());
}

}  // namespace radarsr::nn
