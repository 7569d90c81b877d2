#include "radarsr/diffusion.hpp"

#include <cmath>

#include "radarsr/errors.hpp"

namespace radarsr {

NoiseSchedule make_schedule(double sigma_min, double sigma_max, double rho, int n_steps) {
  if (!(sigma_min > 0.0 && sigma_min < sigma_max) || !std::isfinite(sigma_max)) {
    throw ConfigError("schedule: need 0 < sigma_min < sigma_max");
  }
  if (!(rho >= 1.0)) throw ConfigError("schedule: rho must be >= 1");
  if (n_steps < 1) throw ConfigError("schedule: n_steps must be >= 1");

  NoiseSchedule s{sigma_min, sigma_max, rho, n_steps, {}};
  s.sigmas.resize(n_steps + 1);
  if (n_steps == 1) {
    s.sigmas[0] = sigma_max;
  } else {
    const double a = std::pow(sigma_max, 1.0 / rho);
    const double b = std::pow(sigma_min, 1.0 / rho);
    for (int i = 0; i < n_steps; ++i) {
      s.sigmas[i] = std::pow(a + static_cast<double>(i) / (n_steps - 1) * (b - a), rho);
    }
    s.sigmas[0] = sigma_max;
    s.sigmas[n_steps - 1] = sigma_min;
  }
  s.sigmas[n_steps] = 0.0;
  return s;
}

GaussianAnalyticDenoiser::GaussianAnalyticDenoiser(Tensor mu, double s2) : mu_(std::move(mu)), s2_(s2) {
  if (!(s2_ > 0.0)) throw ConfigError("gaussian denoiser: s2 must be > 0");
}

Tensor GaussianAnalyticDenoiser::denoise(const Tensor& x, double sigma, const Tensor&) const {
  if (!x.same_shape(mu_)) throw ConfigError("gaussian denoiser: shape mismatch");
  const double v = sigma * sigma;
  const double inv = 1.0 / (s2_ + v);
  Tensor out(x.channels(), x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (s2_ * x[i] + v * mu_[i]) * inv;
  return out;
}

Tensor forward_corrupt(const Tensor& x0, double sigma, SeededRng& rng) {
  if (!(sigma >= 0.0)) throw ConfigError("forward_corrupt: sigma must be >= 0");
  Tensor xt = x0;
  if (sigma == 0.0) return xt;
  for (std::size_t i = 0; i < xt.size(); ++i) xt[i] += sigma * rng.normal();
  return xt;
}

Tensor score_from_denoiser(const Denoiser& d, const Tensor& x, double sigma, const Tensor& condition) {
  if (!(sigma > 0.0)) throw ConfigError("score: sigma must be > 0");
  Tensor s = d.denoise(x, sigma, condition);
  const double inv = 1.0 / (sigma * sigma);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (s[i] - x[i]) * inv;
  return s;
}

Tensor pf_ode_rhs(const Denoiser& d, const Tensor& x, double sigma, const Tensor& condition) {
  if (!(sigma > 0.0)) throw ConfigError("pf_ode_rhs: sigma must be > 0");
  Tensor den = d.denoise(x, sigma, condition);
  if (!den.same_shape(x)) throw RuntimeError("denoiser changed the tensor shape");
  Tensor rhs(x.channels(), x.height(), x.width());
  for (std::size_t i = 0; i < x.size(); ++i) rhs[i] = (x[i] - den[i]) / sigma;
  return rhs;
}

Tensor heun_integrate(const Denoiser& d, const NoiseSchedule& schedule, Tensor x, const Tensor& condition) {
  const auto& s = schedule.sigmas;
  for (int i = 0; i + 1 < static_cast<int>(s.size()); ++i) {
    const double h = s[i + 1] - s[i];
    const Tensor slope = pf_ode_rhs(d, x, s[i], condition);
    Tensor next = x;
    next.axpy(h, slope);
    if (s[i + 1] > 0.0) {
      const Tensor slope2 = pf_ode_rhs(d, next, s[i + 1], condition);
      next = x;
      for (std::size_t k = 0; k < next.size(); ++k) next[k] += 0.5 * h * (slope[k] + slope2[k]);
    }
    x = std::move(next);
  }
  return x;
}

Tensor heun_sample(const Denoiser& d, const NoiseSchedule& schedule, int channels, int height, int width,
                   const Tensor& condition, SeededRng& rng) {
  Tensor x(channels, height, width);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = schedule.sigmas.front() * rng.normal();
  return heun_integrate(d, schedule, std::move(x), condition);
}

double sample_training_sigma(SeededRng& rng, double p_mean, double p_std) {
  return std::exp(p_mean + p_std * rng.normal());
}

}  // namespace radarsr
