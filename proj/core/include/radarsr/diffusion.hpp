#pragma once

#include <vector>

#include "radarsr/rng.hpp"
#include "radarsr/tensor.hpp"

namespace radarsr {

/// Warped sigma grid: sigma_i = (smax^(1/rho) + i/(N-1) (smin^(1/rho) - smax^(1/rho)))^rho
/// for i < N, then a trailing 0. With N = 1 the grid is {sigma_max, 0}.
struct NoiseSchedule {
  double sigma_min = 0.002;
  double sigma_max = 80.0;
  double rho = 7.0;
  int n_steps = 32;
  std::vector<double> sigmas;  // n_steps + 1 entries, strictly decreasing, last exactly 0
};

NoiseSchedule make_schedule(double sigma_min = 0.002, double sigma_max = 80.0, double rho = 7.0, int n_steps = 32);

/// Conditional estimate of the clean sample from x_t at noise level sigma.
/// An empty condition tensor means unconditional. Implementations must be safe for
/// concurrent const calls.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Tensor denoise(const Tensor& x, double sigma, const Tensor& condition) const = 0;
};

/// Posterior mean for data ~ N(mu, s2 I): D(x, sigma) = (s2 x + sigma^2 mu) / (s2 + sigma^2).
class GaussianAnalyticDenoiser final : public Denoiser {
 public:
  GaussianAnalyticDenoiser(Tensor mu, double s2);

  const Tensor& mu() const { return mu_; }
  double s2() const { return s2_; }
  Tensor denoise(const Tensor& x, double sigma, const Tensor& condition) const override;

 private:
  Tensor mu_;
  double s2_;
};

/// x_t = x0 + sigma * n, n ~ N(0, I).
Tensor forward_corrupt(const Tensor& x0, double sigma, SeededRng& rng);

/// grad_x log p(x; sigma) = (D(x, sigma, c) - x) / sigma^2.
Tensor score_from_denoiser(const Denoiser& d, const Tensor& x, double sigma, const Tensor& condition);

/// dx/dsigma = (x - D(x, sigma, c)) / sigma, the probability-flow drift for sigma(t) = t.
Tensor pf_ode_rhs(const Denoiser& d, const Tensor& x, double sigma, const Tensor& condition);

/// Heun integration of the probability-flow ODE along the schedule starting from
/// `x_init` at sigma_max; the last step into sigma = 0 is a plain Euler step.
Tensor heun_integrate(const Denoiser& d, const NoiseSchedule& schedule, Tensor x_init, const Tensor& condition);

/// Draws x ~ N(0, sigma_max^2 I) of the given shape, then heun_integrate().
Tensor heun_sample(const Denoiser& d, const NoiseSchedule& schedule, int channels, int height, int width,
                   const Tensor& condition, SeededRng& rng);

/// Training noise levels: ln(sigma) ~ N(p_mean, p_std^2).
double sample_training_sigma(SeededRng& rng, double p_mean = -1.2, double p_std = 1.2);

}  // namespace radarsr
