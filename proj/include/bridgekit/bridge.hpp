#pragma once

#include <cmath>
#include <utility>

#include "bridgekit/field.hpp"
#include "bridgekit/schedules.hpp"

namespace bridgekit {

// Elementwise schedule coefficients frozen at one time point.
struct Coefficients {
    double t = 0.0;
    PixelField alpha;
    PixelField gamma;
    PixelField beta;
};

inline Coefficients coefficients_at(double t, const PixelField& u, const ScheduleParams& p = {}) {
    Coefficients c;
    c.t = t;
    c.alpha = path_alpha(t, u, p);
    c.gamma = path_gamma(t, u, p);
    c.beta = noise_beta(t, u, p);
    return c;
}

struct PosteriorMoments {
    PixelField mean; // mu_tilde
    PixelField std;  // sigma_tilde, >= 0
    PixelField var;  // sigma_tilde^2, kept for oracle comparisons
};

struct ForwardSample {
    PixelField x_t;
    PixelField eps;
};

namespace detail {

inline PixelField mean_path(const PixelField& x_lq, const PixelField& x_hat0, const Coefficients& c) {
    // alpha*x_lq + gamma*x_hat0
    PixelField out = c.alpha;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = c.alpha.data[i] * x_lq.data[i] + c.gamma.data[i] * x_hat0.data[i];
    return out;
}

inline void require_beta_floor(const PixelField& beta, const char* what) {
    for (double b : beta.data)
        if (!(b >= kBetaFloor))
            raise(ErrorKind::BetaFloorViolated,
                  std::string(what) + ": beta below floor; the t = 0 step must use the direct-output branch");
}

} // namespace detail

// Draws x_t = alpha*x_lq + gamma*x_hq + beta*eps and returns the eps used,
// so training can regress against the exact noise realization.
inline ForwardSample forward_sample(const PixelField& x_hq, const PixelField& x_lq,
                                    const PixelField& u, double t, const ScheduleParams& p,
                                    RngState& rng) {
    require_same_shape(x_hq, x_lq, "forward_sample");
    require_same_shape(x_hq, u, "forward_sample u");
    Coefficients c = coefficients_at(t, u, p);
    ForwardSample out;
    out.eps = sample_gaussian_like(x_hq, rng);
    out.x_t = x_hq;
    for (std::size_t i = 0; i < out.x_t.size(); ++i)
        out.x_t.data[i] = c.alpha.data[i] * x_lq.data[i] + c.gamma.data[i] * x_hq.data[i] +
                          c.beta.data[i] * out.eps.data[i];
    return out;
}

// eps_pred = (x_t - alpha*x_lq - gamma*xhat0) / beta. Refuses beta at the
// floor: reaching t = 0 here means the sampler skipped its structural branch.
inline PixelField epsilon_from_prediction(const PixelField& x_t, const PixelField& x_lq,
                                          const PixelField& x_hat0, const Coefficients& c) {
    require_same_shape(x_t, x_lq, "epsilon_from_prediction");
    require_same_shape(x_t, x_hat0, "epsilon_from_prediction prediction");
    detail::require_beta_floor(c.beta, "epsilon_from_prediction");
    PixelField out = x_t;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = (x_t.data[i] - c.alpha.data[i] * x_lq.data[i] -
                       c.gamma.data[i] * x_hat0.data[i]) /
                      c.beta.data[i];
    return out;
}

// Exact reverse posterior q(x_s | x_t, x_lq, xhat0) for s < t:
//   mean = alpha_s*x_lq + gamma_s*xhat0 + (beta_s^2/beta_t^2)*(x_t - alpha_t*x_lq - gamma_t*xhat0)
//   var  = beta_s^2 * (beta_t^2 - beta_s^2) / beta_t^2
// Tiny negative rounding of var is absorbed; anything below -1e-10 signals a
// non-monotone beta upstream and is an error.
inline PosteriorMoments posterior_moments(const PixelField& x_t, const PixelField& x_lq,
                                          const PixelField& x_hat0, const Coefficients& coeff_t,
                                          const Coefficients& coeff_s) {
    require_same_shape(x_t, x_lq, "posterior_moments");
    require_same_shape(x_t, x_hat0, "posterior_moments prediction");
    if (!(coeff_s.t < coeff_t.t))
        raise(ErrorKind::InvalidParameters, "posterior_moments: needs s < t");
    detail::require_beta_floor(coeff_t.beta, "posterior_moments");
    for (std::size_t i = 0; i < coeff_t.beta.size(); ++i)
        if (!(coeff_s.beta.data[i] < coeff_t.beta.data[i]))
            raise(ErrorKind::NonMonotoneBeta, "posterior_moments: beta_s >= beta_t elementwise");

    PosteriorMoments out;
    out.mean = x_t;
    out.var = x_t;
    out.std = x_t;
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        double bt2 = coeff_t.beta.data[i] * coeff_t.beta.data[i];
        double bs2 = coeff_s.beta.data[i] * coeff_s.beta.data[i];
        double resid = x_t.data[i] - coeff_t.alpha.data[i] * x_lq.data[i] -
                       coeff_t.gamma.data[i] * x_hat0.data[i];
        out.mean.data[i] = coeff_s.alpha.data[i] * x_lq.data[i] +
                           coeff_s.gamma.data[i] * x_hat0.data[i] + (bs2 / bt2) * resid;
        double var = bs2 * (bt2 - bs2) / bt2;
        if (var < -1e-10)
            raise(ErrorKind::NonMonotoneBeta, "posterior_moments: negative variance");
        var = std::max(var, 0.0);
        out.var.data[i] = var;
        out.std.data[i] = std::sqrt(var);
    }
    return out;
}

// Stochastic reverse update x_s = mean + std * z. Always consumes one normal
// field draw, even where std is zero.
inline PixelField ddpm_step(const PixelField& x_t, const PixelField& x_lq,
                            const PixelField& x_hat0, const Coefficients& coeff_t,
                            const Coefficients& coeff_s, RngState& rng) {
    PosteriorMoments m = posterior_moments(x_t, x_lq, x_hat0, coeff_t, coeff_s);
    PixelField z = sample_gaussian_like(x_t, rng);
    PixelField out = m.mean;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += m.std.data[i] * z.data[i];
    return out;
}

// Deterministic reverse update:
//   x_s = alpha_s*x_lq + gamma_s*xhat0 + (beta_s/beta_t)*(x_t - alpha_t*x_lq - gamma_t*xhat0)
// Noise-preserving: the implied eps of the output equals the implied eps of
// the input, so a perfect prediction makes every grid equivalent.
inline PixelField ddim_step(const PixelField& x_t, const PixelField& x_lq,
                            const PixelField& x_hat0, const Coefficients& coeff_t,
                            const Coefficients& coeff_s) {
    require_same_shape(x_t, x_lq, "ddim_step");
    require_same_shape(x_t, x_hat0, "ddim_step prediction");
    if (!(coeff_s.t < coeff_t.t))
        raise(ErrorKind::InvalidParameters, "ddim_step: needs s < t");
    detail::require_beta_floor(coeff_t.beta, "ddim_step");
    PixelField out = x_t;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double resid = x_t.data[i] - coeff_t.alpha.data[i] * x_lq.data[i] -
                       coeff_t.gamma.data[i] * x_hat0.data[i];
        out.data[i] = coeff_s.alpha.data[i] * x_lq.data[i] +
                      coeff_s.gamma.data[i] * x_hat0.data[i] +
                      (coeff_s.beta.data[i] / coeff_t.beta.data[i]) * resid;
    }
    return out;
}

// Interpolated update with sigma = eta * sigma_posterior:
//   x_s = alpha_s*x_lq + gamma_s*xhat0 + sqrt(beta_s^2 - sigma^2)*eps_pred + sigma*z
// eta = 0 delegates to ddim_step so the collapse is bit-exact and consumes no
// randomness; eta = 1 matches ddpm_step in distribution.
inline PixelField general_step(const PixelField& x_t, const PixelField& x_lq,
                               const PixelField& x_hat0, const Coefficients& coeff_t,
                               const Coefficients& coeff_s, double eta, RngState& rng) {
    if (!(eta >= 0.0 && eta <= 1.0))
        raise(ErrorKind::InvalidParameters, "general_step: eta must be in [0,1]");
    if (eta == 0.0) return ddim_step(x_t, x_lq, x_hat0, coeff_t, coeff_s);
    PosteriorMoments m = posterior_moments(x_t, x_lq, x_hat0, coeff_t, coeff_s);
    PixelField eps_pred = epsilon_from_prediction(x_t, x_lq, x_hat0, coeff_t);
    PixelField z = sample_gaussian_like(x_t, rng);
    PixelField out = x_t;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double sigma = eta * m.std.data[i];
        double bs2 = coeff_s.beta.data[i] * coeff_s.beta.data[i];
        double det = std::sqrt(std::max(bs2 - sigma * sigma, 0.0));
        out.data[i] = coeff_s.alpha.data[i] * x_lq.data[i] +
                      coeff_s.gamma.data[i] * x_hat0.data[i] + det * eps_pred.data[i] +
                      sigma * z.data[i];
    }
    return out;
}

// Deterministic flow velocity
//   v = (beta_dot/beta) * (x_t - mu_t) + alpha_dot * (x_lq - xhat0)
// with mu_t = alpha*x_lq + gamma*xhat0. Finite at t = 1 because beta_1 = 1+u
// stays positive; for pi(u) < 1 the alpha_dot factor is undefined at the
// endpoints and the schedules error propagates.
inline PixelField pf_ode_velocity(const PixelField& x_t, const PixelField& x_lq,
                                  const PixelField& x_hat0, const PixelField& u, double t,
                                  const ScheduleParams& p = {}) {
    require_same_shape(x_t, x_lq, "pf_ode_velocity");
    require_same_shape(x_t, x_hat0, "pf_ode_velocity prediction");
    if (!(t > 0.0 && t <= 1.0))
        raise(ErrorKind::InvalidParameters, "pf_ode_velocity: t must be in (0,1]");
    Coefficients c = coefficients_at(t, u, p);
    detail::require_beta_floor(c.beta, "pf_ode_velocity");
    PixelField adot = alpha_dot(t, u, p);
    PixelField bdot = beta_dot(t, u, p);
    PixelField out = x_t;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double mu = c.alpha.data[i] * x_lq.data[i] + c.gamma.data[i] * x_hat0.data[i];
        out.data[i] = (bdot.data[i] / c.beta.data[i]) * (x_t.data[i] - mu) +
                      adot.data[i] * (x_lq.data[i] - x_hat0.data[i]);
    }
    return out;
}

inline std::vector<EquationMapEntry> bridge_equation_entries() {
    return {
        {"forward marginal", "x_t = alpha_t*x_lq + gamma_t*x_hq + beta_t*eps, eps ~ N(0, I)",
         "bridge.forward_sample", "bridge: forward sample composition and Monte Carlo mean"},
        {"implied noise", "eps_pred = (x_t - alpha_t*x_lq - gamma_t*xhat0) / beta_t",
         "bridge.epsilon_from_prediction", "bridge: epsilon recovery inverts the forward map"},
        {"reverse posterior moments",
         "mean = alpha_s*x_lq + gamma_s*xhat0 + (beta_s^2/beta_t^2)*(x_t - alpha_t*x_lq - gamma_t*xhat0); "
         "var = beta_s^2*(beta_t^2 - beta_s^2)/beta_t^2",
         "bridge.posterior_moments", "bridge: posterior moments hand case and terminal collapse"},
        {"stochastic reverse update", "x_s = mean + std*z, z ~ N(0, I)",
         "bridge.ddpm_step", "bridge: stochastic step matches posterior moments by Monte Carlo"},
        {"deterministic reverse update",
         "x_s = alpha_s*x_lq + gamma_s*xhat0 + (beta_s/beta_t)*(x_t - alpha_t*x_lq - gamma_t*xhat0)",
         "bridge.ddim_step", "bridge: deterministic step preserves the implied noise"},
        {"interpolated reverse update",
         "x_s = alpha_s*x_lq + gamma_s*xhat0 + sqrt(beta_s^2 - sigma^2)*eps_pred + sigma*z, sigma = eta*std",
         "bridge.general_step", "bridge: interpolated step collapses to both samplers"},
        {"flow velocity", "v = (beta_dot/beta)*(x_t - mu_t) + alpha_dot*(x_lq - xhat0)",
         "bridge.pf_ode_velocity", "bridge: flow velocity finite at terminal and on the mean path"},
    };
}

} // namespace bridgekit
