#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "bridgekit/equation_entry.hpp"
#include "bridgekit/field.hpp"

namespace bridgekit {

// Shape-preserving callable x_lq -> restored estimate.
using Restorer = std::function<PixelField(const PixelField&)>;

inline Restorer identity_restorer() {
    return [](const PixelField& x) { return x; };
}

inline Restorer oracle_restorer(PixelField x_hq) {
    return [x = std::move(x_hq)](const PixelField&) { return x; };
}

namespace detail {

inline void require_odd_kernel(int k, const char* what) {
    if (k < 1 || k % 2 == 0)
        raise(ErrorKind::InvalidParameters, std::string(what) + ": kernel size must be odd and >= 1");
}

inline int clamp_index(int v, int n) {
    if (v < 0) return 0;
    if (v >= n) return n - 1;
    return v;
}

inline double sigmoid(double x) {
    if (x > 40.0) return 1.0;
    if (x < -40.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

} // namespace detail

// k x k mean filter with edge replication; k = 1 is the identity.
inline Restorer box_filter_restorer(int k) {
    detail::require_odd_kernel(k, "box_filter_restorer");
    return [k](const PixelField& x) {
        PixelField out = x;
        int half = k / 2;
        for (int r = 0; r < x.height; ++r)
            for (int c = 0; c < x.width; ++c)
                for (int ch = 0; ch < x.channels; ++ch) {
                    double acc = 0.0;
                    for (int dr = -half; dr <= half; ++dr)
                        for (int dc = -half; dc <= half; ++dc)
                            acc += x.at(detail::clamp_index(r + dr, x.height),
                                        detail::clamp_index(c + dc, x.width), ch);
                    out.at(r, c, ch) = acc / static_cast<double>(k * k);
                }
        return out;
    };
}

// k x k median filter with edge replication.
inline Restorer median_restorer(int k) {
    detail::require_odd_kernel(k, "median_restorer");
    return [k](const PixelField& x) {
        PixelField out = x;
        int half = k / 2;
        std::vector<double> window;
        window.reserve(static_cast<std::size_t>(k) * k);
        for (int r = 0; r < x.height; ++r)
            for (int c = 0; c < x.width; ++c)
                for (int ch = 0; ch < x.channels; ++ch) {
                    window.clear();
                    for (int dr = -half; dr <= half; ++dr)
                        for (int dc = -half; dc <= half; ++dc)
                            window.push_back(x.at(detail::clamp_index(r + dr, x.height),
                                                  detail::clamp_index(c + dc, x.width), ch));
                    std::size_t mid = window.size() / 2;
                    std::nth_element(window.begin(), window.begin() + static_cast<long>(mid),
                                     window.end());
                    out.at(r, c, ch) = window[mid];
                }
        return out;
    };
}

// u = clip(|psi(x_lq) - x_lq| / 2, 0, 1): half the absolute residual of a
// cheap preliminary restoration, clipped defensively.
inline PixelField residual_uncertainty(const Restorer& psi, const PixelField& x_lq) {
    PixelField est = psi(x_lq);
    if (!est.same_shape(x_lq))
        raise(ErrorKind::RestorerShapeMismatch,
              "restorer returned " + est.shape_str() + " for input " + x_lq.shape_str());
    PixelField out = x_lq;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = 0.5 * std::fabs(est.data[i] - x_lq.data[i]);
    return clip(out, 0.0, 1.0);
}

// Gamma via the Lanczos approximation (g = 7, 9 terms), with reflection below
// 0.5. Relative error stays under 1e-12 across [0.5, 20].
inline double gamma_function(double x) {
    if (!(x > 0.0)) raise(ErrorKind::DomainError, "gamma_function: needs x > 0");
    static const double coef[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,       -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Gamma(x) = pi / (sin(pi x) * Gamma(1 - x))
        return M_PI / (std::sin(M_PI * x) * gamma_function(1.0 - x));
    }
    double z = x - 1.0;
    double acc = coef[0];
    for (int i = 1; i < 9; ++i) acc += coef[i] / (z + static_cast<double>(i));
    double t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

namespace detail {

// log Gamma through the same Lanczos series, for arguments where Gamma itself
// would overflow (3/beta_tilde can reach 3000 at the beta floor).
inline double log_gamma(double x) {
    static const double coef[9] = {
        0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
        771.32342877765313,       -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
    double z = x - 1.0;
    double acc = coef[0];
    for (int i = 1; i < 9; ++i) acc += coef[i] / (z + static_cast<double>(i));
    double t = z + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

} // namespace detail

// u = sigmoid(alpha_tilde^2 * Gamma(3/beta_tilde) / Gamma(1/beta_tilde)),
// the variance of a generalized Gaussian squashed to (0.5, 1). The Gamma
// ratio is evaluated in log space so small shape parameters saturate to 1
// instead of overflowing.
inline PixelField ggd_uncertainty(const PixelField& alpha_tilde, const PixelField& beta_tilde) {
    require_same_shape(alpha_tilde, beta_tilde, "ggd_uncertainty");
    PixelField out = alpha_tilde;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double a = alpha_tilde.data[i];
        double b = beta_tilde.data[i];
        if (!(a > 0.0)) raise(ErrorKind::DomainError, "ggd_uncertainty: alpha_tilde must be > 0");
        if (!(b >= 1e-3)) raise(ErrorKind::DomainError, "ggd_uncertainty: beta_tilde must be >= 1e-3");
        double hi = 3.0 / b;
        double lo = 1.0 / b;
        double log_arg;
        if (hi > 20.0) {
            log_arg = 2.0 * std::log(a) + detail::log_gamma(hi) - detail::log_gamma(lo);
        } else {
            log_arg = std::log(a * a * gamma_function(hi) / gamma_function(lo));
        }
        // sigmoid argument is always positive here; its log decides saturation
        double u = (log_arg > std::log(40.0)) ? 1.0 : detail::sigmoid(std::exp(log_arg));
        out.data[i] = u;
    }
    return out;
}

// L = mean_i [ exp(-s_i) * r_i^2 / 2 + s_i / 2 ] with r = x_hq - x_hat;
// per-pixel log-variance s. Stationary in s at s = log r^2.
inline double heteroscedastic_nll(const PixelField& x_hq, const PixelField& x_hat,
                                  const PixelField& s) {
    require_same_shape(x_hq, x_hat, "heteroscedastic_nll");
    require_same_shape(x_hq, s, "heteroscedastic_nll log-variance");
    double acc = 0.0;
    for (std::size_t i = 0; i < x_hq.size(); ++i) {
        double r = x_hq.data[i] - x_hat.data[i];
        acc += 0.5 * std::exp(-s.data[i]) * r * r + 0.5 * s.data[i];
    }
    return acc / static_cast<double>(x_hq.size());
}

inline std::vector<EquationMapEntry> uncertainty_equation_entries() {
    return {
        {"residual uncertainty", "u = clip(|psi(x_lq) - x_lq| / 2, 0, 1)",
         "uncertainty.residual_uncertainty", "uncertainty: residual estimator on restorers"},
        {"generalized gaussian uncertainty",
         "u = sigmoid(alpha_tilde^2 * Gamma(3/beta_tilde) / Gamma(1/beta_tilde))",
         "uncertainty.ggd_uncertainty", "uncertainty: generalized gaussian variance through sigmoid"},
        {"heteroscedastic negative log-likelihood",
         "L = mean_i [ exp(-s_i) * (x_hq_i - xhat_i)^2 / 2 + s_i / 2 ]",
         "uncertainty.heteroscedastic_nll", "uncertainty: heteroscedastic loss value and stationarity"},
        {"gamma function", "Gamma(x) via Lanczos (g = 7, 9 terms) with reflection below 0.5",
         "uncertainty.gamma_function", "uncertainty: gamma approximation accuracy and recurrence"},
    };
}

} // namespace bridgekit
