#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bridgekit/equation_entry.hpp"
#include "bridgekit/field.hpp"

namespace bridgekit {

// Hard floor for beta divisors: reaching it means the caller hit t = 0
// without taking the direct-output branch, which is a logic error.
inline constexpr double kBetaFloor = 1e-9;

// Scalar hyperparameters shared by the path and noise schedules.
//
//   lambda_b : gain of the t(1-t) bridge-shaped noise term, valid on (0, 2]
//              (keeps beta strictly increasing in t, see beta_dot)
//   pi_ot    : path exponent at u = 0 (constant-speed transport)
//   pi_eot   : path exponent at u = 1 (entropic, midpoint-slowed transport)
//   t_floor  : clamp for t inside exponent formulas; exact endpoint values
//              are produced by explicit branches, never by the formula
struct ScheduleParams {
    double lambda_b = 1.0;
    double pi_ot = 1.0;
    double pi_eot = 0.5;
    double t_floor = 1e-9;
};

namespace detail {

inline void require_unit_range(const PixelField& u, const char* what) {
    for (double v : u.data)
        if (!(v >= 0.0 && v <= 1.0))
            raise(ErrorKind::UncertaintyOutOfRange,
                  std::string(what) + ": u outside [0,1], got " + std::to_string(v));
}

inline void require_time_range(double t, const char* what) {
    if (!(t >= 0.0 && t <= 1.0))
        raise(ErrorKind::InvalidParameters, std::string(what) + ": t outside [0,1], got " + std::to_string(t));
}

} // namespace detail

// pi(u) = (1-u) * pi_ot + u * pi_eot, elementwise.
inline PixelField exponent_pi(const PixelField& u, const ScheduleParams& p = {}) {
    detail::require_unit_range(u, "exponent_pi");
    PixelField out = u;
    for (auto& v : out.data) v = (1.0 - v) * p.pi_ot + v * p.pi_eot;
    return out;
}

// alpha_t(u) = t^pi / (t^pi + (1-t)^pi). Endpoints are exact by branch.
inline PixelField path_alpha(double t, const PixelField& u, const ScheduleParams& p = {}) {
    detail::require_time_range(t, "path_alpha");
    if (t == 0.0) return PixelField(u.height, u.width, u.channels, 0.0);
    if (t == 1.0) return PixelField(u.height, u.width, u.channels, 1.0);
    PixelField pi = exponent_pi(u, p);
    double tc = std::min(std::max(t, p.t_floor), 1.0 - p.t_floor);
    PixelField out = pi;
    for (auto& v : out.data) {
        double tp = std::pow(tc, v);
        double sp = std::pow(1.0 - tc, v);
        v = tp / (tp + sp);
    }
    return out;
}

// gamma_t(u) = 1 - alpha_t(u): the convexity constraint that keeps the mean
// path a straight segment between the two endpoint images.
inline PixelField path_gamma(double t, const PixelField& u, const ScheduleParams& p = {}) {
    PixelField out = path_alpha(t, u, p);
    for (auto& v : out.data) v = 1.0 - v;
    return out;
}

// beta_t(u) = lambda_b*(1+u)*t*(1-t) + (1+u)*t^2.
// beta_0 = 0 and beta_1 = 1+u hold exactly (both terms evaluate exactly there).
inline PixelField noise_beta(double t, const PixelField& u, const ScheduleParams& p = {}) {
    detail::require_time_range(t, "noise_beta");
    detail::require_unit_range(u, "noise_beta");
    PixelField out = u;
    double bridge = p.lambda_b * t * (1.0 - t);
    double relax = t * t;
    for (auto& v : out.data) v = (1.0 + v) * (bridge + relax);
    return out;
}

// Kinetic velocity V_t(u) = d alpha/dt = pi * (t(1-t))^(pi-1) / (t^pi + (1-t)^pi)^2.
// At the midpoint this is exactly pi(u). For pi < 1 the (t(1-t))^(pi-1) factor
// diverges at the endpoints, so t in {0,1} is refused rather than extrapolated.
inline PixelField alpha_dot(double t, const PixelField& u, const ScheduleParams& p = {}) {
    detail::require_time_range(t, "alpha_dot");
    PixelField pi = exponent_pi(u, p);
    if (t == 0.0 || t == 1.0) {
        for (double v : pi.data)
            if (v < 1.0)
                raise(ErrorKind::EndpointVelocityUndefined,
                      "alpha_dot: velocity diverges at t = " + std::to_string(t) + " for pi < 1");
    }
    double tc = std::min(std::max(t, p.t_floor), 1.0 - p.t_floor);
    PixelField out = pi;
    for (auto& v : out.data) {
        double tp = std::pow(tc, v);
        double sp = std::pow(1.0 - tc, v);
        double denom = tp + sp;
        v = v * std::pow(tc * (1.0 - tc), v - 1.0) / (denom * denom);
    }
    return out;
}

// d beta/dt = (1+u) * (lambda_b*(1-2t) + 2t); linear in t, positive on [0,1]
// for lambda_b in (0,2] (endpoint values lambda_b and 2-lambda_b).
inline PixelField beta_dot(double t, const PixelField& u, const ScheduleParams& p = {}) {
    detail::require_time_range(t, "beta_dot");
    detail::require_unit_range(u, "beta_dot");
    PixelField out = u;
    double slope = p.lambda_b * (1.0 - 2.0 * t) + 2.0 * t;
    for (auto& v : out.data) v = (1.0 + v) * slope;
    return out;
}

struct ScheduleValidation {
    bool ok = true;
    std::vector<std::string> violations;
};

inline ScheduleValidation validate(const ScheduleParams& p) {
    ScheduleValidation r;
    auto flag = [&](const std::string& msg) {
        r.ok = false;
        r.violations.push_back(msg);
    };
    if (!(p.lambda_b > 0.0)) flag("lambda_b must be > 0");
    if (p.lambda_b > 2.0) flag("beta non-monotone risk: lambda_b > 2 makes dbeta/dt negative near t = 1");
    if (!(p.pi_eot > 0.0)) flag("pi_eot must be > 0");
    if (!(p.pi_eot <= p.pi_ot)) flag("pi_eot must be <= pi_ot");
    if (!(p.t_floor > 0.0)) flag("t_floor must be > 0");
    return r;
}

// min over elements of (1+u)^2: the scalar variance floor used by the
// relaxed-drift analysis.
inline double sigma_min_sq(const PixelField& u) {
    detail::require_unit_range(u, "sigma_min_sq");
    double m = std::numeric_limits<double>::infinity();
    for (double v : u.data) m = std::min(m, (1.0 + v) * (1.0 + v));
    return m;
}

inline std::vector<EquationMapEntry> schedules_equation_entries() {
    return {
        {"uncertainty-adaptive path exponent", "pi(u) = (1-u)*pi_ot + u*pi_eot",
         "schedules.exponent_pi", "schedules: exponent interpolates between transport regimes"},
        {"path schedule", "alpha_t(u) = t^pi / (t^pi + (1-t)^pi)",
         "schedules.path_alpha", "schedules: path alpha closed form and exact boundaries"},
        {"convexity-constrained complement", "gamma_t(u) = 1 - alpha_t(u)",
         "schedules.path_gamma", "schedules: path gamma is the convex complement"},
        {"noise schedule", "beta_t(u) = lambda_b*(1+u)*t*(1-t) + (1+u)*t^2",
         "schedules.noise_beta", "schedules: noise beta closed form and exact boundaries"},
        {"kinetic velocity", "V_t(u) = pi*(t*(1-t))^(pi-1) / (t^pi + (1-t)^pi)^2; V at t=1/2 equals pi(u)",
         "schedules.alpha_dot", "schedules: kinetic velocity formula, midpoint law and endpoints"},
        {"noise schedule derivative", "dbeta/dt = (1+u)*(lambda_b*(1-2t) + 2t)",
         "schedules.beta_dot", "schedules: beta time-derivative matches finite differences"},
    };
}

} // namespace bridgekit
