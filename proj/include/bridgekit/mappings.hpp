#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bridgekit/equation_entry.hpp"
#include "bridgekit/error.hpp"

namespace bridgekit {

// Which endpoint the method's native t = 0 sits on.
enum class Orientation { clean_at_0, degraded_at_0 };

// Scalar coefficient triple of one method at one native time: x_t has
// coefficient `alpha` on the degraded image, `gamma` on the clean image and
// noise scale `beta`.
struct UnifiedCoefficients {
    double t = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    Orientation orientation = Orientation::clean_at_0;
};

using ScalarSchedule = std::function<double(double)>;

// Registry entry for one prior method's native schedule. Schedules are
// supplied as callables so published tables can be plugged in directly.
struct MethodSchedule {
    enum class Kind { ddbm_bb, i2sb_const_g, resshift, rddm, diffuir };

    Kind kind = Kind::ddbm_bb;
    Orientation orientation = Orientation::clean_at_0;
    double g = 1.0;               // i2sb_const_g
    ScalarSchedule eta_t;         // resshift
    ScalarSchedule sigma_t;       // resshift
    ScalarSchedule alpha_bar_t;   // rddm (decreasing 1 -> 0), diffuir (increasing 0 -> 1)
    ScalarSchedule delta_bar_t;   // diffuir
    ScalarSchedule beta_bar_t;    // diffuir

    static MethodSchedule ddbm_bb() {
        MethodSchedule m;
        m.kind = Kind::ddbm_bb;
        return m;
    }
    static MethodSchedule i2sb(double g) {
        if (!(g > 0.0)) raise(ErrorKind::InvalidParameters, "i2sb: needs g > 0");
        MethodSchedule m;
        m.kind = Kind::i2sb_const_g;
        m.orientation = Orientation::degraded_at_0;
        m.g = g;
        return m;
    }
    static MethodSchedule resshift(ScalarSchedule eta, ScalarSchedule sigma) {
        if (!eta || !sigma) raise(ErrorKind::InvalidParameters, "resshift: needs eta_t and sigma_t");
        MethodSchedule m;
        m.kind = Kind::resshift;
        m.eta_t = std::move(eta);
        m.sigma_t = std::move(sigma);
        return m;
    }
    static MethodSchedule rddm(ScalarSchedule alpha_bar) {
        if (!alpha_bar) raise(ErrorKind::InvalidParameters, "rddm: needs alpha_bar_t");
        MethodSchedule m;
        m.kind = Kind::rddm;
        m.alpha_bar_t = std::move(alpha_bar);
        return m;
    }
    static MethodSchedule diffuir(ScalarSchedule alpha_bar, ScalarSchedule delta_bar,
                                  ScalarSchedule beta_bar) {
        if (!alpha_bar || !delta_bar || !beta_bar)
            raise(ErrorKind::InvalidParameters, "diffuir: needs alpha_bar_t, delta_bar_t, beta_bar_t");
        MethodSchedule m;
        m.kind = Kind::diffuir;
        m.alpha_bar_t = std::move(alpha_bar);
        m.delta_bar_t = std::move(delta_bar);
        m.beta_bar_t = std::move(beta_bar);
        return m;
    }

    std::string name() const {
        switch (kind) {
            case Kind::ddbm_bb: return "ddbm_bb";
            case Kind::i2sb_const_g: return "i2sb";
            case Kind::resshift: return "resshift";
            case Kind::rddm: return "rddm";
            case Kind::diffuir: return "diffuir";
        }
        return "unknown";
    }
};

namespace detail {

inline double eval_schedule(const ScalarSchedule& fn, double t, const char* what) {
    double v = fn(t);
    if (!std::isfinite(v))
        raise(ErrorKind::InvalidParameters, std::string(what) + ": schedule not finite at queried t");
    return v;
}

} // namespace detail

// Express one method's state construction at native time t in the shared
// (alpha, gamma, beta) coefficient form.
inline UnifiedCoefficients to_unified(const MethodSchedule& m, double t) {
    if (!(t >= 0.0 && t <= 1.0)) raise(ErrorKind::InvalidParameters, "to_unified: t must be in [0,1]");
    UnifiedCoefficients c;
    c.t = t;
    c.orientation = m.orientation;
    switch (m.kind) {
        case MethodSchedule::Kind::ddbm_bb: {
            c.alpha = t;
            c.gamma = 1.0 - t;
            c.beta = std::sqrt(t * (1.0 - t));
            break;
        }
        case MethodSchedule::Kind::i2sb_const_g: {
            // Pinned-bridge weights for a constant diffusion rate g:
            // accumulated variances sig2_t = g^2 t from the start and
            // sig2_rem = g^2 (1-t) to the end; the state is their
            // precision-weighted endpoint mix, with bridge variance
            // sig2_t * sig2_rem / (sig2_t + sig2_rem).
            double sig2_t = m.g * m.g * t;
            double sig2_rem = m.g * m.g * (1.0 - t);
            double total = sig2_t + sig2_rem; // g^2, never 0
            c.alpha = sig2_rem / total;       // weight of the native-t=0 endpoint (degraded)
            c.gamma = sig2_t / total;
            c.beta = std::sqrt(sig2_t * sig2_rem / total);
            break;
        }
        case MethodSchedule::Kind::resshift: {
            double eta = detail::eval_schedule(m.eta_t, t, "resshift eta_t");
            double sigma = detail::eval_schedule(m.sigma_t, t, "resshift sigma_t");
            if (sigma < 0.0) raise(ErrorKind::InvalidParameters, "resshift: sigma_t must be >= 0");
            c.alpha = eta;
            c.gamma = 1.0 - eta;
            c.beta = sigma;
            break;
        }
        case MethodSchedule::Kind::rddm: {
            double ab = detail::eval_schedule(m.alpha_bar_t, t, "rddm alpha_bar_t");
            if (!(ab >= 0.0 && ab <= 1.0))
                raise(ErrorKind::InvalidParameters, "rddm: alpha_bar_t must be in [0,1]");
            c.alpha = 1.0 - std::sqrt(ab);
            c.gamma = std::sqrt(ab);
            c.beta = std::sqrt(1.0 - ab);
            break;
        }
        case MethodSchedule::Kind::diffuir: {
            double ab = detail::eval_schedule(m.alpha_bar_t, t, "diffuir alpha_bar_t");
            double db = detail::eval_schedule(m.delta_bar_t, t, "diffuir delta_bar_t");
            double bb = detail::eval_schedule(m.beta_bar_t, t, "diffuir beta_bar_t");
            if (bb < 0.0) raise(ErrorKind::InvalidParameters, "diffuir: beta_bar_t must be >= 0");
            c.alpha = ab - db;
            c.gamma = 1.0 - ab;
            c.beta = bb;
            break;
        }
    }
    return c;
}

// Flip the time axis (t -> 1-t) without touching the coefficient values:
// alpha stays the weight of the degraded image and gamma the weight of the
// clean image, only the label of which endpoint t = 0 points at changes.
// No-op when the orientation already matches; applying twice restores the
// original.
inline UnifiedCoefficients reorient(const UnifiedCoefficients& c, Orientation target) {
    if (c.orientation == target) return c;
    UnifiedCoefficients out = c;
    out.t = 1.0 - c.t;
    out.orientation = target;
    return out;
}

struct ConvexityRow {
    double t = 0.0;
    double alpha = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    double deviation = 0.0; // |alpha + gamma - 1|
};

// Per-t report of how far a method's endpoint weights stray from summing to
// one, the precondition of the straight-line mean-path argument.
inline std::vector<ConvexityRow> convexity_report(const MethodSchedule& m,
                                                  const std::vector<double>& t_grid) {
    std::vector<ConvexityRow> rows;
    rows.reserve(t_grid.size());
    for (double t : t_grid) {
        UnifiedCoefficients c = to_unified(m, t);
        ConvexityRow r;
        r.t = t;
        r.alpha = c.alpha;
        r.gamma = c.gamma;
        r.beta = c.beta;
        r.deviation = std::fabs(c.alpha + c.gamma - 1.0);
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<EquationMapEntry> mappings_equation_entries() {
    return {
        {"unified coefficient registry",
         "ddbm_bb: (t, 1-t, sqrt(t(1-t))); i2sb const-g: precision-weighted pinned bridge; "
         "resshift: (eta_t, 1-eta_t, sigma_t); rddm: (1-sqrt(ab), sqrt(ab), sqrt(1-ab)); "
         "diffuir: (ab-db, 1-ab, bb)",
         "mappings.to_unified", "mappings: native schedules translate to unified coefficients"},
    };
}

} // namespace bridgekit
