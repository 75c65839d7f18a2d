#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bridgekit/bridge.hpp"
#include "bridgekit/uncertainty.hpp"

namespace bridgekit {

struct DriftPoint {
    double one_minus_t = 0.0;
    double mean_drift_norm = 0.0;
    double mean_dist = 0.0; // E ||x_lq - x_t||_2 over the same recorded states
};

// Monte-Carlo drift magnitudes along a time grid, ordered by decreasing
// one_minus_t. The relaxed variant may include the terminal point itself,
// stored with one_minus_t = 0.
struct DriftCurve {
    std::string bridge_type;
    double sigma_min_sq = 1.0;
    std::size_t n_paths = 0;
    std::vector<DriftPoint> points;
};

namespace detail {

inline std::vector<double> sorted_strict_grid(const std::vector<double>& t_grid, double t_max,
                                              const char* what) {
    if (t_grid.empty()) raise(ErrorKind::GridOutOfRange, std::string(what) + ": empty grid");
    std::vector<double> ts = t_grid;
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        if (!(ts[i] < ts[i + 1]))
            raise(ErrorKind::GridOutOfRange, std::string(what) + ": duplicate grid time");
    if (!(ts.front() >= 0.0 && ts.back() <= t_max))
        raise(ErrorKind::GridOutOfRange, std::string(what) + ": grid time outside allowed range");
    return ts;
}

} // namespace detail

// Mean drift magnitude (x_lq - x_t)/(1-t) of the hard-pinned bridge,
// simulated by Euler-Maruyama from x_hq with steps that shrink geometrically
// toward the terminal (dt = 0.1*(1-t) clamped to [1e-4, 1e-3]). The grid must
// stay at least 1e-4 away from t = 1, where this drift has no finite value.
inline DriftCurve strict_drift_curve(const PixelField& x_hq, const PixelField& x_lq,
                                     const std::vector<double>& t_grid, std::size_t n_paths,
                                     RngState& rng) {
    require_same_shape(x_hq, x_lq, "strict_drift_curve");
    if (n_paths < 100)
        raise(ErrorKind::InvalidParameters, "strict_drift_curve: needs at least 100 paths");
    std::vector<double> ts = detail::sorted_strict_grid(t_grid, 1.0 - 1e-4, "strict_drift_curve");

    std::vector<double> acc(ts.size(), 0.0);
    std::vector<double> dist_acc(ts.size(), 0.0);
    PixelField x = x_hq;
    PixelField drift = x_hq;
    for (std::size_t path = 0; path < n_paths; ++path) {
        RngState prng = rng.fork(path);
        x = x_hq;
        double tau = 0.0;
        for (std::size_t gi = 0; gi < ts.size(); ++gi) {
            double target = ts[gi];
            while (tau < target) {
                double dt = std::clamp(0.1 * (1.0 - tau), 1e-4, 1e-3);
                dt = std::min(dt, target - tau);
                double sqdt = std::sqrt(dt);
                for (std::size_t i = 0; i < x.size(); ++i)
                    x.data[i] += (x_lq.data[i] - x.data[i]) / (1.0 - tau) * dt +
                                 sqdt * prng.next_normal();
                tau += dt;
            }
            for (std::size_t i = 0; i < x.size(); ++i)
                drift.data[i] = (x_lq.data[i] - x.data[i]) / (1.0 - target);
            double dn = reduce(drift, ReduceStat::l2_norm);
            acc[gi] += dn;
            dist_acc[gi] += dn * (1.0 - target);
        }
    }

    DriftCurve curve;
    curve.bridge_type = "strict";
    curve.sigma_min_sq = 0.0;
    curve.n_paths = n_paths;
    for (std::size_t gi = 0; gi < ts.size(); ++gi)
        curve.points.push_back({1.0 - ts[gi], acc[gi] / static_cast<double>(n_paths),
                                dist_acc[gi] / static_cast<double>(n_paths)});
    return curve;
}

enum class RelaxedDriftForm {
    scalar_min,  // denominator (1-t) + min((1+u)^2), one scalar for the whole field
    elementwise, // denominator (1-t) + (1+u_i)^2 per element
};

// Mean drift magnitude of the soft-pinned bridge, with the terminal variance
// in the denominator: (x_lq - x_t) / ((1-t) + sigma_min^2). States are exact
// draws of the forward marginal (no discretization needed), so the grid may
// include t = 1 itself.
inline DriftCurve relaxed_drift_curve(const PixelField& x_hq, const PixelField& x_lq,
                                      const PixelField& u, const std::vector<double>& t_grid,
                                      std::size_t n_paths, RngState& rng,
                                      RelaxedDriftForm form = RelaxedDriftForm::scalar_min) {
    require_same_shape(x_hq, x_lq, "relaxed_drift_curve");
    require_same_shape(x_hq, u, "relaxed_drift_curve u");
    if (n_paths < 100)
        raise(ErrorKind::InvalidParameters, "relaxed_drift_curve: needs at least 100 paths");
    std::vector<double> ts = detail::sorted_strict_grid(t_grid, 1.0, "relaxed_drift_curve");

    ScheduleParams p;
    double smin2 = sigma_min_sq(u);
    std::vector<double> acc(ts.size(), 0.0);
    std::vector<double> dist_acc(ts.size(), 0.0);
    PixelField drift = x_hq;
    PixelField dist = x_hq;
    for (std::size_t path = 0; path < n_paths; ++path) {
        RngState prng = rng.fork(path);
        for (std::size_t gi = 0; gi < ts.size(); ++gi) {
            double t = ts[gi];
            ForwardSample fs = forward_sample(x_hq, x_lq, u, t, p, prng);
            for (std::size_t i = 0; i < drift.size(); ++i) {
                double denom = (form == RelaxedDriftForm::scalar_min)
                                   ? (1.0 - t) + smin2
                                   : (1.0 - t) + (1.0 + u.data[i]) * (1.0 + u.data[i]);
                dist.data[i] = x_lq.data[i] - fs.x_t.data[i];
                drift.data[i] = dist.data[i] / denom;
            }
            acc[gi] += reduce(drift, ReduceStat::l2_norm);
            dist_acc[gi] += reduce(dist, ReduceStat::l2_norm);
        }
    }

    DriftCurve curve;
    curve.bridge_type =
        (form == RelaxedDriftForm::scalar_min) ? "relaxed_min" : "relaxed_elementwise";
    curve.sigma_min_sq = smin2;
    curve.n_paths = n_paths;
    for (std::size_t gi = 0; gi < ts.size(); ++gi)
        curve.points.push_back({1.0 - ts[gi], acc[gi] / static_cast<double>(n_paths),
                                dist_acc[gi] / static_cast<double>(n_paths)});
    return curve;
}

struct LoglogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

// Least-squares line through (log x, log y) for curve points with
// one_minus_t inside [lo, hi]. Needs three usable (positive) points.
inline LoglogFit fit_loglog_slope(const DriftCurve& curve, double lo, double hi) {
    std::vector<double> xs, ys;
    for (const DriftPoint& pt : curve.points)
        if (pt.one_minus_t >= lo && pt.one_minus_t <= hi && pt.one_minus_t > 0.0 &&
            pt.mean_drift_norm > 0.0) {
            xs.push_back(std::log(pt.one_minus_t));
            ys.push_back(std::log(pt.mean_drift_norm));
        }
    if (xs.size() < 3)
        raise(ErrorKind::InsufficientPoints, "fit_loglog_slope: fewer than 3 usable points in window");

    double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LoglogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy < 1e-30) {
        fit.r2 = 1.0; // constant curve: the zero-slope line is an exact fit
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
            ss_res += e * e;
        }
        fit.r2 = 1.0 - ss_res / syy;
    }
    return fit;
}

// Cosine similarity between the ideal displacement x_hq - x_lq and the
// achieved displacement x_restored - x_lq over flattened fields.
inline double endpoint_alignment(const PixelField& x_lq, const PixelField& x_hq,
                                 const PixelField& x_restored) {
    require_same_shape(x_lq, x_hq, "endpoint_alignment");
    require_same_shape(x_lq, x_restored, "endpoint_alignment restored");
    double dot = 0.0, n_ideal = 0.0, n_pred = 0.0;
    for (std::size_t i = 0; i < x_lq.size(); ++i) {
        double vi = x_hq.data[i] - x_lq.data[i];
        double vp = x_restored.data[i] - x_lq.data[i];
        dot += vi * vp;
        n_ideal += vi * vi;
        n_pred += vp * vp;
    }
    if (n_ideal == 0.0 || n_pred == 0.0)
        raise(ErrorKind::ZeroVector, "endpoint_alignment: a displacement vector is zero");
    return dot / (std::sqrt(n_ideal) * std::sqrt(n_pred));
}

// Mean silhouette over points with the plain Euclidean definition. Points in
// singleton clusters score 0, as do points whose max(a, b) is 0.
inline double silhouette(const std::vector<std::vector<double>>& points,
                         const std::vector<std::string>& labels) {
    if (points.size() != labels.size())
        raise(ErrorKind::InvalidParameters, "silhouette: points and labels disagree in length");
    if (points.size() < 2)
        raise(ErrorKind::DegenerateClustering, "silhouette: needs at least 2 points");
    std::size_t dim = points[0].size();
    for (const auto& pt : points)
        if (pt.size() != dim)
            raise(ErrorKind::InvalidParameters, "silhouette: inconsistent point dimensions");

    std::vector<std::string> tags = labels;
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    if (tags.size() < 2)
        raise(ErrorKind::DegenerateClustering, "silhouette: needs at least 2 clusters");

    auto dist = [&](std::size_t i, std::size_t j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            double d = points[i][k] - points[j][k];
            acc += d * d;
        }
        return std::sqrt(acc);
    };

    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double own_sum = 0.0;
        std::size_t own_count = 0;
        std::vector<double> other_sum(tags.size(), 0.0);
        std::vector<std::size_t> other_count(tags.size(), 0);
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            if (labels[j] == labels[i]) {
                own_sum += dist(i, j);
                ++own_count;
            } else {
                std::size_t ti = static_cast<std::size_t>(
                    std::lower_bound(tags.begin(), tags.end(), labels[j]) - tags.begin());
                other_sum[ti] += dist(i, j);
                ++other_count[ti];
            }
        }
        if (own_count == 0) continue; // singleton cluster scores 0
        double a = own_sum / static_cast<double>(own_count);
        double b = 0.0;
        bool first = true;
        for (std::size_t ti = 0; ti < tags.size(); ++ti)
            if (other_count[ti] > 0) {
                double m = other_sum[ti] / static_cast<double>(other_count[ti]);
                if (first || m < b) b = m;
                first = false;
            }
        double denom = std::max(a, b);
        total += (denom == 0.0) ? 0.0 : (b - a) / denom;
    }
    return total / static_cast<double>(points.size());
}

// Top-k principal-component projection via power iteration with deflation.
// The start vector is a fixed deterministic pattern, so results are
// reproducible without consuming any RNG stream.
inline std::vector<std::vector<double>> pca_project(const std::vector<std::vector<double>>& points,
                                                    std::size_t n_components = 2) {
    if (points.empty()) raise(ErrorKind::InvalidParameters, "pca_project: no points");
    std::size_t n = points.size();
    std::size_t d = points[0].size();
    for (const auto& pt : points)
        if (pt.size() != d) raise(ErrorKind::InvalidParameters, "pca_project: ragged points");

    std::vector<double> mean(d, 0.0);
    for (const auto& pt : points)
        for (std::size_t k = 0; k < d; ++k) mean[k] += pt[k];
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<std::vector<double>> centered(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) centered[i][k] = points[i][k] - mean[k];

    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a) {
            double va = centered[i][a];
            if (va == 0.0) continue;
            for (std::size_t b = 0; b < d; ++b) cov[a][b] += va * centered[i][b];
        }
    double denom = (n > 1) ? static_cast<double>(n - 1) : 1.0;
    for (auto& row : cov)
        for (double& v : row) v /= denom;

    std::vector<std::vector<double>> components;
    std::vector<double> v(d), cv(d);
    for (std::size_t comp = 0; comp < n_components; ++comp) {
        for (std::size_t k = 0; k < d; ++k) v[k] = std::sin(0.7373 * static_cast<double>(k) + 1.0);
        double lambda = 0.0;
        for (int iter = 0; iter < 300; ++iter) {
            for (std::size_t a = 0; a < d; ++a) {
                double acc = 0.0;
                for (std::size_t b = 0; b < d; ++b) acc += cov[a][b] * v[b];
                cv[a] = acc;
            }
            double norm = 0.0;
            for (double x : cv) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < 1e-300) break; // covariance exhausted; keep zero component
            for (std::size_t k = 0; k < d; ++k) v[k] = cv[k] / norm;
            lambda = norm;
        }
        components.push_back(v);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) cov[a][b] -= lambda * v[a] * v[b];
    }

    std::vector<std::vector<double>> projected(n, std::vector<double>(n_components, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t comp = 0; comp < n_components; ++comp) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += centered[i][k] * components[comp][k];
            projected[i][comp] = acc;
        }
    return projected;
}

// Synthetic degradation families used as cluster labels in the alignment
// experiment and as the toy pipeline's corruption operators.
struct Degradation {
    enum class Kind { additive_noise, gamma_darken, box_blur, streaks };

    Kind kind = Kind::additive_noise;
    double sigma = 0.0;     // additive_noise
    double gamma_exp = 1.0; // gamma_darken
    int k = 1;              // box_blur
    int count = 0;          // streaks
    double angle = 0.0;     // streaks, radians
    double intensity = 0.0; // streaks

    static Degradation additive_noise(double sigma) {
        Degradation d;
        d.kind = Kind::additive_noise;
        d.sigma = sigma;
        return d;
    }
    static Degradation gamma_darken(double gamma_exp) {
        Degradation d;
        d.kind = Kind::gamma_darken;
        d.gamma_exp = gamma_exp;
        return d;
    }
    static Degradation box_blur(int k) {
        Degradation d;
        d.kind = Kind::box_blur;
        d.k = k;
        return d;
    }
    static Degradation streaks(int count, double angle, double intensity) {
        Degradation d;
        d.kind = Kind::streaks;
        d.count = count;
        d.angle = angle;
        d.intensity = intensity;
        return d;
    }

    std::string tag() const {
        switch (kind) {
            case Kind::additive_noise: return "additive_noise";
            case Kind::gamma_darken: return "gamma_darken";
            case Kind::box_blur: return "box_blur";
            case Kind::streaks: return "streaks";
        }
        return "unknown";
    }
};

inline PixelField apply_degradation(const PixelField& x_hq, const Degradation& d, RngState& rng) {
    switch (d.kind) {
        case Degradation::Kind::additive_noise: {
            if (!(d.sigma >= 0.0))
                raise(ErrorKind::InvalidParameters, "apply_degradation: sigma must be >= 0");
            PixelField out = x_hq;
            if (d.sigma > 0.0)
                for (double& v : out.data) v += d.sigma * rng.next_normal();
            return clip(out, 0.0, 1.0);
        }
        case Degradation::Kind::gamma_darken: {
            if (!(d.gamma_exp > 0.0))
                raise(ErrorKind::InvalidParameters, "apply_degradation: gamma_exp must be > 0");
            PixelField out = clip(x_hq, 0.0, 1.0);
            if (d.gamma_exp != 1.0)
                for (double& v : out.data) v = std::pow(v, d.gamma_exp);
            return out;
        }
        case Degradation::Kind::box_blur: {
            detail::require_odd_kernel(d.k, "apply_degradation box_blur");
            return clip(box_filter_restorer(d.k)(x_hq), 0.0, 1.0);
        }
        case Degradation::Kind::streaks: {
            if (d.count < 0 || !(d.intensity >= 0.0) || !std::isfinite(d.angle))
                raise(ErrorKind::InvalidParameters, "apply_degradation: bad streak parameters");
            PixelField out = x_hq;
            double dr = std::sin(d.angle);
            double dc = std::cos(d.angle);
            double len = 2.0 * static_cast<double>(std::max(out.height, out.width));
            // Anchors are evenly spaced along the perpendicular of the streak
            // direction, so the mask is a fan of parallel lines covering the
            // image and depends only on (count, angle, shape): every image
            // degraded with the same parameters carries the same occlusion
            // pattern.
            double span = 0.9 * std::hypot(static_cast<double>(out.height),
                                           static_cast<double>(out.width));
            for (int s = 0; s < d.count; ++s) {
                double f = (static_cast<double>(s) + 0.5) / static_cast<double>(d.count) - 0.5;
                double r0 = 0.5 * static_cast<double>(out.height) - f * span * dc;
                double c0 = 0.5 * static_cast<double>(out.width) + f * span * dr;
                for (double step = -len; step <= len; step += 0.5) {
                    int r = static_cast<int>(std::lround(r0 + step * dr));
                    int c = static_cast<int>(std::lround(c0 + step * dc));
                    if (r < 0 || c < 0 || r >= out.height || c >= out.width) continue;
                    for (int ch = 0; ch < out.channels; ++ch)
                        out.at(r, c, ch) = std::min(1.0, out.at(r, c, ch) + d.intensity);
                }
            }
            return clip(out, 0.0, 1.0);
        }
    }
    raise(ErrorKind::InvalidParameters, "apply_degradation: unknown kind");
}

// Cluster-separation curve: every degradation is applied to every clean
// image (x_lq derived internally; u_per_pair indexed tag-major, i.e.
// tag_index * n_images + image_index), states are drawn from the forward
// marginal at each grid time, projected to the top-2 principal components
// and scored by silhouette against the degradation tags.
inline std::vector<std::pair<double, double>> manifold_alignment_curve(
    const std::vector<PixelField>& x_hq_set, const std::vector<Degradation>& degradations,
    const std::vector<PixelField>& u_per_pair, const std::vector<double>& t_grid,
    const ScheduleParams& p, RngState& rng) {
    if (degradations.size() < 2)
        raise(ErrorKind::DegenerateClustering, "manifold_alignment_curve: needs >= 2 degradation tags");
    if (x_hq_set.size() < 4)
        raise(ErrorKind::InvalidParameters, "manifold_alignment_curve: needs >= 4 images per tag");
    std::size_t n_images = x_hq_set.size();
    std::size_t n_pairs = n_images * degradations.size();
    if (u_per_pair.size() != n_pairs)
        raise(ErrorKind::InvalidParameters,
              "manifold_alignment_curve: u_per_pair must have one field per (tag, image) pair");
    if (t_grid.empty())
        raise(ErrorKind::GridOutOfRange, "manifold_alignment_curve: empty t grid");

    std::vector<PixelField> x_lq_pairs;
    std::vector<std::string> labels;
    x_lq_pairs.reserve(n_pairs);
    labels.reserve(n_pairs);
    for (std::size_t di = 0; di < degradations.size(); ++di)
        for (std::size_t ii = 0; ii < n_images; ++ii) {
            std::size_t pair = di * n_images + ii;
            RngState drng = rng.fork(pair);
            x_lq_pairs.push_back(apply_degradation(x_hq_set[ii], degradations[di], drng));
            labels.push_back(degradations[di].tag());
        }

    std::vector<std::pair<double, double>> curve;
    curve.reserve(t_grid.size());
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        double t = t_grid[ti];
        if (!(t >= 0.0 && t <= 1.0))
            raise(ErrorKind::GridOutOfRange, "manifold_alignment_curve: t outside [0,1]");
        std::vector<std::vector<double>> features;
        features.reserve(n_pairs);
        for (std::size_t di = 0; di < degradations.size(); ++di)
            for (std::size_t ii = 0; ii < n_images; ++ii) {
                std::size_t pair = di * n_images + ii;
                RngState srng = rng.fork(n_pairs + ti * n_pairs + pair);
                ForwardSample fs = forward_sample(x_hq_set[ii], x_lq_pairs[pair], u_per_pair[pair],
                                                  t, p, srng);
                features.push_back(fs.x_t.data);
            }
        std::vector<std::vector<double>> projected = pca_project(features, 2);
        curve.emplace_back(t, silhouette(projected, labels));
    }
    return curve;
}

// Independent Monte-Carlo check of posterior_moments on a scalar pixel:
// sample (x_s, x_t) jointly from the forward construction, keep the half of
// the samples whose x_t lands nearest the marginal mean, fit a line to x_s
// over x_t inside that bin (the true conditional mean is exactly linear) and
// compare the fitted value and residual variance at the bin center against
// the analytic posterior.
struct CompositionReport {
    double analytic_mean = 0.0;
    double empirical_mean = 0.0;
    double mean_err = 0.0; // |empirical - analytic|
    double mean_se = 0.0;  // standard error of the fitted value at the bin center
    double analytic_var = 0.0;
    double empirical_var = 0.0;
    double var_err = 0.0; // relative when analytic_var > 1e-9, absolute otherwise
    std::size_t n_used = 0;
};

inline CompositionReport gaussian_composition_check(const ScheduleParams& p, double t, double s,
                                                    double u, std::size_t n_samples,
                                                    RngState& rng) {
    if (!(s >= 0.0 && s < t && t <= 1.0))
        raise(ErrorKind::InvalidParameters, "gaussian_composition_check: needs 0 <= s < t <= 1");
    if (!(u >= 0.0 && u <= 1.0))
        raise(ErrorKind::UncertaintyOutOfRange, "gaussian_composition_check: u must be in [0,1]");
    if (n_samples < 10000)
        raise(ErrorKind::InsufficientSamples, "gaussian_composition_check: needs >= 1e4 samples");

    const double x_lq = 0.75, x_hq = 0.25;
    PixelField uf = PixelField::constant(1, 1, 1, u);
    Coefficients ct = coefficients_at(t, uf, p);
    Coefficients cs = coefficients_at(s, uf, p);
    double at = ct.alpha.data[0], gt = ct.gamma.data[0], bt = ct.beta.data[0];
    double as = cs.alpha.data[0], gs = cs.gamma.data[0], bs = cs.beta.data[0];
    double incr = bt * bt - bs * bs;
    if (incr < 0.0)
        raise(ErrorKind::NonMonotoneBeta, "gaussian_composition_check: beta decreases from s to t");
    double sq_incr = std::sqrt(incr);

    std::vector<double> xs(n_samples), xt(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        double e1 = rng.next_normal();
        double e2 = rng.next_normal();
        xs[i] = as * x_lq + gs * x_hq + bs * e1;
        xt[i] = xs[i] + (at - as) * x_lq + (gt - gs) * x_hq + sq_incr * e2;
    }

    double center = at * x_lq + gt * x_hq; // marginal mean of x_t
    std::size_t keep = n_samples / 2;
    std::vector<std::size_t> order(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;
    std::nth_element(order.begin(), order.begin() + keep, order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return std::fabs(xt[a] - center) < std::fabs(xt[b] - center);
                     });

    // Analytic posterior at the bin center with the true clean endpoint as
    // the prediction.
    PixelField f_xt = PixelField::constant(1, 1, 1, center);
    PixelField f_lq = PixelField::constant(1, 1, 1, x_lq);
    PixelField f_hq = PixelField::constant(1, 1, 1, x_hq);
    PosteriorMoments pm = posterior_moments(f_xt, f_lq, f_hq, ct, cs);
    double an_mean = pm.mean.data[0];
    double an_var = pm.var.data[0];

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        mx += xt[order[i]];
        my += xs[order[i]];
    }
    mx /= static_cast<double>(keep);
    my /= static_cast<double>(keep);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        double dx = xt[order[i]] - mx;
        sxx += dx * dx;
        sxy += dx * (xs[order[i]] - my);
    }
    double slope = (sxx > 1e-24) ? sxy / sxx : 0.0;
    double fitted = my + slope * (center - mx);

    double ss_res = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        double e = xs[order[i]] - (my + slope * (xt[order[i]] - mx));
        ss_res += e * e;
    }
    double emp_var = (keep > 2) ? ss_res / static_cast<double>(keep - 2) : 0.0;

    CompositionReport rep;
    rep.analytic_mean = an_mean;
    rep.empirical_mean = fitted;
    rep.mean_err = std::fabs(fitted - an_mean);
    double lever = 1.0 / static_cast<double>(keep) +
                   ((sxx > 1e-24) ? (center - mx) * (center - mx) / sxx : 0.0);
    rep.mean_se = std::sqrt(an_var * lever);
    rep.analytic_var = an_var;
    rep.empirical_var = emp_var;
    rep.var_err = (an_var > 1e-9) ? std::fabs(emp_var - an_var) / an_var
                                  : std::fabs(emp_var - an_var);
    rep.n_used = keep;
    return rep;
}

inline std::vector<EquationMapEntry> analysis_equation_entries() {
    return {
        {"strict terminal drift", "drift = (x_lq - x_t) / (1 - t), diverging as O(1/sqrt(1-t))",
         "analysis.strict_drift_curve", "analysis: strict bridge drift diverges with square-root rate"},
        {"relaxed terminal drift", "drift = (x_lq - x_t) / ((1 - t) + sigma_min^2), sigma_min^2 = min((1+u)^2)",
         "analysis.relaxed_drift_curve", "analysis: relaxed bridge drift stays bounded"},
        {"endpoint alignment", "cos(x_hq - x_lq, x_restored - x_lq) over flattened fields",
         "analysis.endpoint_alignment", "analysis: endpoint alignment cosine properties"},
        {"silhouette coefficient", "mean over points of (b - a) / max(a, b), singletons scoring 0",
         "analysis.silhouette", "analysis: silhouette fixtures and conventions"},
        {"manifold alignment curve", "silhouette of top-2 PCA projections of forward states per t",
         "analysis.manifold_alignment_curve", "analysis: alignment curve trend on synthetic degradations"},
        {"posterior composition check",
         "x_s = mu_s + beta_s e1; x_t = x_s + (mu_t - mu_s) + sqrt(beta_t^2 - beta_s^2) e2; "
         "conditional moments of x_s | x_t near the marginal mean vs posterior_moments",
         "analysis.gaussian_composition_check", "analysis: gaussian composition oracle validates posterior"},
    };
}

} // namespace bridgekit
