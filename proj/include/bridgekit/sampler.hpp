#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bridgekit/bridge.hpp"
#include "bridgekit/textio.hpp"

namespace bridgekit {

// Shape-preserving callable (x_t, t, u) -> xhat0.
using Predictor = std::function<PixelField(const PixelField&, double, const PixelField&)>;

// Cheating reference predictor: always answers with the stored target.
inline Predictor oracle_predictor(PixelField x_hq) {
    return [x = std::move(x_hq)](const PixelField&, double, const PixelField&) { return x; };
}

// Fixed-point reference predictor: answers with the current state.
inline Predictor identity_predictor() {
    return [](const PixelField& x_t, double, const PixelField&) { return x_t; };
}

// Descending sampling times tau[0] = 1 > ... > tau[steps] = 0.
struct TimeGrid {
    std::size_t steps = 1;
    std::vector<double> times;

    static TimeGrid uniform(std::size_t n) {
        if (n < 1) raise(ErrorKind::GridOutOfRange, "TimeGrid: needs at least one step");
        TimeGrid g;
        g.steps = n;
        g.times.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            g.times[i] = static_cast<double>(n - i) / static_cast<double>(n);
        g.times.front() = 1.0;
        g.times.back() = 0.0;
        return g;
    }

    void validate() const {
        if (steps < 1 || times.size() != steps + 1)
            raise(ErrorKind::GridOutOfRange, "TimeGrid: steps and times disagree");
        if (times.front() != 1.0 || times.back() != 0.0)
            raise(ErrorKind::GridOutOfRange, "TimeGrid: endpoints must be exactly 1 and 0");
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (!(times[i] > times[i + 1]))
                raise(ErrorKind::GridOutOfRange, "TimeGrid: times must strictly descend");
    }
};

struct TrajectoryStep {
    double t = 0.0;
    double state_mean = 0.0;
    double state_std = 0.0;
    double dist_to_lq = 0.0;      // ||x_t - x_lq||_2
    double pred_dist_to_lq = 0.0; // ||xhat0 - x_lq||_2; 0 on the initial entry
    bool has_snapshot = false;
};

struct TrajectoryRecord {
    std::vector<TrajectoryStep> steps;    // steps.size() == N + 1
    std::vector<PixelField> snapshots;    // raw state per entry, parallel to steps
    PixelField raw_output;                // final state before clipping
    std::string notes;                    // integration deviations, if any

    CsvTable to_csv() const {
        CsvTable csv;
        csv.header = {"t", "state_mean", "state_std", "dist_to_lq", "pred_dist_to_lq"};
        for (const TrajectoryStep& s : steps)
            csv.rows.push_back({format_csv(s.t), format_csv(s.state_mean),
                                format_csv(s.state_std), format_csv(s.dist_to_lq),
                                format_csv(s.pred_dist_to_lq)});
        return csv;
    }
};

enum class InitMode { stochastic, deterministic };

// Terminal state at t = 1: x_1 = x_lq + (1+u)*z in stochastic mode (beta_1 =
// 1+u), plain x_lq in deterministic mode.
inline PixelField init_terminal(const PixelField& x_lq, const PixelField& u, InitMode mode,
                                RngState& rng) {
    require_same_shape(x_lq, u, "init_terminal");
    for (double v : u.data)
        if (!(v >= 0.0 && v <= 1.0))
            raise(ErrorKind::UncertaintyOutOfRange, "init_terminal: u must lie in [0,1]");
    if (mode == InitMode::deterministic) return x_lq;
    PixelField z = sample_gaussian_like(x_lq, rng);
    PixelField out = x_lq;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] += (1.0 + u.data[i]) * z.data[i];
    return out;
}

namespace detail {

inline PixelField call_predictor(const Predictor& pred, const PixelField& x_t, double t,
                                 const PixelField& u) {
    PixelField xhat0 = pred(x_t, t, u);
    if (!xhat0.same_shape(x_t))
        raise(ErrorKind::PredictorShapeMismatch,
              "predictor returned " + xhat0.shape_str() + " for input " + x_t.shape_str());
    return xhat0;
}

inline TrajectoryStep make_step(double t, const PixelField& state, const PixelField& x_lq,
                                double pred_dist) {
    TrajectoryStep s;
    s.t = t;
    s.state_mean = reduce(state, ReduceStat::mean);
    s.state_std = field_std(state);
    s.dist_to_lq = reduce(state - x_lq, ReduceStat::l2_norm);
    s.pred_dist_to_lq = pred_dist;
    s.has_snapshot = true;
    return s;
}

} // namespace detail

// Ancestral/deterministic reverse sampler over a descending grid. The final
// step to t = 0 returns the prediction directly instead of stepping, so the
// beta floor is never touched. Returned image is clipped to [0,1]; the raw
// state stays in the record.
inline std::pair<PixelField, TrajectoryRecord> run_reverse(const Predictor& pred,
                                                           const PixelField& x_lq,
                                                           const PixelField& u,
                                                           const TimeGrid& grid, double eta,
                                                           InitMode mode,
                                                           const ScheduleParams& p,
                                                           RngState& rng) {
    grid.validate();
    if (!(eta >= 0.0 && eta <= 1.0))
        raise(ErrorKind::InvalidParameters, "run_reverse: eta must be in [0,1]");

    PixelField x = init_terminal(x_lq, u, mode, rng);
    TrajectoryRecord rec;
    rec.steps.push_back(detail::make_step(1.0, x, x_lq, 0.0));
    rec.snapshots.push_back(x);

    for (std::size_t i = 0; i + 1 < grid.times.size(); ++i) {
        double t = grid.times[i];
        double s = grid.times[i + 1];
        PixelField xhat0 = detail::call_predictor(pred, x, t, u);
        if (s == 0.0) {
            x = xhat0;
        } else {
            Coefficients ct = coefficients_at(t, u, p);
            Coefficients cs = coefficients_at(s, u, p);
            x = general_step(x, x_lq, xhat0, ct, cs, eta, rng);
        }
        double pred_dist = reduce(xhat0 - x_lq, ReduceStat::l2_norm);
        rec.steps.push_back(detail::make_step(s, x, x_lq, pred_dist));
        rec.snapshots.push_back(x);
    }
    rec.raw_output = x;
    return {clip(x, 0.0, 1.0), rec};
}

// Explicit Euler integration of the deterministic flow. Velocities are
// evaluated at the step's start time, except the first step when pi(u) < 1
// somewhere: its alpha rate is undefined at t = 1, so that one velocity is
// taken at the step midpoint and the deviation is noted in the record.
inline std::pair<PixelField, TrajectoryRecord> run_pf_ode(const Predictor& pred,
                                                          const PixelField& x_lq,
                                                          const PixelField& u,
                                                          const TimeGrid& grid, InitMode mode,
                                                          const ScheduleParams& p,
                                                          RngState& rng) {
    grid.validate();
    PixelField pi = exponent_pi(u, p);
    double min_pi = pi.data[0];
    for (double v : pi.data) min_pi = std::min(min_pi, v);

    PixelField x = init_terminal(x_lq, u, mode, rng);
    TrajectoryRecord rec;
    rec.steps.push_back(detail::make_step(1.0, x, x_lq, 0.0));
    rec.snapshots.push_back(x);

    for (std::size_t i = 0; i + 1 < grid.times.size(); ++i) {
        double t = grid.times[i];
        double s = grid.times[i + 1];
        PixelField xhat0 = detail::call_predictor(pred, x, t, u);
        double t_eval = t;
        if (t == 1.0 && min_pi < 1.0) {
            t_eval = 0.5 * (t + s);
            rec.notes = "first-step velocity evaluated at midpoint t=" + format_csv(t_eval);
        }
        PixelField v = pf_ode_velocity(x, x_lq, xhat0, u, t_eval, p);
        for (std::size_t k = 0; k < x.size(); ++k) x.data[k] -= (t - s) * v.data[k];
        double pred_dist = reduce(xhat0 - x_lq, ReduceStat::l2_norm);
        rec.steps.push_back(detail::make_step(s, x, x_lq, pred_dist));
        rec.snapshots.push_back(x);
    }
    rec.raw_output = x;
    return {clip(x, 0.0, 1.0), rec};
}

inline std::vector<EquationMapEntry> sampler_equation_entries() {
    return {
        {"relaxed terminal initialization", "x_1 = x_lq + (1+u)*z, z ~ N(0, I)",
         "sampler.init_terminal", "sampler: terminal initialization moments"},
        {"reverse sampling loop",
         "iterate x_s = general_step(x_t, ...) over descending times; final step outputs xhat0; clip to [0,1]",
         "sampler.run_reverse", "sampler: reverse loop oracle and identity behavior"},
        {"flow integration", "x_s = x_t - (t - s) * v(x_t, t)",
         "sampler.run_pf_ode", "sampler: flow integration single-step exactness and saturation"},
    };
}

} // namespace bridgekit
