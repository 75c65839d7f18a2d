#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "bridgekit/sampler.hpp"
#include "bridgekit/uncertainty.hpp"

namespace bridgekit {

// Elementwise-affine stand-in for a learned network:
//   xhat0 = a (.) x_t + b (.) x_lq + c
// Gradients are analytic, so the training loop stays dependency-free. Toy
// quality numbers from this model say nothing about what a real network
// reaches; the point is exercising the pipeline end to end.
struct LinearPredictor {
    PixelField a, b, c;

    // Start as a passthrough of the degraded input (a = 0, b = 1, c = 0): a
    // zero-loss stationary point whenever the degradation is the identity.
    static LinearPredictor passthrough(int h, int w, int ch) {
        LinearPredictor p;
        p.a = PixelField::zeros(h, w, ch);
        p.b = PixelField::constant(h, w, ch, 1.0);
        p.c = PixelField::zeros(h, w, ch);
        return p;
    }

    PixelField predict(const PixelField& x_t, const PixelField& x_lq) const {
        require_same_shape(x_t, a, "LinearPredictor");
        require_same_shape(x_lq, a, "LinearPredictor x_lq");
        PixelField out = x_t;
        for (std::size_t i = 0; i < out.size(); ++i)
            out.data[i] = a.data[i] * x_t.data[i] + b.data[i] * x_lq.data[i] + c.data[i];
        return out;
    }

    // Bind the conditioning image to get the sampler-facing callable.
    Predictor as_predictor(PixelField x_lq) const {
        return [self = *this, lq = std::move(x_lq)](const PixelField& x_t, double,
                                                    const PixelField&) {
            return self.predict(x_t, lq);
        };
    }
};

struct TrainConfig {
    std::size_t iterations = 3000;
    double learning_rate = 1e-2; // kept at or below 1; 0 allowed for diagnostics
    std::size_t batch = 4;
    std::uint64_t seed = 0;
    ScheduleParams schedule;
};

struct TrainResult {
    LinearPredictor predictor;
    std::vector<double> loss_history; // one batch-mean loss per iteration, pre-update
};

inline double l1_loss(const PixelField& x_hat0, const PixelField& x_hq) {
    require_same_shape(x_hat0, x_hq, "l1_loss");
    double acc = 0.0;
    for (std::size_t i = 0; i < x_hat0.size(); ++i)
        acc += std::fabs(x_hat0.data[i] - x_hq.data[i]);
    return acc / static_cast<double>(x_hat0.size());
}

// Trailing mean over the last `window` entries up to each index; used for the
// smoothed loss column and the halving checks.
inline std::vector<double> trailing_mean(const std::vector<double>& history, std::size_t window) {
    if (window < 1) raise(ErrorKind::InvalidParameters, "trailing_mean: window must be >= 1");
    std::vector<double> out(history.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < history.size(); ++i) {
        acc += history[i];
        if (i >= window) acc -= history[i - window];
        out[i] = acc / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

// Subgradient descent on the absolute reconstruction error over randomly
// drawn (pair, t, noise) triples: per draw, construct the bridge state,
// predict the clean image, and step every parameter against the summed-error
// subgradient sign(xhat0 - x_hq) times its input factor, averaged over the
// batch. sign(0) := 0, so a perfect fit is exactly stationary. The recorded
// history is the per-pixel mean error from l1_loss. The per-pair uncertainty
// maps come from the supplied restorer once, up front.
inline TrainResult train(const std::vector<std::pair<PixelField, PixelField>>& pairs,
                         const Restorer& psi, const TrainConfig& cfg) {
    if (pairs.empty()) raise(ErrorKind::EmptyDataset, "train: no training pairs");
    for (const auto& pr : pairs)
        require_same_shape(pr.first, pairs[0].first, "train pair shapes");
    for (const auto& pr : pairs) require_same_shape(pr.first, pr.second, "train pair");
    if (!(cfg.learning_rate >= 0.0 && cfg.learning_rate <= 1.0))
        raise(ErrorKind::InvalidParameters, "train: learning_rate must be in [0,1]");
    if (cfg.batch < 1) raise(ErrorKind::InvalidParameters, "train: batch must be >= 1");
    if (cfg.iterations < 1) raise(ErrorKind::InvalidParameters, "train: iterations must be >= 1");
    ScheduleValidation sv = validate(cfg.schedule);
    if (!sv.ok) raise(ErrorKind::InvalidParameters, "train: " + sv.violations.front());

    std::vector<PixelField> u_per_pair;
    u_per_pair.reserve(pairs.size());
    for (const auto& pr : pairs) u_per_pair.push_back(residual_uncertainty(psi, pr.second));

    const PixelField& shape_of = pairs[0].first;
    LinearPredictor model =
        LinearPredictor::passthrough(shape_of.height, shape_of.width, shape_of.channels);
    RngState rng(cfg.seed);

    TrainResult result;
    result.loss_history.reserve(cfg.iterations);
    PixelField ga = PixelField::zeros(shape_of.height, shape_of.width, shape_of.channels);
    PixelField gb = ga, gc = ga;
    std::size_t high_loss_streak = 0;

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        for (auto& v : ga.data) v = 0.0;
        for (auto& v : gb.data) v = 0.0;
        for (auto& v : gc.data) v = 0.0;
        double loss_sum = 0.0;

        for (std::size_t bi = 0; bi < cfg.batch; ++bi) {
            std::size_t k = static_cast<std::size_t>(rng.next_u64() % pairs.size());
            double t = rng.next_uniform();
            const PixelField& x_hq = pairs[k].first;
            const PixelField& x_lq = pairs[k].second;
            ForwardSample fs = forward_sample(x_hq, x_lq, u_per_pair[k], t, cfg.schedule, rng);
            PixelField xhat0 = model.predict(fs.x_t, x_lq);
            loss_sum += l1_loss(xhat0, x_hq);
            for (std::size_t i = 0; i < xhat0.size(); ++i) {
                double d = xhat0.data[i] - x_hq.data[i];
                double g = (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
                ga.data[i] += g * fs.x_t.data[i];
                gb.data[i] += g * x_lq.data[i];
                gc.data[i] += g;
            }
        }

        double loss = loss_sum / static_cast<double>(cfg.batch);
        result.loss_history.push_back(loss);
        double initial = std::max(result.loss_history.front(), 1e-12);
        if (loss > 10.0 * initial) {
            if (++high_loss_streak >= 100)
                raise(ErrorKind::DivergenceDetected,
                      "train: loss above 10x initial for 100 consecutive iterations");
        } else {
            high_loss_streak = 0;
        }

        double step = cfg.learning_rate / static_cast<double>(cfg.batch);
        for (std::size_t i = 0; i < ga.size(); ++i) {
            model.a.data[i] -= step * ga.data[i];
            model.b.data[i] -= step * gb.data[i];
            model.c.data[i] -= step * gc.data[i];
        }
    }

    result.predictor = std::move(model);
    return result;
}

struct EvalReport {
    double psnr_restored = 0.0;
    double psnr_degraded = 0.0;
};

// Mean PSNR of reverse-sampled restorations vs the clean targets, next to
// the degraded inputs' own PSNR as the baseline. Evaluation is deterministic:
// terminal init is deterministic and the internal RNG is freshly seeded per
// pair, so eta > 0 runs are repeatable too.
inline EvalReport evaluate(const LinearPredictor& pred,
                           const std::vector<std::pair<PixelField, PixelField>>& test_pairs,
                           const Restorer& psi, const ScheduleParams& p, const TimeGrid& grid,
                           double eta) {
    if (test_pairs.empty()) raise(ErrorKind::EmptyDataset, "evaluate: no test pairs");
    EvalReport rep;
    for (const auto& pr : test_pairs) {
        const PixelField& x_hq = pr.first;
        const PixelField& x_lq = pr.second;
        PixelField u = residual_uncertainty(psi, x_lq);
        RngState rng(0);
        auto [x0, rec] = run_reverse(pred.as_predictor(x_lq), x_lq, u, grid, eta,
                                     InitMode::deterministic, p, rng);
        rep.psnr_restored += psnr(x_hq, x0);
        rep.psnr_degraded += psnr(x_hq, clip(x_lq, 0.0, 1.0));
    }
    rep.psnr_restored /= static_cast<double>(test_pairs.size());
    rep.psnr_degraded /= static_cast<double>(test_pairs.size());
    return rep;
}

inline std::vector<EquationMapEntry> toytrain_equation_entries() {
    return {
        {"reconstruction loss", "L = mean_i |xhat0_i - x_hq_i|",
         "toytrain.l1_loss", "toytrain: l1 loss basics"},
        {"training loop",
         "draw (pair, t, eps); u from restorer residual; x_t from the forward marginal; "
         "theta <- theta - lr * dL1/dtheta",
         "toytrain.train", "toytrain: subgradient descent reduces loss reproducibly"},
    };
}

} // namespace bridgekit
