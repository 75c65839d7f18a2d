// Experiment driver: every study in the library behind one subcommand each.
// Each run writes its artifacts plus a manifest.json (inputs, seed, FNV-1a
// hash per output) into the output directory, so reruns are hash-comparable.
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bridgekit/analysis.hpp"
#include "bridgekit/bridge.hpp"
#include "bridgekit/datasets.hpp"
#include "bridgekit/field_io.hpp"
#include "bridgekit/mappings.hpp"
#include "bridgekit/sampler.hpp"
#include "bridgekit/schedules.hpp"
#include "bridgekit/svg.hpp"
#include "bridgekit/textio.hpp"
#include "bridgekit/toytrain.hpp"
#include "bridgekit/uncertainty.hpp"

using namespace bridgekit;
using nlohmann::json;

namespace {

// Collects artifacts as they are written and finishes with the manifest.
struct RunSink {
    std::string dir;
    std::vector<std::string> files;

    std::string path(const std::string& name) const { return dir + "/" + name; }

    void put_text(const std::string& name, const std::string& content) {
        write_text_file(path(name), content);
        files.push_back(name);
    }
    void put_csv(const std::string& name, const CsvTable& t) { put_text(name, t.to_string()); }
    void put_pgm(const std::string& name, const PixelField& f) {
        write_pgm(path(name), f);
        files.push_back(name);
    }
    void put_pfield(const std::string& name, const PixelField& f) {
        write_pfield(path(name), f);
        files.push_back(name);
    }
    void put_image(const std::string& stem, const PixelField& f) {
        if (f.channels == 1)
            put_pgm(stem + ".pgm", f);
        else if (f.channels == 3) {
            write_ppm(path(stem + ".ppm"), f);
            files.push_back(stem + ".ppm");
        } else
            put_pfield(stem + ".pfield", f);
    }

    void finish(const std::string& subcommand, std::uint64_t seed, const json& inputs) {
        json hashes = json::object();
        for (const std::string& f : files) hashes[f] = fnv1a64_hex(read_text_file(path(f)));
        json listed = json::array();
        for (const std::string& f : files) listed.push_back(f);
        listed.push_back("manifest.json");
        json m;
        m["subcommand"] = subcommand;
        m["seed"] = seed;
        m["inputs"] = inputs;
        m["outputs"] = hashes;
        m["files"] = listed;
        write_text_file(path("manifest.json"), m.dump(2) + "\n");
    }
};

// Shared flags on every subcommand; config values fill in only what the
// command line left unset (flags win).
struct SubCtx {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    CLI::Option* o_seed = nullptr;
    json cfg = json::object();

    void attach(CLI::App* s) {
        s->add_option("--config", config_path, "JSON config file; explicit flags win");
        o_seed = s->add_option("--seed", seed, "RNG seed (default 0)");
        s->add_option("--out", out, "output directory (default $BRIDGEKIT_OUT, then ./out)");
    }

    template <class T>
    void ov(CLI::Option* opt, const char* key, T& v) const {
        if (opt->count() == 0 && cfg.contains(key)) v = cfg.at(key).get<T>();
    }

    RunSink open_sink() {
        if (!config_path.empty()) cfg = json::parse(read_text_file(config_path));
        ov(o_seed, "seed", seed);
        if (out.empty() && cfg.contains("out")) out = cfg.at("out").get<std::string>();
        if (out.empty())
            if (const char* env = std::getenv("BRIDGEKIT_OUT"); env != nullptr && *env) out = env;
        if (out.empty()) out = "out";
        std::filesystem::create_directories(out);
        return RunSink{out, {}};
    }
};

ScheduleParams make_params(double lambda_b, double pi_eot) {
    ScheduleParams p;
    p.lambda_b = lambda_b;
    p.pi_eot = pi_eot;
    ScheduleValidation v = validate(p);
    if (!v.ok) {
        std::string msg = "schedule parameters rejected:";
        for (const std::string& s : v.violations) msg += " " + s + ";";
        raise(ErrorKind::InvalidParameters, msg);
    }
    return p;
}

Degradation degradation_by_name(const std::string& name) {
    if (name == "noise") return Degradation::additive_noise(0.12);
    if (name == "darken") return Degradation::gamma_darken(3.0);
    if (name == "blur") return Degradation::box_blur(5);
    if (name == "streaks") return Degradation::streaks(8, 0.6, 0.8);
    raise(ErrorKind::InvalidParameters,
          "unknown degradation '" + name + "' (want noise|darken|blur|streaks)");
}

std::vector<double> uniform_grid(int points) {
    if (points < 2) raise(ErrorKind::InvalidParameters, "needs at least 2 grid points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) / (points - 1);
    g.front() = 0.0;
    g.back() = 1.0;
    return g;
}

// Trained a/b/c maps as one field, channel-stacked in that order.
PixelField pack_predictor(const LinearPredictor& lp) {
    int h = lp.a.height, w = lp.a.width, ch = lp.a.channels;
    PixelField out(h, w, 3 * ch);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int k = 0; k < ch; ++k) {
                out.at(r, c, k) = lp.a.at(r, c, k);
                out.at(r, c, ch + k) = lp.b.at(r, c, k);
                out.at(r, c, 2 * ch + k) = lp.c.at(r, c, k);
            }
    return out;
}

LinearPredictor unpack_predictor(const PixelField& packed) {
    if (packed.channels % 3 != 0)
        raise(ErrorKind::InvalidParameters,
              "packed predictor must have 3*c channels, got " + packed.shape_str());
    int ch = packed.channels / 3;
    LinearPredictor lp;
    lp.a = PixelField::zeros(packed.height, packed.width, ch);
    lp.b = lp.a;
    lp.c = lp.a;
    for (int r = 0; r < packed.height; ++r)
        for (int c = 0; c < packed.width; ++c)
            for (int k = 0; k < ch; ++k) {
                lp.a.at(r, c, k) = packed.at(r, c, k);
                lp.b.at(r, c, k) = packed.at(r, c, ch + k);
                lp.c.at(r, c, k) = packed.at(r, c, 2 * ch + k);
            }
    return lp;
}

// ---------------------------------------------------------------- schedule-trace

void run_schedule_trace(RunSink& sink, double u, double lambda_b, double pi_eot, int steps) {
    ScheduleParams p = make_params(lambda_b, pi_eot);
    PixelField uf = PixelField::scalar(u);
    CsvTable csv;
    csv.header = {"t", "u", "alpha", "gamma", "beta", "alpha_dot", "beta_dot"};
    for (double t : uniform_grid(steps)) {
        std::string ad;
        try {
            ad = format_csv(alpha_dot(t, uf, p).data[0]);
        } catch (const Error& e) {
            // the time-weight rate diverges at the endpoints when pi(u) < 1
            if (e.kind() != ErrorKind::EndpointVelocityUndefined) throw;
            ad = "inf";
        }
        csv.rows.push_back({format_csv(t), format_csv(u), format_csv(path_alpha(t, uf, p).data[0]),
                            format_csv(path_gamma(t, uf, p).data[0]),
                            format_csv(noise_beta(t, uf, p).data[0]), ad,
                            format_csv(beta_dot(t, uf, p).data[0])});
    }
    sink.put_csv("schedule_trace.csv", csv);
}

// ---------------------------------------------------------------- singularity-demo

void run_singularity_demo(RunSink& sink, std::uint64_t seed, std::size_t paths, double u) {
    RngState root(seed);
    PixelField hq = toy_clean_image(0, 16, 16);
    RngState drng = root.fork(0);
    PixelField lq = apply_degradation(hq, Degradation::additive_noise(0.12), drng);

    const std::vector<double> grid = {0.9,   0.93,  0.95,  0.97,  0.98,
                                      0.99,  0.993, 0.995, 0.997, 0.999};
    RngState srng = root.fork(1);
    DriftCurve strict = strict_drift_curve(hq, lq, grid, paths, srng);

    std::vector<double> relaxed_grid = grid;
    relaxed_grid.push_back(1.0); // the soft-pinned drift stays finite there
    PixelField uf = PixelField::constant(hq.height, hq.width, hq.channels, u);
    RngState rrng = root.fork(2);
    DriftCurve relaxed = relaxed_drift_curve(hq, lq, uf, relaxed_grid, paths, rrng);

    CsvTable curves;
    curves.header = {"bridge_type", "one_minus_t", "mean_drift_norm"};
    for (const DriftCurve* c : {&strict, &relaxed})
        for (const DriftPoint& pt : c->points)
            curves.rows.push_back(
                {c->bridge_type, format_csv(pt.one_minus_t), format_csv(pt.mean_drift_norm)});
    sink.put_csv("drift_curves.csv", curves);

    CsvTable slopes;
    slopes.header = {"bridge_type", "slope", "r_squared"};
    for (const DriftCurve* c : {&strict, &relaxed}) {
        LoglogFit fit = fit_loglog_slope(*c, 1e-3, 0.1);
        slopes.rows.push_back({c->bridge_type, format_csv(fit.slope), format_csv(fit.r2)});
    }
    sink.put_csv("drift_slopes.csv", slopes);

    std::vector<SvgSeries> series;
    for (const DriftCurve* c : {&strict, &relaxed}) {
        SvgSeries s;
        s.label = c->bridge_type;
        for (const DriftPoint& pt : c->points)
            if (pt.one_minus_t > 0.0) { // log axes; drop the terminal point
                s.x.push_back(pt.one_minus_t);
                s.y.push_back(pt.mean_drift_norm);
            }
        series.push_back(std::move(s));
    }
    sink.put_text("drift_loglog.svg", svg_line_plot(series, "1 - t", "mean drift norm",
                                                    AxisScale::log10, AxisScale::log10));
}

// ---------------------------------------------------------------- sample

void run_sample(RunSink& sink, std::uint64_t seed, const std::string& predictor_name, int steps,
                double eta, const std::string& init_name, double u_flag,
                const std::string& lq_path, const std::string& hq_path,
                const std::string& params_path, const std::string& degradation, double lambda_b,
                double pi_eot, json& inputs) {
    ScheduleParams p = make_params(lambda_b, pi_eot);
    RngState root(seed);

    PixelField lq, hq;
    bool have_hq = false;
    if (lq_path.empty()) {
        hq = toy_clean_image(0, 24, 24);
        have_hq = true;
        RngState drng = root.fork(0);
        lq = apply_degradation(hq, degradation_by_name(degradation), drng);
        inputs["lq"] = "synthetic:" + degradation;
        inputs["hq"] = "synthetic:clean";
    } else {
        lq = read_field_auto(lq_path);
        inputs["lq"] = lq_path;
        if (!hq_path.empty()) {
            hq = read_field_auto(hq_path);
            have_hq = true;
            inputs["hq"] = hq_path;
        }
    }

    PixelField u = u_flag >= 0.0
                       ? PixelField::constant(lq.height, lq.width, lq.channels, u_flag)
                       : residual_uncertainty(box_filter_restorer(3), lq);

    Predictor pred;
    if (predictor_name == "oracle") {
        if (!have_hq)
            raise(ErrorKind::InvalidParameters, "sample: the oracle predictor needs --hq");
        pred = oracle_predictor(hq);
    } else if (predictor_name == "identity") {
        pred = identity_predictor();
    } else if (predictor_name == "linear") {
        if (params_path.empty())
            raise(ErrorKind::InvalidParameters,
                  "sample: the linear predictor needs --params (train-toy output)");
        pred = unpack_predictor(read_pfield(params_path)).as_predictor(lq);
    } else {
        raise(ErrorKind::InvalidParameters,
              "unknown predictor '" + predictor_name + "' (want oracle|identity|linear)");
    }

    if (init_name != "deterministic" && init_name != "stochastic")
        raise(ErrorKind::InvalidParameters,
              "unknown init '" + init_name + "' (want deterministic|stochastic)");
    InitMode mode = init_name == "stochastic" ? InitMode::stochastic : InitMode::deterministic;
    if (steps < 1) raise(ErrorKind::InvalidParameters, "sample: needs --steps >= 1");

    RngState srng = root.fork(1);
    auto [restored, rec] =
        run_reverse(pred, lq, u, TimeGrid::uniform(static_cast<std::size_t>(steps)), eta, mode, p,
                    srng);

    sink.put_image("restored", restored);
    sink.put_csv("trajectory.csv", rec.to_csv());
    sink.put_image("u_map", u);
    if (!rec.notes.empty()) inputs["notes"] = rec.notes;
}

// ---------------------------------------------------------------- compare-mappings

void run_compare_mappings(RunSink& sink, int steps) {
    const std::vector<MethodSchedule> methods = {
        MethodSchedule::ddbm_bb(),
        MethodSchedule::i2sb(1.0),
        MethodSchedule::resshift([](double t) { return t; }, [](double) { return 0.1; }),
        MethodSchedule::rddm([](double t) {
            double c = std::cos(0.5 * M_PI * t);
            return c * c;
        }),
        MethodSchedule::diffuir([](double t) { return t; },
                                [](double t) { return 0.1 * t * (1.0 - t); },
                                [](double t) { return 0.5 * std::sqrt(t * (1.0 - t)); }),
    };
    CsvTable csv;
    csv.header = {"method", "t", "alpha", "gamma", "beta", "convexity_deviation"};
    for (const MethodSchedule& m : methods)
        for (double t : uniform_grid(steps)) {
            UnifiedCoefficients c = reorient(to_unified(m, t), Orientation::clean_at_0);
            csv.rows.push_back({m.name(), format_csv(t), format_csv(c.alpha),
                                format_csv(c.gamma), format_csv(c.beta),
                                format_csv(std::fabs(c.alpha + c.gamma - 1.0))});
        }
    sink.put_csv("mappings.csv", csv);
}

// ---------------------------------------------------------------- align-curve

void run_align_curve(RunSink& sink, std::uint64_t seed, double lambda_b, double pi_eot) {
    ScheduleParams p = make_params(lambda_b, pi_eot);
    RngState root(seed);
    const std::vector<PixelField> images = alignment_image_set(6, 24, 24);
    const std::vector<Degradation> degs = default_alignment_degradations();
    Restorer psi = box_filter_restorer(3);

    std::vector<PixelField> u_per_pair;
    u_per_pair.reserve(images.size() * degs.size());
    for (std::size_t di = 0; di < degs.size(); ++di)
        for (std::size_t ii = 0; ii < images.size(); ++ii) {
            RngState drng = root.fork(di * images.size() + ii);
            u_per_pair.push_back(residual_uncertainty(psi, apply_degradation(images[ii], degs[di], drng)));
        }

    const std::vector<double> grid = {0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<std::pair<double, double>> curve =
        manifold_alignment_curve(images, degs, u_per_pair, grid, p, root);

    CsvTable csv;
    csv.header = {"t", "silhouette"};
    for (const auto& [t, sc] : curve) csv.rows.push_back({format_csv(t), format_csv(sc)});
    sink.put_csv("sc_curve.csv", csv);
}

// ---------------------------------------------------------------- train-toy

void run_train_toy(RunSink& sink, std::uint64_t seed, int iterations, double lambda_b,
                   double pi_eot, json& inputs) {
    ScheduleParams p = make_params(lambda_b, pi_eot);
    if (iterations < 1) raise(ErrorKind::InvalidParameters, "train-toy: needs --steps >= 1");

    RngState root(seed);
    RngState drng = root.fork(1);
    auto pairs = toy_pairs(16, 16, 16, 0.1, drng);
    std::vector<std::pair<PixelField, PixelField>> train_pairs(pairs.begin(), pairs.begin() + 12);
    std::vector<std::pair<PixelField, PixelField>> test_pairs(pairs.begin() + 12, pairs.end());

    TrainConfig cfg;
    cfg.iterations = static_cast<std::size_t>(iterations);
    cfg.learning_rate = 1e-2;
    cfg.batch = 4;
    cfg.seed = seed;
    cfg.schedule = p;

    Restorer psi = box_filter_restorer(3);
    TrainResult res = train(train_pairs, psi, cfg);
    std::vector<double> windowed = trailing_mean(res.loss_history, 100);

    CsvTable loss;
    loss.header = {"iteration", "loss", "windowed_mean"};
    for (std::size_t i = 0; i < res.loss_history.size(); ++i)
        loss.rows.push_back({std::to_string(i), format_csv(res.loss_history[i]),
                             format_csv(windowed[i])});
    sink.put_csv("loss.csv", loss);
    sink.put_pfield("params.pfield", pack_predictor(res.predictor));

    EvalReport rep = evaluate(res.predictor, test_pairs, psi, p, TimeGrid::uniform(1), 0.0);
    CsvTable eval;
    eval.header = {"psnr_restored", "psnr_degraded"};
    eval.rows.push_back({format_csv(rep.psnr_restored), format_csv(rep.psnr_degraded)});
    sink.put_csv("eval.csv", eval);
    inputs["train_pairs"] = train_pairs.size();
    inputs["test_pairs"] = test_pairs.size();
}

// ---------------------------------------------------------------- geometry-check

void run_geometry_check(RunSink& sink, std::uint64_t seed, double u, double eta, double lambda_b,
                        double pi_eot) {
    ScheduleParams p = make_params(lambda_b, pi_eot);
    RngState root(seed);
    PixelField hq = toy_clean_image(0, 24, 24);
    RngState drng = root.fork(0);
    PixelField lq = apply_degradation(hq, Degradation::additive_noise(0.1), drng);
    PixelField target = clip(hq, 0.0, 1.0);

    std::vector<double> u_values = {0.0};
    if (u > 0.0) u_values.push_back(u);
    const std::vector<std::size_t> step_counts = {1, 2, 3, 5, 8, 13, 21, 34};

    CsvTable csv;
    csv.header = {"steps", "u", "mean_step_alignment", "min_step_alignment"};
    std::uint64_t stream = 100;
    for (double uv : u_values) {
        PixelField uf = PixelField::constant(hq.height, hq.width, hq.channels, uv);
        for (std::size_t n : step_counts) {
            RngState srng = root.fork(stream++);
            auto [restored, rec] = run_reverse(oracle_predictor(hq), lq, uf, TimeGrid::uniform(n),
                                               eta, InitMode::stochastic, p, srng);
            (void)restored;
            double sum = 0.0, lo = 1.0;
            std::size_t used = 0;
            for (std::size_t i = 0; i + 1 < rec.snapshots.size(); ++i) {
                const PixelField& cur = rec.snapshots[i];
                const PixelField& nxt = rec.snapshots[i + 1];
                if (reduce(nxt - cur, ReduceStat::l2_norm) < 1e-12 ||
                    reduce(target - cur, ReduceStat::l2_norm) < 1e-12)
                    continue; // degenerate step: no direction to compare
                double a = endpoint_alignment(cur, target, nxt);
                sum += a;
                lo = std::min(lo, a);
                ++used;
            }
            double mean = used ? sum / static_cast<double>(used) : 1.0;
            csv.rows.push_back({std::to_string(n), format_csv(uv), format_csv(mean),
                                format_csv(used ? lo : 1.0)});
        }
    }
    sink.put_csv("alignment_vs_steps.csv", csv);
}

// ---------------------------------------------------------------- uncertainty-map

void run_uncertainty_map(RunSink& sink, std::uint64_t seed, const std::string& lq_path,
                         const std::string& degradation, json& inputs) {
    RngState root(seed);
    PixelField lq;
    if (lq_path.empty()) {
        RngState drng = root.fork(0);
        lq = apply_degradation(toy_clean_image(0, 32, 32), degradation_by_name(degradation), drng);
        inputs["lq"] = "synthetic:" + degradation;
    } else {
        lq = read_field_auto(lq_path);
        inputs["lq"] = lq_path;
    }

    PixelField u = residual_uncertainty(box_filter_restorer(3), lq);
    sink.put_image("u", u);

    std::vector<std::size_t> counts(64, 0);
    for (double v : u.data) {
        auto bin = static_cast<std::size_t>(v * 64.0);
        if (bin > 63) bin = 63; // v == 1.0 lands in the top bin
        ++counts[bin];
    }
    CsvTable hist;
    hist.header = {"bin_lo", "bin_hi", "count"};
    for (std::size_t b = 0; b < 64; ++b)
        hist.rows.push_back({format_csv(static_cast<double>(b) / 64.0),
                             format_csv(static_cast<double>(b + 1) / 64.0),
                             std::to_string(counts[b])});
    sink.put_csv("u_hist.csv", hist);
}

// ---------------------------------------------------------------- composition-check

void run_composition_check(RunSink& sink, std::uint64_t seed, std::size_t n_samples, double u,
                           double lambda_b, double pi_eot) {
    ScheduleParams p = make_params(lambda_b, pi_eot);
    const std::vector<std::pair<double, double>> configs = {
        {0.8, 0.4}, {1.0, 0.5}, {0.5, 0.1}, {0.3, 0.0}, {0.9, 0.6}};
    RngState root(seed);

    CsvTable csv;
    csv.header = {"t",        "s",       "u",          "lambda_b",     "n_used",
                  "analytic_mean", "empirical_mean", "mean_err", "mean_se",
                  "analytic_var",  "empirical_var",  "var_err"};
    for (std::size_t i = 0; i < configs.size(); ++i) {
        auto [t, s] = configs[i];
        RngState r = root.fork(i);
        CompositionReport rep = gaussian_composition_check(p, t, s, u, n_samples, r);
        csv.rows.push_back({format_csv(t), format_csv(s), format_csv(u), format_csv(p.lambda_b),
                            std::to_string(rep.n_used), format_csv(rep.analytic_mean),
                            format_csv(rep.empirical_mean), format_csv(rep.mean_err),
                            format_csv(rep.mean_se), format_csv(rep.analytic_var),
                            format_csv(rep.empirical_var), format_csv(rep.var_err)});
    }
    sink.put_csv("composition.csv", csv);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bridgekit: uncertainty-aware restoration bridge experiments"};
    app.require_subcommand(1);

    // schedule-trace
    SubCtx cx_trace;
    double tr_u = 0.5, tr_lambda = 1.0, tr_pieot = 0.5;
    int tr_steps = 101;
    CLI::App* sc_trace = app.add_subcommand("schedule-trace", "tabulate schedule coefficients over t");
    cx_trace.attach(sc_trace);
    CLI::Option* o_tr_u = sc_trace->add_option("--u", tr_u, "uncertainty level in [0,1]");
    CLI::Option* o_tr_l = sc_trace->add_option("--lambda-b", tr_lambda, "bridge noise scale");
    CLI::Option* o_tr_p = sc_trace->add_option("--pi-eot", tr_pieot, "time-weight exponent at u=1");
    CLI::Option* o_tr_s = sc_trace->add_option("--steps", tr_steps, "number of rows (default 101)");

    // singularity-demo
    SubCtx cx_sing;
    std::size_t sg_paths = 200;
    double sg_u = 0.5;
    CLI::App* sc_sing = app.add_subcommand("singularity-demo",
                                           "drift magnitude near t=1, hard vs soft pinning");
    cx_sing.attach(sc_sing);
    CLI::Option* o_sg_paths = sc_sing->add_option("--paths", sg_paths, "Monte Carlo paths (>= 100)");
    CLI::Option* o_sg_u = sc_sing->add_option("--u", sg_u, "uncertainty level for the soft bridge");

    // sample
    SubCtx cx_sample;
    std::string sm_pred = "oracle", sm_init = "deterministic", sm_lq, sm_hq, sm_params,
                sm_deg = "noise";
    int sm_steps = 5;
    double sm_eta = 0.0, sm_u = -1.0, sm_lambda = 1.0, sm_pieot = 0.5;
    CLI::App* sc_sample = app.add_subcommand("sample", "reverse-sample a restoration");
    cx_sample.attach(sc_sample);
    CLI::Option* o_sm_pred =
        sc_sample->add_option("--predictor", sm_pred, "oracle|identity|linear");
    CLI::Option* o_sm_steps = sc_sample->add_option("--steps", sm_steps, "reverse steps");
    CLI::Option* o_sm_eta = sc_sample->add_option("--eta", sm_eta, "stochasticity in [0,1]");
    CLI::Option* o_sm_init = sc_sample->add_option("--init", sm_init, "deterministic|stochastic");
    CLI::Option* o_sm_u =
        sc_sample->add_option("--u", sm_u, "constant uncertainty; negative = estimate from --lq");
    CLI::Option* o_sm_lq = sc_sample->add_option("--lq", sm_lq, "degraded input (.pgm/.ppm/.pfield)");
    CLI::Option* o_sm_hq = sc_sample->add_option("--hq", sm_hq, "clean reference (oracle predictor)");
    CLI::Option* o_sm_params =
        sc_sample->add_option("--params", sm_params, "packed linear predictor (.pfield)");
    CLI::Option* o_sm_deg =
        sc_sample->add_option("--degradation", sm_deg, "synthetic input family when --lq is absent");
    CLI::Option* o_sm_l = sc_sample->add_option("--lambda-b", sm_lambda, "bridge noise scale");
    CLI::Option* o_sm_p = sc_sample->add_option("--pi-eot", sm_pieot, "time-weight exponent at u=1");

    // compare-mappings
    SubCtx cx_map;
    int mp_steps = 101;
    CLI::App* sc_map = app.add_subcommand("compare-mappings",
                                          "prior methods in the shared coefficient form");
    cx_map.attach(sc_map);
    CLI::Option* o_mp_steps = sc_map->add_option("--steps", mp_steps, "grid points per method");

    // align-curve
    SubCtx cx_align;
    double al_lambda = 1.0, al_pieot = 0.5;
    CLI::App* sc_align = app.add_subcommand("align-curve",
                                            "cluster separation of degradation families over t");
    cx_align.attach(sc_align);
    CLI::Option* o_al_l = sc_align->add_option("--lambda-b", al_lambda, "bridge noise scale");
    CLI::Option* o_al_p = sc_align->add_option("--pi-eot", al_pieot, "time-weight exponent at u=1");

    // train-toy
    SubCtx cx_train;
    int tt_steps = 1500;
    double tt_lambda = 1.0, tt_pieot = 0.5;
    CLI::App* sc_train = app.add_subcommand("train-toy", "fit the linear toy predictor");
    cx_train.attach(sc_train);
    CLI::Option* o_tt_steps = sc_train->add_option("--steps", tt_steps, "training iterations");
    CLI::Option* o_tt_l = sc_train->add_option("--lambda-b", tt_lambda, "bridge noise scale");
    CLI::Option* o_tt_p = sc_train->add_option("--pi-eot", tt_pieot, "time-weight exponent at u=1");

    // geometry-check
    SubCtx cx_geom;
    double gm_u = 0.5, gm_eta = 0.0, gm_lambda = 1.0, gm_pieot = 0.5;
    CLI::App* sc_geom = app.add_subcommand("geometry-check",
                                           "per-step alignment with the endpoint across step counts");
    cx_geom.attach(sc_geom);
    CLI::Option* o_gm_u = sc_geom->add_option("--u", gm_u, "second uncertainty level (0 = only u=0)");
    CLI::Option* o_gm_eta = sc_geom->add_option("--eta", gm_eta, "stochasticity in [0,1]");
    CLI::Option* o_gm_l = sc_geom->add_option("--lambda-b", gm_lambda, "bridge noise scale");
    CLI::Option* o_gm_p = sc_geom->add_option("--pi-eot", gm_pieot, "time-weight exponent at u=1");

    // uncertainty-map
    SubCtx cx_umap;
    std::string um_lq, um_deg = "noise";
    CLI::App* sc_umap = app.add_subcommand("uncertainty-map",
                                           "pixelwise uncertainty estimate and its histogram");
    cx_umap.attach(sc_umap);
    CLI::Option* o_um_lq = sc_umap->add_option("--lq", um_lq, "degraded input (.pgm/.ppm/.pfield)");
    CLI::Option* o_um_deg =
        sc_umap->add_option("--degradation", um_deg, "synthetic input family when --lq is absent");

    // composition-check
    SubCtx cx_comp;
    std::size_t cp_paths = 60000;
    double cp_u = 0.25, cp_lambda = 1.0, cp_pieot = 0.5;
    CLI::App* sc_comp = app.add_subcommand("composition-check",
                                           "Monte Carlo check of the reverse-step moments");
    cx_comp.attach(sc_comp);
    CLI::Option* o_cp_paths = sc_comp->add_option("--paths", cp_paths, "samples per config (>= 1e4)");
    CLI::Option* o_cp_u = sc_comp->add_option("--u", cp_u, "uncertainty level in [0,1]");
    CLI::Option* o_cp_l = sc_comp->add_option("--lambda-b", cp_lambda, "bridge noise scale");
    CLI::Option* o_cp_p = sc_comp->add_option("--pi-eot", cp_pieot, "time-weight exponent at u=1");

    try {
        app.parse(argc, argv);

        if (sc_trace->parsed()) {
            RunSink sink = cx_trace.open_sink();
            cx_trace.ov(o_tr_u, "u", tr_u);
            cx_trace.ov(o_tr_l, "lambda_b", tr_lambda);
            cx_trace.ov(o_tr_p, "pi_eot", tr_pieot);
            cx_trace.ov(o_tr_s, "steps", tr_steps);
            run_schedule_trace(sink, tr_u, tr_lambda, tr_pieot, tr_steps);
            json inputs{{"u", tr_u}, {"lambda_b", tr_lambda}, {"pi_eot", tr_pieot},
                        {"steps", tr_steps}};
            sink.finish("schedule-trace", cx_trace.seed, inputs);
        } else if (sc_sing->parsed()) {
            RunSink sink = cx_sing.open_sink();
            cx_sing.ov(o_sg_paths, "paths", sg_paths);
            cx_sing.ov(o_sg_u, "u", sg_u);
            run_singularity_demo(sink, cx_sing.seed, sg_paths, sg_u);
            json inputs{{"paths", sg_paths}, {"u", sg_u}};
            sink.finish("singularity-demo", cx_sing.seed, inputs);
        } else if (sc_sample->parsed()) {
            RunSink sink = cx_sample.open_sink();
            cx_sample.ov(o_sm_pred, "predictor", sm_pred);
            cx_sample.ov(o_sm_steps, "steps", sm_steps);
            cx_sample.ov(o_sm_eta, "eta", sm_eta);
            cx_sample.ov(o_sm_init, "init", sm_init);
            cx_sample.ov(o_sm_u, "u", sm_u);
            cx_sample.ov(o_sm_lq, "lq", sm_lq);
            cx_sample.ov(o_sm_hq, "hq", sm_hq);
            cx_sample.ov(o_sm_params, "params", sm_params);
            cx_sample.ov(o_sm_deg, "degradation", sm_deg);
            cx_sample.ov(o_sm_l, "lambda_b", sm_lambda);
            cx_sample.ov(o_sm_p, "pi_eot", sm_pieot);
            json inputs{{"predictor", sm_pred}, {"steps", sm_steps},   {"eta", sm_eta},
                        {"init", sm_init},      {"u", sm_u},           {"lambda_b", sm_lambda},
                        {"pi_eot", sm_pieot},   {"degradation", sm_deg}};
            if (!sm_params.empty()) inputs["params"] = sm_params;
            run_sample(sink, cx_sample.seed, sm_pred, sm_steps, sm_eta, sm_init, sm_u, sm_lq,
                       sm_hq, sm_params, sm_deg, sm_lambda, sm_pieot, inputs);
            sink.finish("sample", cx_sample.seed, inputs);
        } else if (sc_map->parsed()) {
            RunSink sink = cx_map.open_sink();
            cx_map.ov(o_mp_steps, "steps", mp_steps);
            run_compare_mappings(sink, mp_steps);
            json inputs{{"steps", mp_steps}};
            sink.finish("compare-mappings", cx_map.seed, inputs);
        } else if (sc_align->parsed()) {
            RunSink sink = cx_align.open_sink();
            cx_align.ov(o_al_l, "lambda_b", al_lambda);
            cx_align.ov(o_al_p, "pi_eot", al_pieot);
            run_align_curve(sink, cx_align.seed, al_lambda, al_pieot);
            json inputs{{"lambda_b", al_lambda}, {"pi_eot", al_pieot}};
            sink.finish("align-curve", cx_align.seed, inputs);
        } else if (sc_train->parsed()) {
            RunSink sink = cx_train.open_sink();
            cx_train.ov(o_tt_steps, "steps", tt_steps);
            cx_train.ov(o_tt_l, "lambda_b", tt_lambda);
            cx_train.ov(o_tt_p, "pi_eot", tt_pieot);
            json inputs{{"steps", tt_steps}, {"lambda_b", tt_lambda}, {"pi_eot", tt_pieot}};
            run_train_toy(sink, cx_train.seed, tt_steps, tt_lambda, tt_pieot, inputs);
            sink.finish("train-toy", cx_train.seed, inputs);
        } else if (sc_geom->parsed()) {
            RunSink sink = cx_geom.open_sink();
            cx_geom.ov(o_gm_u, "u", gm_u);
            cx_geom.ov(o_gm_eta, "eta", gm_eta);
            cx_geom.ov(o_gm_l, "lambda_b", gm_lambda);
            cx_geom.ov(o_gm_p, "pi_eot", gm_pieot);
            run_geometry_check(sink, cx_geom.seed, gm_u, gm_eta, gm_lambda, gm_pieot);
            json inputs{{"u", gm_u}, {"eta", gm_eta}, {"lambda_b", gm_lambda},
                        {"pi_eot", gm_pieot}};
            sink.finish("geometry-check", cx_geom.seed, inputs);
        } else if (sc_umap->parsed()) {
            RunSink sink = cx_umap.open_sink();
            cx_umap.ov(o_um_lq, "lq", um_lq);
            cx_umap.ov(o_um_deg, "degradation", um_deg);
            json inputs{{"degradation", um_deg}};
            run_uncertainty_map(sink, cx_umap.seed, um_lq, um_deg, inputs);
            sink.finish("uncertainty-map", cx_umap.seed, inputs);
        } else if (sc_comp->parsed()) {
            RunSink sink = cx_comp.open_sink();
            cx_comp.ov(o_cp_paths, "paths", cp_paths);
            cx_comp.ov(o_cp_u, "u", cp_u);
            cx_comp.ov(o_cp_l, "lambda_b", cp_lambda);
            cx_comp.ov(o_cp_p, "pi_eot", cp_pieot);
            run_composition_check(sink, cx_comp.seed, cp_paths, cp_u, cp_lambda, cp_pieot);
            json inputs{{"paths", cp_paths}, {"u", cp_u}, {"lambda_b", cp_lambda},
                        {"pi_eot", cp_pieot}};
            sink.finish("composition-check", cx_comp.seed, inputs);
        }
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
