#include <cmath>

#include "bridgekit/bridge.hpp"
#include "testutil.hpp"

using namespace bridgekit;
using testutil::expect_kind;

namespace {

PixelField S(double v) { return PixelField::scalar(v); }

} // namespace

TEST_CASE("bridge: forward sample composition and Monte Carlo mean") {
    ScheduleParams p;
    RngState rng(7);

    // composition: the returned eps reproduces x_t exactly through the marginal
    PixelField x_hq = sample_gaussian(6, 5, 2, rng);
    PixelField x_lq = shift(sample_gaussian(6, 5, 2, rng), 0.5);
    PixelField u = clip(shift(scale(sample_gaussian(6, 5, 2, rng), 0.2), 0.5), 0.0, 1.0);
    for (double t : {0.35, 0.7}) {
        ForwardSample fs = forward_sample(x_hq, x_lq, u, t, p, rng);
        Coefficients c = coefficients_at(t, u, p);
        for (std::size_t i = 0; i < fs.x_t.size(); ++i) {
            double recon = c.alpha.data[i] * x_lq.data[i] + c.gamma.data[i] * x_hq.data[i] +
                           c.beta.data[i] * fs.eps.data[i];
            CHECK(fs.x_t.data[i] == Catch::Approx(recon).margin(1e-12));
        }
    }

    // exact endpoints: t = 0 returns the clean image untouched, t = 1 is
    // x_lq plus (1+u)-scaled noise
    ForwardSample at0 = forward_sample(x_hq, x_lq, u, 0.0, p, rng);
    REQUIRE(at0.x_t.data == x_hq.data);
    ForwardSample at1 = forward_sample(x_hq, x_lq, u, 1.0, p, rng);
    for (std::size_t i = 0; i < at1.x_t.size(); ++i)
        CHECK(at1.x_t.data[i] ==
              Catch::Approx(x_lq.data[i] + (1.0 + u.data[i]) * at1.eps.data[i]).margin(1e-12));

    // Monte Carlo: empirical mean/std match the coefficient fields
    PixelField hq = PixelField::constant(16, 16, 1, 0.3);
    PixelField lq = PixelField::constant(16, 16, 1, 0.8);
    PixelField uc = PixelField::constant(16, 16, 1, 0.25);
    const double t = 0.6;
    Coefficients c = coefficients_at(t, uc, p);
    const int draws = 300;
    double sum = 0.0, sumsq = 0.0;
    std::size_t n = 0;
    for (int d = 0; d < draws; ++d) {
        ForwardSample fs = forward_sample(hq, lq, uc, t, p, rng);
        for (double v : fs.x_t.data) {
            sum += v;
            sumsq += v * v;
            ++n;
        }
    }
    double m = sum / static_cast<double>(n);
    double sd = std::sqrt(sumsq / static_cast<double>(n) - m * m);
    double want_mean = c.alpha.data[0] * 0.8 + c.gamma.data[0] * 0.3;
    CHECK(m == Catch::Approx(want_mean).margin(0.02));
    CHECK(sd == Catch::Approx(c.beta.data[0]).margin(0.02));

    PixelField small(3, 3, 1);
    expect_kind(ErrorKind::ShapeMismatch, [&] { forward_sample(x_hq, small, u, 0.5, p, rng); });
    expect_kind(ErrorKind::ShapeMismatch, [&] { forward_sample(x_hq, x_lq, small, 0.5, p, rng); });
}

TEST_CASE("bridge: epsilon recovery inverts the forward map") {
    ScheduleParams p;
    RngState rng(11);
    PixelField x_hq = sample_gaussian(4, 4, 1, rng);
    PixelField x_lq = shift(sample_gaussian(4, 4, 1, rng), 0.4);
    PixelField u = PixelField::constant(4, 4, 1, 0.5);

    for (double t : {0.2, 0.5, 0.8, 1.0}) {
        ForwardSample fs = forward_sample(x_hq, x_lq, u, t, p, rng);
        Coefficients c = coefficients_at(t, u, p);
        PixelField eps = epsilon_from_prediction(fs.x_t, x_lq, x_hq, c);
        for (std::size_t i = 0; i < eps.size(); ++i)
            CHECK(eps.data[i] == Catch::Approx(fs.eps.data[i]).margin(1e-10));
    }

    // beta at or below the floor is refused, not epsilon-padded
    Coefficients c0 = coefficients_at(0.0, u, p);
    expect_kind(ErrorKind::BetaFloorViolated,
                [&] { epsilon_from_prediction(x_hq, x_lq, x_hq, c0); });
    Coefficients ctiny = coefficients_at(1e-10, u, p);
    expect_kind(ErrorKind::BetaFloorViolated,
                [&] { epsilon_from_prediction(x_hq, x_lq, x_hq, ctiny); });

    PixelField small(2, 2, 1);
    Coefficients c5 = coefficients_at(0.5, u, p);
    expect_kind(ErrorKind::ShapeMismatch,
                [&] { epsilon_from_prediction(x_hq, small, x_hq, c5); });
}

TEST_CASE("bridge: posterior moments hand case and terminal collapse") {
    ScheduleParams p; // lambda_b = 1 makes beta_t = t exactly at u = 0
    PixelField u = S(0.0);
    Coefficients ct = coefficients_at(0.8, u, p);
    Coefficients cs = coefficients_at(0.4, u, p);
    PixelField x_t = S(0.7), x_lq = S(0.9), xhat0 = S(0.2);

    PosteriorMoments m = posterior_moments(x_t, x_lq, xhat0, ct, cs);
    // worked by hand: var = 0.16*0.48/0.64, mean = 0.36 + 0.12 + 0.25*(-0.06)
    CHECK(m.var.data[0] == Catch::Approx(0.12).margin(1e-12));
    CHECK(m.std.data[0] == Catch::Approx(std::sqrt(0.12)).margin(1e-12));
    CHECK(m.mean.data[0] == Catch::Approx(0.465).margin(1e-12));

    // terminal collapse: s = 0 pins the posterior on the prediction exactly
    Coefficients c0 = coefficients_at(0.0, u, p);
    PosteriorMoments mt = posterior_moments(x_t, x_lq, xhat0, ct, c0);
    CHECK(mt.var.data[0] == 0.0);
    CHECK(mt.std.data[0] == 0.0);
    CHECK(mt.mean.data[0] == Catch::Approx(0.2).margin(1e-15));

    expect_kind(ErrorKind::InvalidParameters,
                [&] { posterior_moments(x_t, x_lq, xhat0, cs, ct); }); // s > t
    expect_kind(ErrorKind::InvalidParameters,
                [&] { posterior_moments(x_t, x_lq, xhat0, ct, ct); }); // s == t

    // a fabricated non-monotone beta is flagged rather than absorbed
    Coefficients bad_s = cs;
    bad_s.beta = S(0.9);
    expect_kind(ErrorKind::NonMonotoneBeta,
                [&] { posterior_moments(x_t, x_lq, xhat0, ct, bad_s); });
}

TEST_CASE("bridge: stochastic step matches posterior moments by Monte Carlo") {
    ScheduleParams p;
    PixelField u = S(0.0);
    Coefficients ct = coefficients_at(0.8, u, p);
    Coefficients cs = coefficients_at(0.4, u, p);
    PixelField x_t = S(0.7), x_lq = S(0.9), xhat0 = S(0.2);
    PosteriorMoments m = posterior_moments(x_t, x_lq, xhat0, ct, cs);

    RngState rng(99);
    const int n = 40000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = ddpm_step(x_t, x_lq, xhat0, ct, cs, rng).data[0];
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double sd = std::sqrt(sumsq / n - mean * mean);
    // se(mean) ~ 0.0017, se(sd) ~ 0.0012: margins sit at ~6 sigma
    CHECK(mean == Catch::Approx(m.mean.data[0]).margin(0.01));
    CHECK(sd == Catch::Approx(m.std.data[0]).margin(0.01));

    // one normal field is consumed even when the posterior variance is zero
    Coefficients c0 = coefficients_at(0.0, u, p);
    RngState a(5), b(5);
    PixelField out = ddpm_step(x_t, x_lq, xhat0, ct, c0, a);
    CHECK(out.data[0] == Catch::Approx(0.2).margin(1e-15));
    b.next_normal();
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("bridge: deterministic step preserves the implied noise") {
    ScheduleParams p;

    // hand case continues the posterior fixture: ratio beta_s/beta_t = 0.5
    {
        PixelField u = S(0.0);
        Coefficients ct = coefficients_at(0.8, u, p);
        Coefficients cs = coefficients_at(0.4, u, p);
        PixelField out = ddim_step(S(0.7), S(0.9), S(0.2), ct, cs);
        CHECK(out.data[0] == Catch::Approx(0.45).margin(1e-12));
        expect_kind(ErrorKind::InvalidParameters, [&] { ddim_step(S(0.7), S(0.9), S(0.2), cs, ct); });
    }

    // noise preservation along a whole chain: the implied eps never drifts
    RngState rng(21);
    PixelField x_hq = clip(shift(scale(sample_gaussian(4, 4, 1, rng), 0.2), 0.5), 0.0, 1.0);
    PixelField x_lq = clip(shift(scale(sample_gaussian(4, 4, 1, rng), 0.2), 0.5), 0.0, 1.0);
    PixelField u = PixelField::constant(4, 4, 1, 0.25);
    PixelField z = sample_gaussian(4, 4, 1, rng);

    Coefficients c1 = coefficients_at(1.0, u, p);
    PixelField x = x_lq;
    for (std::size_t i = 0; i < x.size(); ++i)
        x.data[i] += c1.beta.data[i] * z.data[i]; // beta_1 = 1+u

    const double times[] = {1.0, 0.8, 0.6, 0.4, 0.2, 0.05};
    Coefficients prev = c1;
    for (std::size_t k = 1; k < std::size(times); ++k) {
        Coefficients cur = coefficients_at(times[k], u, p);
        x = ddim_step(x, x_lq, x_hq, prev, cur);
        PixelField eps = epsilon_from_prediction(x, x_lq, x_hq, cur);
        for (std::size_t i = 0; i < eps.size(); ++i)
            CHECK(eps.data[i] == Catch::Approx(z.data[i]).margin(1e-9));
        prev = cur;
    }
}

TEST_CASE("bridge: interpolated step collapses to both samplers") {
    ScheduleParams p;
    PixelField u = PixelField::constant(3, 3, 1, 0.5);
    RngState rng(31);
    PixelField x_lq = shift(sample_gaussian(3, 3, 1, rng), 0.6);
    PixelField xhat0 = shift(sample_gaussian(3, 3, 1, rng), 0.3);
    Coefficients ct = coefficients_at(0.7, u, p);
    Coefficients cs = coefficients_at(0.3, u, p);
    PixelField x_t = shift(sample_gaussian(3, 3, 1, rng), 0.5);

    // eta = 0: bit-identical to the deterministic step, zero draws consumed
    RngState r0(77), probe(77);
    PixelField g0 = general_step(x_t, x_lq, xhat0, ct, cs, 0.0, r0);
    PixelField d = ddim_step(x_t, x_lq, xhat0, ct, cs);
    REQUIRE(g0.data == d.data);
    CHECK(r0.next_u64() == probe.next_u64());

    // eta = 1: same update as the stochastic sampler given the same draws
    RngState ra(123), rb(123);
    PixelField g1 = general_step(x_t, x_lq, xhat0, ct, cs, 1.0, ra);
    PixelField dd = ddpm_step(x_t, x_lq, xhat0, ct, cs, rb);
    for (std::size_t i = 0; i < g1.size(); ++i)
        CHECK(g1.data[i] == Catch::Approx(dd.data[i]).margin(1e-12));

    RngState rp(1);
    expect_kind(ErrorKind::InvalidParameters,
                [&] { general_step(x_t, x_lq, xhat0, ct, cs, -0.1, rp); });
    expect_kind(ErrorKind::InvalidParameters,
                [&] { general_step(x_t, x_lq, xhat0, ct, cs, 1.1, rp); });
}

TEST_CASE("bridge: flow velocity finite at terminal and on the mean path") {
    ScheduleParams p;

    // hand case at the terminal, u = 0: v = (1/1)*(0.5-0.9) + 1*(0.9-0.2)
    PixelField v1 = pf_ode_velocity(S(0.5), S(0.9), S(0.2), S(0.0), 1.0, p);
    CHECK(v1.data[0] == Catch::Approx(0.3).margin(1e-12));

    // on the mean path the diffusion term drops out: v = alpha_dot*(x_lq - xhat0)
    PixelField u = PixelField::constant(4, 4, 1, 0.5);
    RngState rng(41);
    PixelField x_lq = shift(sample_gaussian(4, 4, 1, rng), 0.5);
    PixelField xhat0 = shift(sample_gaussian(4, 4, 1, rng), 0.2);
    for (double t : {0.25, 0.5, 0.75}) {
        Coefficients c = coefficients_at(t, u, p);
        PixelField mu = x_lq;
        for (std::size_t i = 0; i < mu.size(); ++i)
            mu.data[i] = c.alpha.data[i] * x_lq.data[i] + c.gamma.data[i] * xhat0.data[i];
        PixelField v = pf_ode_velocity(mu, x_lq, xhat0, u, t, p);
        PixelField adot = alpha_dot(t, u, p);
        for (std::size_t i = 0; i < v.size(); ++i)
            CHECK(v.data[i] ==
                  Catch::Approx(adot.data[i] * (x_lq.data[i] - xhat0.data[i])).margin(1e-10));
    }

    // stays finite arbitrarily close to t = 0 (beta shrinks but so does x - mu)
    PixelField near0 = pf_ode_velocity(S(0.5), S(0.9), S(0.2), S(0.0), 1e-6, p);
    CHECK(all_finite(near0));

    expect_kind(ErrorKind::InvalidParameters,
                [&] { pf_ode_velocity(S(0.5), S(0.9), S(0.2), S(0.0), 0.0, p); });
    // the endpoint restriction of the path derivative propagates through
    expect_kind(ErrorKind::EndpointVelocityUndefined,
                [&] { pf_ode_velocity(S(0.5), S(0.9), S(0.2), S(0.5), 1.0, p); });
}
