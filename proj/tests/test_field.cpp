#include <cmath>
#include <limits>

#include "bridgekit/field.hpp"
#include "testutil.hpp"

using namespace bridgekit;
using testutil::expect_kind;

TEST_CASE("field: gaussian sampling moments and reproducibility") {
    RngState rng(123);
    PixelField f = sample_gaussian(40, 40, 1, rng);
    REQUIRE(f.size() == 1600);
    REQUIRE(all_finite(f));
    // n = 1600: se(mean) = 0.025, se(std) ~ 0.018
    CHECK(std::fabs(reduce(f, ReduceStat::mean)) < 0.1);
    CHECK(field_std(f) == Catch::Approx(1.0).margin(0.08));

    RngState rng2(123);
    PixelField g = sample_gaussian(40, 40, 1, rng2);
    REQUIRE(g.data == f.data); // bit-identical for equal seeds

    RngState rng3(124);
    PixelField h = sample_gaussian(40, 40, 1, rng3);
    CHECK(h.data != f.data);

    PixelField like = sample_gaussian_like(f, rng);
    CHECK(like.same_shape(f));
}

TEST_CASE("field: clip clamps, saturates and is idempotent") {
    PixelField x(2, 2, 1);
    x.data = {-0.5, 0.3, 1.7, std::numeric_limits<double>::quiet_NaN()};
    PixelField c = clip(x, 0.0, 1.0);
    CHECK(c.data[0] == 0.0);
    CHECK(c.data[1] == 0.3);
    CHECK(c.data[2] == 1.0);
    CHECK(c.data[3] == 0.0); // NaN maps to the lower bound

    PixelField cc = clip(c, 0.0, 1.0);
    REQUIRE(cc.data == c.data);

    PixelField wide = clip(x, -2.0, 2.0);
    CHECK(wide.data[0] == -0.5);
    CHECK(wide.data[2] == 1.7);

    expect_kind(ErrorKind::InvalidBounds, [&] { clip(x, 1.0, 0.0); });
}

TEST_CASE("field: elementwise algebra and the division floor") {
    PixelField a(1, 3, 1);
    a.data = {1.0, -2.0, 3.0};
    PixelField b(1, 3, 1);
    b.data = {0.5, 4.0, -1.0};

    CHECK((a + b).data == std::vector<double>{1.5, 2.0, 2.0});
    CHECK((a - b).data == std::vector<double>{0.5, -6.0, 4.0});
    CHECK((a * b).data == std::vector<double>{0.5, -8.0, -3.0});
    CHECK(map2(a, b, BinaryOp::div).data == std::vector<double>{2.0, -0.5, -3.0});
    CHECK(map2(a, b, BinaryOp::min).data == std::vector<double>{0.5, -2.0, -1.0});
    CHECK(map2(a, b, BinaryOp::max).data == std::vector<double>{1.0, 4.0, 3.0});
    CHECK(scale(a, 2.0).data == std::vector<double>{2.0, -4.0, 6.0});
    CHECK(shift(a, 1.0).data == std::vector<double>{2.0, -1.0, 4.0});

    PixelField tiny = PixelField::constant(1, 3, 1, 1e-13);
    expect_kind(ErrorKind::DivisionFloorViolated, [&] { map2(a, tiny, BinaryOp::div); });

    PixelField other(3, 1, 1);
    expect_kind(ErrorKind::ShapeMismatch, [&] { a + other; });
    expect_kind(ErrorKind::InvalidParameters, [] { PixelField(0, 2, 1); });
}

TEST_CASE("field: reductions, psnr and shape guards") {
    PixelField x(2, 2, 1);
    x.data = {1.0, -2.0, 3.0, 0.0};
    CHECK(reduce(x, ReduceStat::mean) == Catch::Approx(0.5));
    CHECK(reduce(x, ReduceStat::l1_norm) == Catch::Approx(6.0));
    CHECK(reduce(x, ReduceStat::l2_norm) == Catch::Approx(std::sqrt(14.0)));
    CHECK(reduce(x, ReduceStat::max_abs) == Catch::Approx(3.0));
    CHECK(field_std(PixelField::constant(3, 3, 1, 0.7)) == Catch::Approx(0.0).margin(1e-12));

    PixelField zeros = PixelField::zeros(2, 2, 1);
    PixelField tenth = PixelField::constant(2, 2, 1, 0.1);
    CHECK(std::isinf(psnr(zeros, zeros)));
    CHECK(psnr(zeros, tenth) == Catch::Approx(20.0).margin(1e-12));
    expect_kind(ErrorKind::InvalidParameters, [&] { psnr(zeros, tenth, 0.0); });

    PixelField nan_field = PixelField::constant(1, 1, 1, std::numeric_limits<double>::quiet_NaN());
    CHECK_FALSE(all_finite(nan_field));
    CHECK(all_finite(x));
}
