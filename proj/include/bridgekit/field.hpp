#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "bridgekit/equation_entry.hpp"
#include "bridgekit/error.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

// Division guard: elementwise division refuses divisors below this magnitude
// instead of epsilon-padding them. A degenerate schedule value (beta -> 0)
// must be handled structurally by the caller, never masked numerically.
inline constexpr double kDivFloor = 1e-12;

// Dense H x W x C grid of doubles in row-major (row, column, channel) order.
// Represents images, uncertainty maps and elementwise schedule coefficients
// alike. The uncertainty map is carried at full H x W x C resolution;
// broadcasting one channel across all three is a caller choice.
struct PixelField {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    PixelField() = default;

    PixelField(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c) {
        if (h <= 0 || w <= 0 || c <= 0)
            raise(ErrorKind::InvalidParameters,
                  "PixelField dimensions must be positive, got " + std::to_string(h) + "x" +
                      std::to_string(w) + "x" + std::to_string(c));
        data.assign(static_cast<std::size_t>(h) * w * c, fill);
    }

    static PixelField zeros(int h, int w, int c) { return PixelField(h, w, c, 0.0); }
    static PixelField constant(int h, int w, int c, double v) { return PixelField(h, w, c, v); }

    // 1x1x1 wrapper, handy for scalar-pixel experiments.
    static PixelField scalar(double v) { return PixelField(1, 1, 1, v); }

    std::size_t size() const { return data.size(); }

    double& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    double at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    bool same_shape(const PixelField& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }

    std::string shape_str() const {
        return std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels);
    }
};

inline void require_same_shape(const PixelField& a, const PixelField& b, const char* what) {
    if (!a.same_shape(b))
        raise(ErrorKind::ShapeMismatch,
              std::string(what) + ": " + a.shape_str() + " vs " + b.shape_str());
}

enum class BinaryOp { add, sub, mul, div, min, max };

// Elementwise lift of {+, -, *, /, min, max}. Division enforces |b| >= kDivFloor.
inline PixelField map2(const PixelField& a, const PixelField& b, BinaryOp op) {
    require_same_shape(a, b, "map2");
    PixelField out = a;
    switch (op) {
        case BinaryOp::add:
            for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += b.data[i];
            break;
        case BinaryOp::sub:
            for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= b.data[i];
            break;
        case BinaryOp::mul:
            for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= b.data[i];
            break;
        case BinaryOp::div:
            for (std::size_t i = 0; i < out.size(); ++i) {
                if (!(std::fabs(b.data[i]) >= kDivFloor))
                    raise(ErrorKind::DivisionFloorViolated,
                          "map2 div: |divisor| < 1e-12 at element " + std::to_string(i));
                out.data[i] /= b.data[i];
            }
            break;
        case BinaryOp::min:
            for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = std::min(out.data[i], b.data[i]);
            break;
        case BinaryOp::max:
            for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = std::max(out.data[i], b.data[i]);
            break;
    }
    return out;
}

// i.i.d. standard normal field; advances rng by one draw per element.
inline PixelField sample_gaussian(int h, int w, int c, RngState& rng) {
    PixelField out(h, w, c);
    for (auto& v : out.data) v = rng.next_normal();
    return out;
}

inline PixelField sample_gaussian_like(const PixelField& shape_of, RngState& rng) {
    return sample_gaussian(shape_of.height, shape_of.width, shape_of.channels, rng);
}

// Clamp to [lo, hi]. NaN inputs map to lo (serialization paths rely on this).
inline PixelField clip(const PixelField& x, double lo, double hi) {
    if (!(lo <= hi))
        raise(ErrorKind::InvalidBounds,
              "clip: lo " + std::to_string(lo) + " > hi " + std::to_string(hi));
    PixelField out = x;
    for (auto& v : out.data) {
        if (std::isnan(v)) v = lo;
        else if (v < lo) v = lo;
        else if (v > hi) v = hi;
    }
    return out;
}

enum class ReduceStat { mean, l1_norm, l2_norm, max_abs };

inline double reduce(const PixelField& x, ReduceStat stat) {
    if (x.data.empty()) raise(ErrorKind::InvalidParameters, "reduce: empty field");
    switch (stat) {
        case ReduceStat::mean: {
            double s = 0.0;
            for (double v : x.data) s += v;
            return s / static_cast<double>(x.size());
        }
        case ReduceStat::l1_norm: {
            double s = 0.0;
            for (double v : x.data) s += std::fabs(v);
            return s;
        }
        case ReduceStat::l2_norm: {
            double s = 0.0;
            for (double v : x.data) s += v * v;
            return std::sqrt(s);
        }
        case ReduceStat::max_abs: {
            double m = 0.0;
            for (double v : x.data) m = std::max(m, std::fabs(v));
            return m;
        }
    }
    raise(ErrorKind::InvalidParameters, "reduce: unknown stat");
}

// Population standard deviation of the elements (used by trajectory logging).
inline double field_std(const PixelField& x) {
    if (x.data.empty()) raise(ErrorKind::InvalidParameters, "field_std: empty field");
    double m = reduce(x, ReduceStat::mean);
    double s = 0.0;
    for (double v : x.data) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size()));
}

// 10 log10(peak^2 / MSE) in dB; +infinity when the two fields are identical.
inline double psnr(const PixelField& a, const PixelField& b, double peak = 1.0) {
    require_same_shape(a, b, "psnr");
    if (!(peak > 0.0)) raise(ErrorKind::InvalidParameters, "psnr: peak must be > 0");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

// Convenience wrappers used throughout the numeric modules.
inline PixelField operator+(const PixelField& a, const PixelField& b) { return map2(a, b, BinaryOp::add); }
inline PixelField operator-(const PixelField& a, const PixelField& b) { return map2(a, b, BinaryOp::sub); }
inline PixelField operator*(const PixelField& a, const PixelField& b) { return map2(a, b, BinaryOp::mul); }

inline PixelField scale(const PixelField& a, double s) {
    PixelField out = a;
    for (auto& v : out.data) v *= s;
    return out;
}

inline PixelField shift(const PixelField& a, double s) {
    PixelField out = a;
    for (auto& v : out.data) v += s;
    return out;
}

inline PixelField apply(const PixelField& a, double (*f)(double)) {
    PixelField out = a;
    for (auto& v : out.data) v = f(v);
    return out;
}

inline bool all_finite(const PixelField& x) {
    for (double v : x.data)
        if (!std::isfinite(v)) return false;
    return true;
}

inline std::vector<EquationMapEntry> field_equation_entries() {
    return {
        {"standard normal field", "eps ~ N(0, I), drawn elementwise",
         "field.sample_gaussian", "field: gaussian sampling moments and reproducibility"},
        {"range clamp", "clip(x, lo, hi) = min(max(x, lo), hi) elementwise",
         "field.clip", "field: clip clamps, saturates and is idempotent"},
    };
}

} // namespace bridgekit
