#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "bridgekit/analysis.hpp"
#include "bridgekit/field.hpp"

namespace bridgekit {

// Deterministic procedural texture, one channel, values in [0,1]. The index
// cycles through pattern families (gradients, checkerboards, sinusoid mixes,
// radial blobs) with index-dependent frequencies so any count of distinct
// images can be produced without touching an RNG.
inline PixelField make_texture(std::size_t index, int h, int w) {
    PixelField img = PixelField::zeros(h, w, 1);
    double fi = static_cast<double>(index);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double y = static_cast<double>(r) / static_cast<double>(h > 1 ? h - 1 : 1);
            double x = static_cast<double>(c) / static_cast<double>(w > 1 ? w - 1 : 1);
            double v = 0.0;
            switch (index % 4) {
                case 0: // tilted gradient
                    v = 0.5 * (x + y) * (0.8 + 0.2 * std::sin(fi + 1.0));
                    break;
                case 1: { // checkerboard, cell size varies with index
                    int cell = 2 + static_cast<int>((index / 4) % 3);
                    v = (((r / cell) + (c / cell)) % 2 == 0) ? 0.25 : 0.75;
                    break;
                }
                case 2: // sinusoid mix
                    v = 0.5 + 0.25 * std::sin((2.0 + fi * 0.5) * M_PI * x + fi) +
                        0.2 * std::cos((1.5 + fi * 0.25) * M_PI * y - fi);
                    break;
                case 3: { // radial blob
                    double dx = x - 0.5, dy = y - 0.5;
                    v = 0.8 * std::exp(-(dx * dx + dy * dy) * (6.0 + fi)) + 0.1;
                    break;
                }
            }
            img.at(r, c, 0) = v;
        }
    return clip(img, 0.0, 1.0);
}

inline std::vector<PixelField> clean_image_set(std::size_t n, int h, int w) {
    std::vector<PixelField> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(make_texture(i, h, w));
    return out;
}

// Clean images for the denoising toy set: one shared smooth base texture
// plus a small per-image smooth perturbation. Keeping the across-dataset
// variance of each pixel far below the noise variance is what lets a
// per-pixel linear model denoise well.
inline PixelField toy_clean_image(std::size_t index, int h, int w, double variation = 0.03) {
    PixelField img = PixelField::zeros(h, w, 1);
    double fi = static_cast<double>(index);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double y = static_cast<double>(r) / static_cast<double>(h > 1 ? h - 1 : 1);
            double x = static_cast<double>(c) / static_cast<double>(w > 1 ? w - 1 : 1);
            double base = 0.5 +
                          0.22 * std::sin(2.0 * M_PI * x + 0.7) * std::cos(1.5 * M_PI * y - 0.3) +
                          0.12 * std::sin(3.1 * M_PI * (x + y));
            double wobble =
                std::sin(2.3 * M_PI * x + 1.7 * fi) * std::cos(1.9 * M_PI * y + 0.9 * fi);
            img.at(r, c, 0) = base + variation * wobble;
        }
    return clip(img, 0.0, 1.0);
}

// (clean, degraded) pairs under additive Gaussian noise with clipping.
inline std::vector<std::pair<PixelField, PixelField>> toy_pairs(std::size_t n_pairs, int h, int w,
                                                                double sigma, RngState& rng) {
    if (n_pairs < 1) raise(ErrorKind::EmptyDataset, "toy_pairs: needs at least one pair");
    std::vector<std::pair<PixelField, PixelField>> pairs;
    pairs.reserve(n_pairs);
    Degradation noise = Degradation::additive_noise(sigma);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        PixelField hq = toy_clean_image(i, h, w);
        RngState drng = rng.fork(i);
        PixelField lq = apply_degradation(hq, noise, drng);
        pairs.emplace_back(std::move(hq), std::move(lq));
    }
    return pairs;
}

// Clean images for the alignment experiment: one shared texture with a small
// per-image wobble on top. The wobble keeps image identity visible at every
// t (so clusters can merge without collapsing to a point), while the shared
// fine checkerboard and midtone ramp guarantee every degradation family
// leaves a signature much larger than the wobble: blur flattens the checker,
// darkening shifts the midtones, streaks saturate sparse lines.
inline PixelField alignment_clean_image(std::size_t index, int h, int w,
                                        double variation = 0.1) {
    PixelField img = PixelField::zeros(h, w, 1);
    double fi = static_cast<double>(index);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double y = static_cast<double>(r) / static_cast<double>(h > 1 ? h - 1 : 1);
            double x = static_cast<double>(c) / static_cast<double>(w > 1 ? w - 1 : 1);
            double checker = (((r / 2) + (c / 2)) % 2 == 0) ? 0.2 : -0.2;
            double base = 0.55 + checker + 0.08 * std::sin(2.0 * M_PI * x + 0.4) * std::cos(M_PI * y);
            double wobble =
                std::sin(2.3 * M_PI * x + 1.7 * fi) * std::cos(1.9 * M_PI * y + 0.9 * fi);
            img.at(r, c, 0) = base + variation * wobble;
        }
    return clip(img, 0.0, 1.0);
}

inline std::vector<PixelField> alignment_image_set(std::size_t n, int h, int w,
                                                   double variation = 0.1) {
    std::vector<PixelField> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(alignment_clean_image(i, h, w, variation));
    return out;
}

// The four degradation families used by the alignment experiment: one
// noise-like, one photometric, one smoothing, one structured-occlusion.
// Strengths are matched to alignment_image_set so each family's signature
// clearly exceeds the per-image wobble at large t.
inline std::vector<Degradation> default_alignment_degradations() {
    return {
        Degradation::additive_noise(0.12),
        Degradation::gamma_darken(3.0),
        Degradation::box_blur(5),
        Degradation::streaks(8, 0.6, 0.8),
    };
}

} // namespace bridgekit
