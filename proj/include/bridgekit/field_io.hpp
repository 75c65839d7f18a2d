#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "bridgekit/field.hpp"
#include "bridgekit/textio.hpp"

namespace bridgekit {

// ASCII image formats, maxval 255, linear quantization of [0,1]:
//   PGM (P2) for single-channel, PPM (P3) for 3-channel fields.
// The lossless PFIELD dump ("PFIELD h w c" + decimal values) round-trips
// exact doubles for tests and trained-parameter storage.

namespace detail {

inline int quantize255(double v) {
    if (std::isnan(v) || v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return static_cast<int>(std::lround(v * 255.0));
}

inline std::string ascii_image_body(const PixelField& f) {
    std::ostringstream out;
    int per_line = 0;
    for (int r = 0; r < f.height; ++r)
        for (int c = 0; c < f.width; ++c)
            for (int ch = 0; ch < f.channels; ++ch) {
                out << quantize255(f.at(r, c, ch));
                if (++per_line == 12) {
                    out << '\n';
                    per_line = 0;
                } else {
                    out << ' ';
                }
            }
    if (per_line) out << '\n';
    return out.str();
}

// Reads one whitespace/comment-tolerant token stream for PNM parsing.
inline bool next_token(std::istringstream& in, std::string& tok) {
    while (in >> tok) {
        if (tok[0] == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        return true;
    }
    return false;
}

} // namespace detail

inline void write_pgm(const std::string& path, const PixelField& f) {
    if (f.channels != 1)
        raise(ErrorKind::ShapeMismatch, "write_pgm needs a 1-channel field, got " + f.shape_str());
    std::ostringstream out;
    out << "P2\n" << f.width << ' ' << f.height << "\n255\n" << detail::ascii_image_body(f);
    write_text_file(path, out.str());
}

inline void write_ppm(const std::string& path, const PixelField& f) {
    if (f.channels != 3)
        raise(ErrorKind::ShapeMismatch, "write_ppm needs a 3-channel field, got " + f.shape_str());
    std::ostringstream out;
    out << "P3\n" << f.width << ' ' << f.height << "\n255\n" << detail::ascii_image_body(f);
    write_text_file(path, out.str());
}

inline PixelField read_pnm(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string tok;
    if (!detail::next_token(in, tok) || (tok != "P2" && tok != "P3"))
        raise(ErrorKind::IoError, "not an ASCII PGM/PPM file: " + path);
    int channels = tok == "P2" ? 1 : 3;
    long w = 0, h = 0, maxval = 0;
    auto read_int = [&](long& v, const char* what) {
        if (!detail::next_token(in, tok)) raise(ErrorKind::IoError, std::string("truncated ") + what + ": " + path);
        try {
            v = std::stol(tok);
        } catch (...) {
            raise(ErrorKind::IoError, std::string("bad ") + what + " '" + tok + "': " + path);
        }
    };
    read_int(w, "width");
    read_int(h, "height");
    read_int(maxval, "maxval");
    if (w <= 0 || h <= 0 || maxval <= 0)
        raise(ErrorKind::IoError, "bad PNM header in " + path);
    PixelField f(static_cast<int>(h), static_cast<int>(w), channels);
    for (auto& v : f.data) {
        long q;
        read_int(q, "pixel");
        if (q < 0 || q > maxval) raise(ErrorKind::IoError, "pixel out of range in " + path);
        v = static_cast<double>(q) / static_cast<double>(maxval);
    }
    return f;
}

inline void write_pfield(const std::string& path, const PixelField& f) {
    std::ostringstream out;
    out << "PFIELD " << f.height << ' ' << f.width << ' ' << f.channels << '\n';
    int per_line = 0;
    for (double v : f.data) {
        out << format_exact(v);
        if (++per_line == 6) {
            out << '\n';
            per_line = 0;
        } else {
            out << ' ';
        }
    }
    if (per_line) out << '\n';
    write_text_file(path, out.str());
}

inline PixelField read_pfield(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string magic;
    long h = 0, w = 0, c = 0;
    if (!(in >> magic >> h >> w >> c) || magic != "PFIELD" || h <= 0 || w <= 0 || c <= 0)
        raise(ErrorKind::IoError, "bad PFIELD header in " + path);
    PixelField f(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    for (auto& v : f.data)
        if (!(in >> v)) raise(ErrorKind::IoError, "truncated PFIELD data in " + path);
    return f;
}

// Dispatch on extension: .pgm/.ppm (quantized) or .pfield (lossless).
inline PixelField read_field_auto(const std::string& path) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".pgm" || ext == ".ppm") return read_pnm(path);
    if (ext == ".pfield") return read_pfield(path);
    raise(ErrorKind::IoError, "unsupported field extension (want .pgm/.ppm/.pfield): " + path);
}

} // namespace bridgekit
