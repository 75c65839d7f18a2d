#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bridgekit/error.hpp"

namespace bridgekit {

// Shortest round-trippable decimal (17 significant digits).
inline std::string format_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// CSV cell format: 12 significant digits, so values can be cross-checked
// from other languages without binary parsing.
inline std::string format_csv(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary); // binary: keep LF line endings everywhere
    if (!out) raise(ErrorKind::IoError, "cannot open for writing: " + path);
    out << content;
    if (!out) raise(ErrorKind::IoError, "write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoError, "cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) raise(ErrorKind::IoError, "read failed: " + path);
    return ss.str();
}

// FNV-1a 64-bit, hex-encoded; used for output hashes in run manifests.
inline std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Minimal CSV writer: header + rows, comma separators, LF endings, UTF-8.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out << ',';
            out << header[i];
        }
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out << ',';
                out << row[i];
            }
            out << '\n';
        }
        return out.str();
    }

    void write(const std::string& path) const { write_text_file(path, to_string()); }
};

} // namespace bridgekit
