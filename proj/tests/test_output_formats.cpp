#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>

#include "bridgekit/field_io.hpp"
#include "bridgekit/svg.hpp"
#include "bridgekit/textio.hpp"
#include "testutil.hpp"

using namespace bridgekit;

namespace {

std::string tmp_path(const std::string& name) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "bridgekit_io_tests";
    fs::create_directories(dir);
    return (dir / name).string();
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

} // namespace

TEST_CASE("io: pnm write, read and quantization") {
    PixelField f(2, 3, 1);
    f.data = {0.0, 1.0, 0.5, std::numeric_limits<double>::quiet_NaN(), -0.25, 2.0};
    const std::string pgm = tmp_path("quant.pgm");
    write_pgm(pgm, f);

    // NaN and below-range clamp to 0, above-range saturates, 0.5 rounds up.
    CHECK(read_text_file(pgm) == "P2\n3 2\n255\n0 255 128 0 0 255 \n");

    PixelField back = read_pnm(pgm);
    REQUIRE(back.height == 2);
    REQUIRE(back.width == 3);
    REQUIRE(back.channels == 1);
    CHECK(back.data[0] == 0.0);
    CHECK(back.data[1] == 1.0);
    CHECK(back.data[2] == 128.0 / 255.0);
    CHECK(back.data[3] == 0.0);
    CHECK(back.data[5] == 1.0);

    PixelField rgb(1, 2, 3);
    rgb.data = {0.0, 0.5, 1.0, 1.0, 0.5, 0.0};
    const std::string ppm = tmp_path("color.ppm");
    write_ppm(ppm, rgb);
    CHECK(read_text_file(ppm) == "P3\n2 1\n255\n0 128 255 255 128 0 \n");
    PixelField rgb_back = read_pnm(ppm);
    REQUIRE(rgb_back.channels == 3);
    CHECK(rgb_back.data[1] == 128.0 / 255.0);

    // channel mismatches refuse to write
    testutil::expect_kind(ErrorKind::ShapeMismatch, [&] { write_pgm(tmp_path("x.pgm"), rgb); });
    testutil::expect_kind(ErrorKind::ShapeMismatch, [&] { write_ppm(tmp_path("x.ppm"), f); });

    // comments and non-255 maxval are legal PNM
    const std::string hand = tmp_path("hand.pgm");
    write_text_file(hand, "P2 # ascii grey\n# size follows\n2 1\n100\n25 100\n");
    PixelField h = read_pnm(hand);
    REQUIRE(h.width == 2);
    REQUIRE(h.height == 1);
    CHECK(h.data[0] == 0.25);
    CHECK(h.data[1] == 1.0);

    auto reject = [&](const std::string& name, const std::string& content) {
        const std::string p = tmp_path(name);
        write_text_file(p, content);
        testutil::expect_kind(ErrorKind::IoError, [&] { read_pnm(p); });
    };
    reject("bin.pgm", "P5\n2 1\n255\n..");              // binary variant unsupported
    reject("short.pgm", "P2\n3 2\n255\n1 2");           // truncated pixels
    reject("range.pgm", "P2\n1 1\n255\n256\n");         // pixel beyond maxval
    reject("neg.pgm", "P2\n-3 2\n255\n0\n");            // nonpositive width
    reject("alpha.pgm", "P2\nabc 2\n255\n0 0 0 0 0 0"); // unparsable width
    testutil::expect_kind(ErrorKind::IoError,
                          [&] { read_pnm(tmp_path("does_not_exist.pgm")); });
}

TEST_CASE("io: pfield lossless round trip and dispatch") {
    PixelField f(3, 5, 2);
    f.data.assign(f.data.size(), 0.0);
    f.data[0] = 1.0 / 3.0;
    f.data[1] = 0.1;
    f.data[2] = 1e-300;
    f.data[3] = -1e300;
    f.data[4] = 3.141592653589793;
    f.data[5] = std::numeric_limits<double>::min();
    f.data[6] = std::numeric_limits<double>::denorm_min();
    f.data[7] = -0.4999999999999999;
    for (std::size_t i = 8; i < f.data.size(); ++i)
        f.data[i] = std::sin(static_cast<double>(i)) * 1e3;

    const std::string path = tmp_path("exact.pfield");
    write_pfield(path, f);

    const std::string text = read_text_file(path);
    CHECK(text.rfind("PFIELD 3 5 2\n", 0) == 0);
    // 30 values at 6 per line
    CHECK(count_occurrences(text, "\n") == 6);

    PixelField g = read_pfield(path);
    REQUIRE(g.height == 3);
    REQUIRE(g.width == 5);
    REQUIRE(g.channels == 2);
    REQUIRE(g.data == f.data); // bit-exact, including denormals

    // extension dispatch
    PixelField grey(1, 1, 1);
    grey.data = {0.5};
    const std::string pgm = tmp_path("auto.pgm");
    write_pgm(pgm, grey);
    CHECK(read_field_auto(pgm).data[0] == 128.0 / 255.0);
    CHECK(read_field_auto(path).data == f.data);
    testutil::expect_kind(ErrorKind::IoError, [&] { read_field_auto(tmp_path("auto.txt")); });
    testutil::expect_kind(ErrorKind::IoError, [&] { read_field_auto("no_extension"); });

    auto reject = [&](const std::string& name, const std::string& content) {
        const std::string p = tmp_path(name);
        write_text_file(p, content);
        testutil::expect_kind(ErrorKind::IoError, [&] { read_pfield(p); });
    };
    reject("magic.pfield", "PFELD 1 1 1\n0\n");
    reject("dims.pfield", "PFIELD 0 1 1\n");
    reject("missing.pfield", "PFIELD 2 2\n0 0 0 0\n");
    reject("trunc.pfield", "PFIELD 1 2 1\n0.5\n");
}

TEST_CASE("io: csv table, hashing and number formatting") {
    // shortest-exact formatting survives a parse round trip
    const double probes[] = {1.0 / 3.0,
                             0.1,
                             1e-300,
                             -1.5e300,
                             6.02214076e23,
                             std::numeric_limits<double>::denorm_min(),
                             -0.0,
                             12345.678901234567};
    for (double v : probes)
        CHECK(std::strtod(format_exact(v).c_str(), nullptr) == v);
    CHECK(format_exact(1.0) == "1");
    CHECK(format_exact(0.5) == "0.5");
    CHECK(format_exact(0.1) == "0.10000000000000001");

    CHECK(format_csv(1.0 / 3.0) == "0.333333333333");
    CHECK(format_csv(0.1) == "0.1");
    CHECK(format_csv(1e-5) == "1e-05");
    CHECK(format_csv(123456.789) == "123456.789");

    // frozen FNV-1a 64 vectors
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("abc") == "e71fa2190541574b");
    CHECK(fnv1a64_hex("bridgekit\n") == "7fad39bcb524dc2a");

    CsvTable t;
    t.header = {"t", "value"};
    t.rows = {{"0", "1"}};
    CHECK(t.to_string() == "t,value\n0,1\n");
    CHECK(fnv1a64_hex(t.to_string()) == "d3a9df2d5a28f387");

    const std::string path = tmp_path("table.csv");
    t.write(path);
    CHECK(read_text_file(path) == t.to_string());

    CsvTable empty;
    CHECK(empty.to_string() == "\n"); // header line is always present
}

TEST_CASE("svg: line plot structure and guards") {
    SvgSeries a{"unit line", {0.0, 1.0}, {0.0, 1.0}};
    SvgSeries b{"flipped", {0.0, 1.0}, {1.0, 0.0}};
    const std::string svg = svg_line_plot({a, b}, "time", "value");

    CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
    CHECK(svg.size() >= 7);
    CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
    CHECK(count_occurrences(svg, "<polyline") == 2);
    // plot area is 70..620 x 20..370; the unit line spans corner to corner
    CHECK(svg.find("points=\"70.00,370.00 620.00,20.00\"") != std::string::npos);
    CHECK(svg.find("stroke=\"#1f77b4\"") != std::string::npos);
    CHECK(svg.find("stroke=\"#d62728\"") != std::string::npos);
    CHECK(svg.find(">unit line</text>") != std::string::npos);
    CHECK(svg.find(">flipped</text>") != std::string::npos);
    CHECK(svg.find(">time</text>") != std::string::npos);
    CHECK(svg.find(">value</text>") != std::string::npos);

    // log ticks label the original values, not their logs
    SvgSeries wide{"decades", {1.0, 2.0, 3.0}, {0.01, 1.0, 100.0}};
    const std::string logplot =
        svg_line_plot({wide}, "step", "error", AxisScale::linear, AxisScale::log10);
    CHECK(logplot.find(">0.01</text>") != std::string::npos);
    CHECK(logplot.find(">100</text>") != std::string::npos);

    // a single point still renders via range padding
    const std::string dot = svg_line_plot({SvgSeries{"dot", {5.0}, {7.0}}}, "x", "y");
    CHECK(dot.find("nan") == std::string::npos);
    CHECK(dot.find("<polyline") != std::string::npos);

    testutil::expect_kind(ErrorKind::InvalidParameters, [] { svg_line_plot({}, "x", "y"); });
    testutil::expect_kind(ErrorKind::InvalidParameters, [] {
        svg_line_plot({SvgSeries{"ragged", {1.0, 2.0}, {1.0}}}, "x", "y");
    });
    testutil::expect_kind(ErrorKind::InvalidParameters,
                          [] { svg_line_plot({SvgSeries{"hollow", {}, {}}}, "x", "y"); });
    testutil::expect_kind(ErrorKind::DomainError, [] {
        svg_line_plot({SvgSeries{"zero", {1.0, 2.0}, {0.0, 1.0}}}, "x", "y", AxisScale::linear,
                      AxisScale::log10);
    });
    testutil::expect_kind(ErrorKind::DomainError, [] {
        svg_line_plot({SvgSeries{"negx", {-1.0, 2.0}, {1.0, 1.0}}}, "x", "y", AxisScale::log10);
    });

    const std::string path = tmp_path("plot.svg");
    emit_svg_lineplot({a, b}, "time", "value", path);
    CHECK(read_text_file(path) == svg);
}
