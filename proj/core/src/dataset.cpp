#include "aknn/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

namespace aknn {

namespace {

double next_unit(std::mt19937_64& rng) {
    // 53 random bits mapped to [0, 1); bit-stable across platforms, unlike
    // std::uniform_real_distribution.
    return double(rng() >> 11) * 0x1.0p-53;
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line,
                            const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                             what);
}

double parse_coord(std::string_view field, const std::filesystem::path& path,
                   std::size_t line, const char* name) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail_line(path, line, std::string("malformed ") + name + " value '" +
                                  std::string(field) + "'");
    if (!std::isfinite(value))
        fail_line(path, line, std::string(name) + " is not finite");
    return value;
}

}  // namespace

Dataset generate_dataset(std::size_t n, int num_classes, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
    if (num_classes < 1)
        throw std::invalid_argument("generate_dataset: num_classes must be >= 1");

    std::mt19937_64 rng(seed);
    Dataset ds;
    ds.num_classes = num_classes;
    ds.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LabeledPoint p;
        p.x = next_unit(rng);
        p.y = next_unit(rng);
        p.label = num_classes == 1
                      ? 0
                      : int(rng() % std::uint64_t(num_classes));
        ds.points.push_back(p);
    }
    return ds;
}

WorldBounds compute_bounds(const Dataset& ds, double margin_fraction) {
    if (ds.points.empty())
        throw std::invalid_argument("compute_bounds: empty dataset");
    if (margin_fraction < 0.0)
        throw std::invalid_argument("compute_bounds: negative margin");

    WorldBounds b{ds.points[0].x, ds.points[0].x, ds.points[0].y,
                  ds.points[0].y};
    for (const auto& p : ds.points) {
        b.xmin = std::min(b.xmin, p.x);
        b.xmax = std::max(b.xmax, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.ymax = std::max(b.ymax, p.y);
    }

    // A flat axis widens to extent 1.0 centered on the value so the
    // world -> pixel map never divides by zero.
    if (b.xmax == b.xmin) {
        b.xmin -= 0.5;
        b.xmax += 0.5;
    }
    if (b.ymax == b.ymin) {
        b.ymin -= 0.5;
        b.ymax += 0.5;
    }

    const double mx = margin_fraction * b.width();
    const double my = margin_fraction * b.height();
    b.xmin -= mx;
    b.xmax += mx;
    b.ymin -= my;
    b.ymax += my;
    return b;
}

Dataset load_dataset(const std::filesystem::path& path, int num_classes) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y,label")
        fail_line(path, line_no, "expected header 'x,y,label', got '" + line + "'");

    Dataset ds;
    int max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos
                                                : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            fail_line(path, line_no, "expected 3 comma-separated fields");

        const std::string_view sv(line);
        LabeledPoint p;
        p.x = parse_coord(sv.substr(0, c1), path, line_no, "x");
        p.y = parse_coord(sv.substr(c1 + 1, c2 - c1 - 1), path, line_no, "y");

        const std::string_view lf = sv.substr(c2 + 1);
        auto [ptr, ec] =
            std::from_chars(lf.data(), lf.data() + lf.size(), p.label);
        if (ec != std::errc() || ptr != lf.data() + lf.size())
            fail_line(path, line_no,
                      "malformed label '" + std::string(lf) + "'");
        if (p.label < 0) fail_line(path, line_no, "negative label");
        if (num_classes > 0 && p.label >= num_classes)
            fail_line(path, line_no,
                      "label " + std::to_string(p.label) +
                          " out of range for " + std::to_string(num_classes) +
                          " classes");
        max_label = std::max(max_label, p.label);
        ds.points.push_back(p);
    }

    ds.num_classes = num_classes > 0 ? num_classes : max_label + 1;
    return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep \n endings
    if (!out) throw std::runtime_error("cannot open " + path.string());

    out << "x,y,label\n";
    char buf[64];
    for (const auto& p : ds.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", p.x, p.y, p.label);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace aknn
