#include "afis/template.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>

#include "afis/error.hpp"

namespace afis {

std::string_view mode_name(DistanceMode mode) noexcept {
    return mode == DistanceMode::PaperFaithful ? "paper" : "canonical";
}

DistanceMode parse_mode(std::string_view name) {
    if (name == "paper")
        return DistanceMode::PaperFaithful;
    if (name == "canonical")
        return DistanceMode::Canonical;
    throw Error(Errc::InvalidArgument, "unknown distance mode '" + std::string(name) + "'");
}

std::int64_t raster_distance(const Minutia& a, const Minutia& b, int width, DistanceMode mode) {
    if (width < 1 || a.x < 0 || b.x < 0 || a.x >= width || b.x >= width)
        throw Error(Errc::InvalidArgument, "x coordinate outside [0, width)");
    const std::int64_t w = width;
    if (mode == DistanceMode::Canonical) {
        const std::int64_t la = std::int64_t(a.y) * w + a.x;
        const std::int64_t lb = std::int64_t(b.y) * w + b.x;
        return la > lb ? la - lb : lb - la;
    }
    if (a.y == b.y)
        return a.x > b.x ? a.x - b.x : b.x - a.x;
    const Minutia& upper = a.y < b.y ? a : b;
    const Minutia& lower = a.y < b.y ? b : a;
    const std::int64_t rows = std::int64_t(lower.y) - upper.y;
    if (rows == 1)
        return 0;
    if (rows == 2)
        return 2;
    // remainder of the upper row, the full rows in between (less one), then
    // the lower row up to its point
    return (rows - 2) * w + (w - upper.x) + lower.x;
}

namespace {

void check_region(const Region& r, int width, int height, Errc code) {
    if (width < 1 || height < 1 || width > 65535 || height > 65535)
        throw Error(code, "image dimensions out of range");
    if (r.x0 < 0 || r.y0 < 0 || r.x0 > r.x1 || r.y0 > r.y1 || r.x1 >= width || r.y1 >= height)
        throw Error(code, "region does not lie inside the image");
}

std::vector<Correlation> correlate(const std::vector<Minutia>& pts, int width, DistanceMode mode) {
    std::vector<Correlation> out;
    const std::size_t n = pts.size();
    out.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                           raster_distance(pts[i], pts[j], width, mode)});
    return out;
}

std::string encode_body(const Template& t) {
    std::string out;
    out.reserve(64 + t.minutiae.size() * 16 + t.correlations.size() * 20);
    out += "AFIS-TEMPLATE 1\n";
    out += "mode ";
    out += mode_name(t.mode);
    out += '\n';
    out += "image " + std::to_string(t.width) + ' ' + std::to_string(t.height) + '\n';
    out += "region " + std::to_string(t.region.x0) + ' ' + std::to_string(t.region.y0) + ' ' +
           std::to_string(t.region.x1) + ' ' + std::to_string(t.region.y1) + '\n';
    out += "count " + std::to_string(t.minutiae.size()) + '\n';
    for (const Minutia& m : t.minutiae) {
        out += "p " + std::to_string(m.x) + ' ' + std::to_string(m.y) + ' ';
        out += kind_code(m.kind);
        out += '\n';
    }
    for (const Correlation& c : t.correlations)
        out += "d " + std::to_string(c.i) + ' ' + std::to_string(c.j) + ' ' + std::to_string(c.distance) + '\n';
    return out;
}

std::uint32_t crc_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

std::string crc_line(std::uint32_t crc) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "crc32 %08x\n", crc);
    return buf;
}

using Tokens = std::vector<std::string_view>;

Tokens split_tokens(std::string_view line) {
    Tokens out;
    std::size_t i = 0;
    auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (i < line.size()) {
        while (i < line.size() && space(line[i]))
            ++i;
        std::size_t start = i;
        while (i < line.size() && !space(line[i]))
            ++i;
        if (i > start)
            out.push_back(line.substr(start, i - start));
    }
    return out;
}

// Canonical decimal only: digits, no sign, no leading zeros.
std::int64_t number(std::string_view tok, std::int64_t max_value, std::string_view what) {
    const bool digits = !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
    std::int64_t v = 0;
    if (digits && (tok.size() == 1 || tok[0] != '0')) {
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec == std::errc() && ptr == tok.data() + tok.size() && v <= max_value)
            return v;
    }
    throw Error(Errc::BadField, "bad " + std::string(what) + " value '" + std::string(tok) + "'");
}

const Tokens& expect(const std::vector<Tokens>& lines, std::size_t index, std::string_view key, std::size_t arity) {
    if (index >= lines.size())
        throw Error(Errc::BadField, "missing '" + std::string(key) + "' line");
    const Tokens& t = lines[index];
    if (t.size() != arity + 1 || t[0] != key)
        throw Error(Errc::BadField, "expected '" + std::string(key) + "' line");
    return t;
}

}  // namespace

Template build_template(std::vector<Minutia> points, int width, int height, const Region& region,
                        DistanceMode mode) {
    check_region(region, width, height, Errc::InvalidArgument);
    for (const Minutia& m : points) {
        if (m.x < 0 || m.y < 0 || m.x >= width || m.y >= height || !region.contains(m.x, m.y))
            throw Error(Errc::PointOutOfBounds,
                        "point (" + std::to_string(m.x) + "," + std::to_string(m.y) + ") outside region");
    }
    std::sort(points.begin(), points.end(), canonical_less);
    if (std::adjacent_find(points.begin(), points.end()) != points.end())
        throw Error(Errc::DuplicatePoint, "repeated minutia");
    Template t;
    t.width = width;
    t.height = height;
    t.region = region;
    t.mode = mode;
    t.correlations = correlate(points, width, mode);
    t.minutiae = std::move(points);
    return t;
}

std::string serialize(const Template& t) {
    std::string body = encode_body(t);
    body += crc_line(crc_of(body));
    return body;
}

Template parse(std::string_view bytes) {
    std::vector<Tokens> lines;
    {
        std::size_t start = 0;
        while (start < bytes.size()) {
            std::size_t nl = bytes.find('\n', start);
            if (nl == std::string_view::npos)
                nl = bytes.size();
            lines.push_back(split_tokens(bytes.substr(start, nl - start)));
            if (lines.back().empty())
                throw Error(lines.size() == 1 ? Errc::BadMagic : Errc::BadField, "blank line");
            start = nl + 1;
        }
    }
    if (lines.empty() || lines[0].size() != 2 || lines[0][0] != "AFIS-TEMPLATE" || lines[0][1] != "1")
        throw Error(Errc::BadMagic, "not an AFIS-TEMPLATE 1 file");

    Template t;
    {
        const Tokens& m = expect(lines, 1, "mode", 1);
        if (m[1] == "paper")
            t.mode = DistanceMode::PaperFaithful;
        else if (m[1] == "canonical")
            t.mode = DistanceMode::Canonical;
        else
            throw Error(Errc::BadField, "unknown mode '" + std::string(m[1]) + "'");
    }
    const Tokens& img = expect(lines, 2, "image", 2);
    t.width = static_cast<int>(number(img[1], 65535, "width"));
    t.height = static_cast<int>(number(img[2], 65535, "height"));
    const Tokens& reg = expect(lines, 3, "region", 4);
    t.region = Region{static_cast<int>(number(reg[1], 65535, "region")), static_cast<int>(number(reg[2], 65535, "region")),
                      static_cast<int>(number(reg[3], 65535, "region")), static_cast<int>(number(reg[4], 65535, "region"))};
    check_region(t.region, t.width, t.height, Errc::BadField);
    const std::int64_t declared = number(expect(lines, 4, "count", 1)[1], std::numeric_limits<std::uint32_t>::max(), "count");

    std::size_t row = 5;
    while (row < lines.size() && lines[row][0] == "p") {
        const Tokens& p = expect(lines, row, "p", 3);
        Minutia m;
        m.x = static_cast<int>(number(p[1], 65535, "x"));
        m.y = static_cast<int>(number(p[2], 65535, "y"));
        if (p[3] == "e")
            m.kind = MinutiaKind::Ending;
        else if (p[3] == "b")
            m.kind = MinutiaKind::Bifurcation;
        else
            throw Error(Errc::BadField, "unknown minutia kind '" + std::string(p[3]) + "'");
        if (m.x >= t.width || m.y >= t.height || !t.region.contains(m.x, m.y))
            throw Error(Errc::BadField, "point outside region");
        t.minutiae.push_back(m);
        ++row;
    }
    if (static_cast<std::int64_t>(t.minutiae.size()) != declared)
        throw Error(Errc::CountMismatch, "count " + std::to_string(declared) + " but " +
                                             std::to_string(t.minutiae.size()) + " point lines");
    for (std::size_t k = 1; k < t.minutiae.size(); ++k) {
        if (t.minutiae[k] == t.minutiae[k - 1])
            throw Error(Errc::DuplicatePoint, "repeated point line");
        if (!canonical_less(t.minutiae[k - 1], t.minutiae[k]))
            throw Error(Errc::BadField, "point lines out of canonical order");
    }

    t.correlations = correlate(t.minutiae, t.width, t.mode);
    for (const Correlation& c : t.correlations) {
        const Tokens& d = expect(lines, row++, "d", 3);
        if (number(d[1], 1u << 31, "index") != c.i || number(d[2], 1u << 31, "index") != c.j)
            throw Error(Errc::BadField, "distance lines out of order");
        const std::int64_t stored = number(d[3], std::numeric_limits<std::int64_t>::max() / 2, "distance");
        if (stored != c.distance)
            throw Error(Errc::CorrelationMismatch, "d " + std::to_string(c.i) + " " + std::to_string(c.j) + " stored " +
                                                       std::to_string(stored) + ", recomputed " +
                                                       std::to_string(c.distance));
    }

    const Tokens& crc = expect(lines, row++, "crc32", 1);
    if (row != lines.size())
        throw Error(Errc::BadField, "trailing lines after checksum");
    const bool hex = crc[1].size() == 8 && std::all_of(crc[1].begin(), crc[1].end(), [](char c) {
                         return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
                     });
    if (!hex)
        throw Error(Errc::BadField, "checksum must be 8 lowercase hex digits");
    std::uint32_t stored = 0;
    std::from_chars(crc[1].data(), crc[1].data() + crc[1].size(), stored, 16);
    if (stored != crc_of(encode_body(t)))
        throw Error(Errc::ChecksumMismatch, "template checksum does not match its contents");
    return t;
}

}  // namespace afis
