#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "afis/minutiae.hpp"

namespace afis {

/// PaperFaithful reproduces the scanline rule exactly, including the
/// collapsed one- and two-row cases. Canonical is the plain row-major index gap.
enum class DistanceMode : std::uint8_t { PaperFaithful, Canonical };

std::string_view mode_name(DistanceMode mode) noexcept;  // "paper" | "canonical"
DistanceMode parse_mode(std::string_view name);          // throws InvalidArgument

std::int64_t raster_distance(const Minutia& a, const Minutia& b, int width, DistanceMode mode);

struct Correlation {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    std::int64_t distance = 0;

    bool operator==(const Correlation&) const = default;
};

/// Compact stored form of one fingerprint: the clipped minutiae and every
/// pairwise distance among them, (i, j) with i < j in lexicographic order.
struct Template {
    int width = 0;
    int height = 0;
    Region region;
    DistanceMode mode = DistanceMode::PaperFaithful;
    std::vector<Minutia> minutiae;
    std::vector<Correlation> correlations;

    std::size_t size() const noexcept { return minutiae.size(); }
    bool operator==(const Template&) const = default;
};

/// Throws PointOutOfBounds for points outside the image or region and
/// DuplicatePoint for repeated points.
Template build_template(std::vector<Minutia> points, int width, int height, const Region& region,
                        DistanceMode mode);

/// Text encoding:
///   AFIS-TEMPLATE 1
///   mode paper|canonical
///   image <width> <height>
///   region <x0> <y0> <x1> <y1>
///   count <N>
///   p <x> <y> <e|b>          N lines, canonical order
///   d <i> <j> <distance>     N(N-1)/2 lines
///   crc32 <8 hex digits>     CRC-32 of every preceding byte
std::string serialize(const Template& t);

/// Inverse of serialize. Tokens may be separated by any run of spaces or
/// tabs. Every stored distance is recomputed and the checksum is verified
/// over the canonical re-encoding.
Template parse(std::string_view bytes);

}  // namespace afis
