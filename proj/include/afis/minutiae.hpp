#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "afis/raster.hpp"

namespace afis {

enum class MinutiaKind : std::uint8_t { Ending = 0, Bifurcation = 1 };

struct Minutia {
    int x = 0;
    int y = 0;
    MinutiaKind kind = MinutiaKind::Ending;

    bool operator==(const Minutia&) const = default;
};

/// Canonical (y, x, kind) order.
inline bool canonical_less(const Minutia& a, const Minutia& b) noexcept {
    return std::tie(a.y, a.x, a.kind) < std::tie(b.y, b.x, b.kind);
}

char kind_code(MinutiaKind kind) noexcept;  // 'e' or 'b'

/// Inclusive pixel bounds.
struct Region {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    bool contains(int x, int y) const noexcept { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
    bool operator==(const Region&) const = default;
};

/// Crossing-number minutiae of a thinned map: CN 1 is an ending, CN 3 a
/// bifurcation. Border pixels never emit. Sorted canonically.
std::vector<Minutia> extract(const BinaryImage& thinned);

std::vector<Minutia> clip_region(const std::vector<Minutia>& points, const Region& r);

/// Centered floor(fraction * width) x floor(fraction * height) rectangle,
/// at least one cell on each side.
Region default_region(int width, int height, double fraction);

inline constexpr double kDefaultRegionFraction = 0.75;

}  // namespace afis
