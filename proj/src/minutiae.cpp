#include "afis/minutiae.hpp"

#include <algorithm>
#include <cmath>

#include "afis/error.hpp"

namespace afis {

char kind_code(MinutiaKind kind) noexcept { return kind == MinutiaKind::Ending ? 'e' : 'b'; }

std::vector<Minutia> extract(const BinaryImage& thinned) {
    // clockwise ring from north; the ring closes on itself
    constexpr int kDx[9] = {0, 1, 1, 1, 0, -1, -1, -1, 0};
    constexpr int kDy[9] = {-1, -1, 0, 1, 1, 1, 0, -1, -1};
    std::vector<Minutia> out;
    for (int y = 1; y + 1 < thinned.height(); ++y) {
        for (int x = 1; x + 1 < thinned.width(); ++x) {
            if (!thinned.black(x, y))
                continue;
            int changes = 0;
            bool prev = thinned.black(x + kDx[0], y + kDy[0]);
            for (int k = 1; k < 9; ++k) {
                bool cur = thinned.black(x + kDx[k], y + kDy[k]);
                changes += prev != cur;
                prev = cur;
            }
            const int cn = changes / 2;
            if (cn == 1)
                out.push_back({x, y, MinutiaKind::Ending});
            else if (cn == 3)
                out.push_back({x, y, MinutiaKind::Bifurcation});
        }
    }
    // raster scan already yields (y, x) order
    return out;
}

std::vector<Minutia> clip_region(const std::vector<Minutia>& points, const Region& r) {
    std::vector<Minutia> out;
    std::copy_if(points.begin(), points.end(), std::back_inserter(out),
                 [&](const Minutia& m) { return r.contains(m.x, m.y); });
    return out;
}

Region default_region(int width, int height, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw Error(Errc::InvalidArgument, "region fraction must be in (0,1]");
    if (width < 1 || height < 1)
        throw Error(Errc::InvalidArgument, "image dimensions must be positive");
    auto side = [&](int extent) {
        int s = static_cast<int>(std::floor(fraction * extent));
        return std::clamp(s, 1, extent);
    };
    const int sw = side(width), sh = side(height);
    const int x0 = (width - sw) / 2, y0 = (height - sh) / 2;
    return Region{x0, y0, x0 + sw - 1, y0 + sh - 1};
}

}  // namespace afis
