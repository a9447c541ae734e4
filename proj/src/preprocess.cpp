#include "afis/preprocess.hpp"

#include <algorithm>
#include <utility>

#include "afis/error.hpp"

namespace afis {

void PreprocessConfig::validate() const {
    if (threshold < 0 || threshold > 255)
        throw Error(Errc::InvalidArgument, "threshold must be in [0,255]");
    if (ridge_thickness < 1 || ridge_thickness % 2 == 0)
        throw Error(Errc::InvalidArgument, "ridge thickness must be odd and >= 1");
    if (shape_radius < 0)
        throw Error(Errc::InvalidArgument, "shape radius must be >= 0");
}

BinaryImage filter(const RasterImage& img, int threshold) {
    if (threshold < 0 || threshold > 255)
        throw Error(Errc::InvalidArgument, "threshold must be in [0,255]");
    BinaryImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.set(x, y, img.at(x, y).mean() < threshold);
    return out;
}

BinaryImage enhance(const BinaryImage& b, int ridge_thickness) {
    if (ridge_thickness < 1 || ridge_thickness % 2 == 0)
        throw Error(Errc::InvalidArgument, "ridge thickness must be odd and >= 1");
    const int half = ridge_thickness / 2;
    BinaryImage out(b.width(), b.height());
    for (int y = 0; y < b.height(); ++y) {
        int x = 0;
        while (x < b.width()) {
            if (!b.black(x, y)) {
                ++x;
                continue;
            }
            const int start = x;
            while (x < b.width() && b.black(x, y))
                ++x;
            const int end = x - 1;
            int lo = start, hi = end;
            if (end - start + 1 > ridge_thickness) {
                const int mid = (start + end) / 2;
                lo = std::max(mid - half, 0);
                hi = std::min(mid + half, b.width() - 1);
            }
            for (int i = lo; i <= hi; ++i)
                out.set(i, y, true);
        }
    }
    return out;
}

namespace {

// Neighbours P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr int kDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

bool deletable(const BinaryImage& img, int x, int y, bool first_pass) {
    int p[8];
    int count = 0;
    for (int k = 0; k < 8; ++k) {
        p[k] = img.black_or_white(x + kDx[k], y + kDy[k]) ? 1 : 0;
        count += p[k];
    }
    if (count < 2 || count > 6)
        return false;
    int transitions = 0;
    for (int k = 0; k < 8; ++k)
        if (p[k] == 0 && p[(k + 1) % 8] == 1)
            ++transitions;
    if (transitions != 1)
        return false;
    const int n = p[0], e = p[2], s = p[4], w = p[6];
    if (first_pass)
        return n * e * s == 0 && e * s * w == 0;
    return n * e * w == 0 && n * s * w == 0;
}

}  // namespace

BinaryImage line(const BinaryImage& b) {
    BinaryImage img = b;
    std::vector<std::pair<int, int>> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (bool first_pass : {true, false}) {
            marked.clear();
            for (int y = 0; y < img.height(); ++y)
                for (int x = 0; x < img.width(); ++x)
                    if (img.black(x, y) && deletable(img, x, y, first_pass))
                        marked.emplace_back(x, y);
            for (auto [x, y] : marked) {
                if (deletable(img, x, y, first_pass)) {
                    img.set(x, y, false);
                    changed = true;
                }
            }
        }
    }
    return img;
}

BinaryImage shape(const BinaryImage& b, int radius) {
    if (radius < 0)
        throw Error(Errc::InvalidArgument, "shape radius must be >= 0");
    if (radius == 0)
        return b;
    std::vector<std::pair<int, int>> disk;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius)
                disk.emplace_back(dx, dy);
    BinaryImage out(b.width(), b.height());
    for (int y = 0; y < b.height(); ++y)
        for (int x = 0; x < b.width(); ++x) {
            if (!b.black(x, y))
                continue;
            for (auto [dx, dy] : disk) {
                const int nx = x + dx, ny = y + dy;
                if (nx >= 0 && ny >= 0 && nx < b.width() && ny < b.height())
                    out.set(nx, ny, true);
            }
        }
    return out;
}

StageImages run_pipeline(const RasterImage& img, const PreprocessConfig& cfg) {
    cfg.validate();
    BinaryImage filtered = filter(img, cfg.threshold);
    BinaryImage enhanced = enhance(filtered, cfg.ridge_thickness);
    BinaryImage lined = line(enhanced);
    BinaryImage shaped = shape(lined, cfg.shape_radius);
    return {std::move(filtered), std::move(enhanced), std::move(lined), std::move(shaped)};
}

std::vector<double> intensity_profile(const std::vector<BinaryImage>& stages, const RasterImage& original) {
    const double area = double(original.width()) * double(original.height());
    std::vector<double> out;
    out.reserve(stages.size() + 1);
    std::size_t dark = 0;
    for (const Pixel& p : original.pixels())
        if (p.mean() < 128)
            ++dark;
    out.push_back(double(dark) / area);
    for (const BinaryImage& s : stages) {
        if (s.width() != original.width() || s.height() != original.height())
            throw Error(Errc::DimensionMismatch, "stage dimensions differ from the original image");
        out.push_back(double(s.black_count()) / area);
    }
    return out;
}

}  // namespace afis
