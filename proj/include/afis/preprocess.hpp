#pragma once

#include <array>
#include <vector>

#include "afis/raster.hpp"

namespace afis {

struct PreprocessConfig {
    int threshold = 128;
    int ridge_thickness = 3;
    int shape_radius = 1;

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;
    bool operator==(const PreprocessConfig&) const = default;
};

/// Black iff the pixel's floor-mean intensity is below threshold.
BinaryImage filter(const RasterImage& img, int threshold);

/// Per-row ridge width normalization: every horizontal black run longer than
/// ridge_thickness shrinks to ridge_thickness cells centered on the run's
/// midpoint.
BinaryImage enhance(const BinaryImage& b, int ridge_thickness);

/// Zhang-Suen thinning to a fixpoint. Deletions flagged by each parallel
/// sub-iteration are re-checked in raster order against the partially
/// updated map, which keeps 8-connected components intact (plain Zhang-Suen
/// erases 2x2 blocks).
BinaryImage line(const BinaryImage& b);

/// Dilation by the disk dx^2 + dy^2 <= radius^2.
BinaryImage shape(const BinaryImage& b, int radius);

enum Stage : std::size_t { kFiltered = 0, kEnhanced = 1, kLined = 2, kShaped = 3 };
using StageImages = std::array<BinaryImage, 4>;

StageImages run_pipeline(const RasterImage& img, const PreprocessConfig& cfg);

/// Entry 0 is the fraction of original pixels with mean intensity below 128;
/// entry k >= 1 is the black fraction of stage k - 1.
std::vector<double> intensity_profile(const std::vector<BinaryImage>& stages, const RasterImage& original);

}  // namespace afis
