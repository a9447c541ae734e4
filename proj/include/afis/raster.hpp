#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace afis {

struct Pixel {
    std::uint8_t r = 0, g = 0, b = 0;

    bool operator==(const Pixel&) const = default;

    /// floor((r + g + b) / 3)
    int mean() const noexcept { return (int(r) + int(g) + int(b)) / 3; }
};

inline constexpr Pixel kBlack{0, 0, 0};
inline constexpr Pixel kWhite{255, 255, 255};

/// Row-major RGB raster. Pixel (x, y) lives at index y * width + x.
class RasterImage {
public:
    RasterImage(int width, int height, Pixel fill = kWhite);
    RasterImage(int width, int height, std::vector<Pixel> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }
    const Pixel& at(int x, int y) const noexcept { return pixels_[index(x, y)]; }
    Pixel& at(int x, int y) noexcept { return pixels_[index(x, y)]; }
    const std::vector<Pixel>& pixels() const noexcept { return pixels_; }

    bool operator==(const RasterImage&) const = default;

private:
    int width_;
    int height_;
    std::vector<Pixel> pixels_;
};

/// Two-valued ridge map; black cells are ridge.
class BinaryImage {
public:
    BinaryImage(int width, int height);
    BinaryImage(int width, int height, std::vector<std::uint8_t> cells);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool black(int x, int y) const noexcept { return cells_[index(x, y)] != 0; }
    /// Out-of-range coordinates read as white.
    bool black_or_white(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_ && black(x, y);
    }
    void set(int x, int y, bool is_black) noexcept { cells_[index(x, y)] = is_black ? 1 : 0; }
    std::size_t black_count() const noexcept;
    const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }

    bool operator==(const BinaryImage&) const = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> cells_;
};

enum class ImageFormat { P2FromLuma, P3 };

inline constexpr int kMaxImageSide = 65535;

/// Reads P2, P3, P5 or P6 with maxval 255. Grayscale expands to r = g = b.
/// ASCII samples must each be followed by whitespace, so a file cut right
/// after a digit reads as truncated rather than as a smaller sample.
RasterImage load_image(std::string_view bytes);

std::string save_image(const RasterImage& img, ImageFormat format);

RasterImage binary_to_raster(const BinaryImage& b);

RasterImage read_image_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

}  // namespace afis
