#include "afis/raster.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "afis/error.hpp"

namespace afis {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1 || width > kMaxImageSide || height > kMaxImageSide)
        throw Error(Errc::InvalidArgument, "image dimensions out of range");
}

bool is_space(char c) noexcept { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

// Netpbm token reader. Running out of bytes mid-token is truncation; a token
// must be closed by whitespace.
class TokenReader {
public:
    explicit TokenReader(std::string_view bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            char c = bytes_[pos_];
            if (is_space(c)) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    // Returns the token and consumes the single whitespace after it.
    std::string_view token(Errc on_bad, bool allow_comments) {
        if (allow_comments)
            skip_space_and_comments();
        else
            while (pos_ < bytes_.size() && is_space(bytes_[pos_]))
                ++pos_;
        std::size_t start = pos_;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) {
            if (allow_comments && bytes_[pos_] == '#')
                throw Error(on_bad, "comment inside token");
            ++pos_;
        }
        if (pos_ == bytes_.size())
            throw Error(Errc::TruncatedData, "unexpected end of data");
        std::string_view tok = bytes_.substr(start, pos_ - start);
        ++pos_;
        return tok;
    }

    int number(Errc on_bad, bool allow_comments) {
        std::string_view tok = token(on_bad, allow_comments);
        int value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || value < 0)
            throw Error(on_bad, "expected a non-negative integer, got '" + std::string(tok) + "'");
        return value;
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

RasterImage::RasterImage(int width, int height, Pixel fill) : width_(width), height_(height) {
    check_dims(width, height);
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

RasterImage::RasterImage(int width, int height, std::vector<Pixel> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dims(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw Error(Errc::DimensionMismatch, "pixel count does not match width x height");
}

BinaryImage::BinaryImage(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
    check_dims(width, height);
    if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw Error(Errc::DimensionMismatch, "cell count does not match width x height");
    for (auto& c : cells_)
        c = c ? 1 : 0;
}

std::size_t BinaryImage::black_count() const noexcept {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

RasterImage load_image(std::string_view bytes) {
    if (bytes.size() < 2)
        throw Error(Errc::TruncatedData, "missing magic number");
    if (bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '3' && bytes[1] != '5' && bytes[1] != '6'))
        throw Error(Errc::UnsupportedFormat, "expected P2, P3, P5 or P6");
    const char kind = bytes[1];
    const bool color = kind == '3' || kind == '6';
    const bool binary = kind == '5' || kind == '6';

    if (bytes.size() == 2)
        throw Error(Errc::TruncatedData, "missing header after magic number");
    if (!is_space(bytes[2]))
        throw Error(Errc::UnsupportedFormat, "magic number not followed by whitespace");

    TokenReader in(bytes);
    in.token(Errc::UnsupportedFormat, false);
    const int width = in.number(Errc::MalformedHeader, true);
    const int height = in.number(Errc::MalformedHeader, true);
    const int maxval = in.number(Errc::MalformedHeader, true);
    if (width < 1 || height < 1 || width > kMaxImageSide || height > kMaxImageSide)
        throw Error(Errc::MalformedHeader, "image dimensions out of range");
    if (maxval != 255)
        throw Error(Errc::MalformedHeader, "maxval must be 255");

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const int channels = color ? 3 : 1;
    std::vector<Pixel> pixels(count);

    if (binary) {
        const std::size_t need = count * static_cast<std::size_t>(channels);
        const std::size_t start = in.pos();
        if (bytes.size() - start < need)
            throw Error(Errc::TruncatedData, "binary raster shorter than width x height x channels");
        const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + start);
        for (std::size_t i = 0; i < count; ++i) {
            if (color)
                pixels[i] = Pixel{data[3 * i], data[3 * i + 1], data[3 * i + 2]};
            else
                pixels[i] = Pixel{data[i], data[i], data[i]};
        }
    } else {
        auto sample = [&]() -> std::uint8_t {
            int v = in.number(Errc::InvalidSample, false);
            if (v > 255)
                throw Error(Errc::InvalidSample, "sample exceeds maxval");
            return static_cast<std::uint8_t>(v);
        };
        for (std::size_t i = 0; i < count; ++i) {
            if (color) {
                std::uint8_t r = sample();
                std::uint8_t g = sample();
                std::uint8_t b = sample();
                pixels[i] = Pixel{r, g, b};
            } else {
                std::uint8_t v = sample();
                pixels[i] = Pixel{v, v, v};
            }
        }
    }
    return RasterImage(width, height, std::move(pixels));
}

std::string save_image(const RasterImage& img, ImageFormat format) {
    std::string out;
    const bool color = format == ImageFormat::P3;
    out.reserve(static_cast<std::size_t>(img.width()) * img.height() * (color ? 12 : 4) + 32);
    out += color ? "P3\n" : "P2\n";
    out += std::to_string(img.width()) + ' ' + std::to_string(img.height()) + "\n255\n";
    char buf[4];
    auto put = [&](int v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.append(buf, ptr);
    };
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Pixel& p = img.at(x, y);
            if (x > 0)
                out += ' ';
            if (color) {
                put(p.r);
                out += ' ';
                put(p.g);
                out += ' ';
                put(p.b);
            } else {
                put(p.mean());
            }
        }
        out += '\n';
    }
    return out;
}

RasterImage binary_to_raster(const BinaryImage& b) {
    RasterImage img(b.width(), b.height(), kWhite);
    for (int y = 0; y < b.height(); ++y)
        for (int x = 0; x < b.width(); ++x)
            if (b.black(x, y))
                img.at(x, y) = kBlack;
    return img;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw Error(Errc::IoError, "read failed: " + path);
    return std::move(ss).str();
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Errc::IoError, "cannot create " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(Errc::IoError, "write failed: " + path);
}

RasterImage read_image_file(const std::string& path) { return load_image(read_file(path)); }

}  // namespace afis
