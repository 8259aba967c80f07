#ifndef PSKC_IMAGE_HPP
#define PSKC_IMAGE_HPP

#include <png.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "pskc/common.hpp"
#include "pskc/engine.hpp"

namespace pskc {

struct Rgb8 {
    std::uint8_t r, g, b;
    bool operator==(const Rgb8&) const = default;
};

static_assert(sizeof(Rgb8) == 3, "libpng rows are read as packed RGB");

struct RgbImage {
    std::size_t width = 0, height = 0;
    std::vector<Rgb8> pixels;  // row-major
};

// Row-major CIELAB pixels: L* in [0,100], a*/b* roughly [-128,127].
struct ImageTensor {
    std::size_t width = 0, height = 0;
    std::vector<std::array<double, 3>> pixels;

    Dataset as_dataset() const {
        Dataset ds;
        ds.d = 3;
        ds.n = pixels.size();
        ds.coords.reserve(3 * pixels.size());
        for (const auto& p : pixels)
            ds.coords.insert(ds.coords.end(), p.begin(), p.end());
        return ds;
    }
};

// ---- sRGB <-> CIELAB (D65 reference white) ----

namespace lab {

inline double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double c) {
    return c <= 0.0031308 ? 12.92 * c
                          : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;  // D65

inline double f(double u) {
    constexpr double delta3 = 216.0 / 24389.0;
    return u > delta3 ? std::cbrt(u)
                      : (24389.0 / 27.0 * u + 16.0) / 116.0;
}

inline double f_inv(double v) {
    constexpr double delta = 6.0 / 29.0;
    return v > delta ? v * v * v : 3.0 * delta * delta * (v - 4.0 / 29.0);
}

}  // namespace lab

inline std::array<double, 3> rgb_to_cielab(Rgb8 rgb) {
    double r = lab::srgb_to_linear(rgb.r / 255.0);
    double g = lab::srgb_to_linear(rgb.g / 255.0);
    double b = lab::srgb_to_linear(rgb.b / 255.0);
    double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    double fx = lab::f(x / lab::kXn), fy = lab::f(y / lab::kYn), fz = lab::f(z / lab::kZn);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline Rgb8 cielab_to_rgb(const std::array<double, 3>& lab_v) {
    double fy = (lab_v[0] + 16.0) / 116.0;
    double fx = fy + lab_v[1] / 500.0;
    double fz = fy - lab_v[2] / 200.0;
    double x = lab::kXn * lab::f_inv(fx);
    double y = lab::kYn * lab::f_inv(fy);
    double z = lab::kZn * lab::f_inv(fz);
    double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
    double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
    double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
    auto to8 = [](double c) {
        double s = lab::linear_to_srgb(c);
        double v = std::round(255.0 * std::min(1.0, std::max(0.0, s)));
        return static_cast<std::uint8_t>(v);
    };
    return {to8(r), to8(g), to8(b)};
}

// ---- 8-bit PNG I/O via libpng ----

inline RgbImage read_png(const std::string& path) {
    std::unique_ptr<std::FILE, decltype(&std::fclose)> fp(
        std::fopen(path.c_str(), "rb"), &std::fclose);
    if (!fp) throw io_error("cannot open: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) throw io_error("libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("not a readable PNG: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);
    if (bit_depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("unsupported bit depth (need 8-bit): " + path);
    }
    // Normalize everything to 8-bit RGB.
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    RgbImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = reinterpret_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(y) * w);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

inline void write_png(const std::string& path, const RgbImage& img) {
    std::unique_ptr<std::FILE, decltype(&std::fclose)> fp(
        std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw io_error("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) throw io_error("libpng init failed");
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(img.height);
    for (std::size_t y = 0; y < img.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(
            const_cast<Rgb8*>(img.pixels.data() + y * img.width));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline ImageTensor load_image_cielab(const std::string& path) {
    RgbImage rgb = read_png(path);
    ImageTensor out;
    out.width = rgb.width;
    out.height = rgb.height;
    out.pixels.resize(rgb.pixels.size());
    for (std::size_t i = 0; i < rgb.pixels.size(); ++i)
        out.pixels[i] = rgb_to_cielab(rgb.pixels[i]);
    return out;
}

// Each cluster painted with its mean CIELAB color; noise magenta.
inline void write_segmented_image(const std::string& path, const ImageTensor& image,
                                  const ClusteringResult& result) {
    if (result.labels.size() != image.pixels.size())
        throw invalid_input("segmented image: label count does not match pixel count");
    std::vector<std::array<double, 3>> sums(static_cast<std::size_t>(result.k),
                                            {0.0, 0.0, 0.0});
    std::vector<std::size_t> counts(static_cast<std::size_t>(result.k), 0);
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
        int label = result.labels[i];
        if (label < 0) continue;
        auto idx = static_cast<std::size_t>(label);
        for (int c = 0; c < 3; ++c) sums[idx][c] += image.pixels[i][c];
        ++counts[idx];
    }
    std::vector<Rgb8> palette(static_cast<std::size_t>(result.k));
    for (std::size_t j = 0; j < palette.size(); ++j) {
        std::array<double, 3> mean{};
        if (counts[j] > 0)
            for (int c = 0; c < 3; ++c)
                mean[c] = sums[j][c] / static_cast<double>(counts[j]);
        palette[j] = cielab_to_rgb(mean);
    }
    constexpr Rgb8 kNoiseColor{255, 0, 255};  // magenta
    RgbImage out;
    out.width = image.width;
    out.height = image.height;
    out.pixels.resize(image.pixels.size());
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        int label = result.labels[i];
        out.pixels[i] = label < 0 ? kNoiseColor : palette[static_cast<std::size_t>(label)];
    }
    write_png(path, out);
}

// Optional per-cluster binary masks (white = member).
inline void write_cluster_masks(const std::string& prefix, const ImageTensor& image,
                                const ClusteringResult& result) {
    for (int j = 0; j < result.k; ++j) {
        RgbImage mask;
        mask.width = image.width;
        mask.height = image.height;
        mask.pixels.assign(image.pixels.size(), Rgb8{0, 0, 0});
        for (std::size_t i = 0; i < result.labels.size(); ++i)
            if (result.labels[i] == j) mask.pixels[i] = Rgb8{255, 255, 255};
        write_png(prefix + "_cluster" + std::to_string(j) + ".png", mask);
    }
}

}  // namespace pskc

#endif
