#pragma once

#include <cstdint>
#include <vector>

#include "odstain/error.hpp"

namespace odstain {

// 8-bit interleaved RGB raster, row-major. Holds the H&E input, the real
// IHC label and the generated IHC image alike.
struct RgbImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;  // height*width*3, RGB interleaved

    RgbImage() = default;
    RgbImage(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0) {}

    static RgbImage filled(int h, int w, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    std::uint8_t& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    std::uint8_t at(int y, int x, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
};

// Real-valued 2-D plane (grayscale, OD or FOD carrier).
struct ScalarField {
    int height = 0;
    int width = 0;
    std::vector<double> values;  // height*width, row-major

    ScalarField() = default;
    ScalarField(int h, int w, double fill = 0.0)
        : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Channel-last real tensor (feature maps, probability maps, similarity maps).
struct Tensor3 {
    int height = 0;
    int width = 0;
    int depth = 0;
    std::vector<double> values;  // (y*width + x)*depth + c

    Tensor3() = default;
    Tensor3(int h, int w, int d, double fill = 0.0)
        : height(h), width(w), depth(d), values(static_cast<std::size_t>(h) * w * d, fill) {}

    double& at(int y, int x, int c) {
        return values[(static_cast<std::size_t>(y) * width + x) * depth + c];
    }
    double at(int y, int x, int c) const {
        return values[(static_cast<std::size_t>(y) * width + x) * depth + c];
    }
};

// BT.601 luma, kept real-valued (no re-quantization): 0.299 R + 0.587 G + 0.114 B.
ScalarField rgb_to_grayscale(const RgbImage& img);

}  // namespace odstain
