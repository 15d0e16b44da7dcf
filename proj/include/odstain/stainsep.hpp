#pragma once

#include <array>

#include "odstain/image.hpp"

namespace odstain {

inline constexpr int kHematoxylin = 0;
inline constexpr int kDab = 1;
inline constexpr int kResidual = 2;

// Rows are unit absorption vectors, one per stain: hematoxylin, DAB,
// residual. Per-pixel OD decomposes as od = V^T a with V's rows the stain
// vectors and a the stain amounts.
struct StainMatrix {
    std::array<std::array<double, 3>, 3> rows{};

    // Standard Ruifrok-Johnston H-DAB set: hematoxylin (0.650, 0.704, 0.286),
    // DAB (0.268, 0.570, 0.776), residual = normalized cross product.
    static StainMatrix hdab();

    // Row-major 9 numbers; rows are normalized to unit length. Throws
    // SingularMatrix for zero rows or a non-invertible matrix.
    static StainMatrix from_rows(const std::array<double, 9>& row_major);

    // inverse(transpose(V)); throws SingularMatrix.
    std::array<std::array<double, 3>, 3> inverse_transposed() const;
};

// Per-pixel per-channel optical densities, clamped at 0.
struct OdImage {
    int height = 0;
    int width = 0;
    std::vector<double> od;  // (y*width + x)*3 + channel

    OdImage() = default;
    OdImage(int h, int w) : height(h), width(w), od(static_cast<std::size_t>(h) * w * 3, 0.0) {}
    double& at(int y, int x, int c) { return od[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int y, int x, int c) const { return od[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
};

// Per-pixel stain amounts (hematoxylin, DAB, residual), clamped at 0.
struct ConcentrationMap {
    int height = 0;
    int width = 0;
    std::vector<double> amounts;  // (y*width + x)*3 + stain

    ConcentrationMap() = default;
    ConcentrationMap(int h, int w)
        : height(h), width(w), amounts(static_cast<std::size_t>(h) * w * 3, 0.0) {}
    double& at(int y, int x, int s) { return amounts[(static_cast<std::size_t>(y) * width + x) * 3 + s]; }
    double at(int y, int x, int s) const { return amounts[(static_cast<std::size_t>(y) * width + x) * 3 + s]; }
};

// od_C = -log10(max(I_C, 1) / i0), negatives clamped to 0. Intensity is
// clamped at 1 before the log so OD stays bounded by log10(i0).
OdImage od_transform(const RgbImage& img, double i0);

// a = inverse(transpose(V)) * od per pixel; negative amounts clamped to 0.
ConcentrationMap separate(const OdImage& od, const StainMatrix& m);

// I_C = round(i0 * 10^(-a_s * v_sC)) clamped to [0, 255], single stain.
RgbImage reconstruct_stain(const ConcentrationMap& conc, int stain_index, const StainMatrix& m,
                           double i0);

// Same reconstruction with all three stains contributing to the exponent.
RgbImage render_stains(const ConcentrationMap& conc, const StainMatrix& m, double i0);

// od_transform -> separate -> reconstruct_stain(DAB).
RgbImage dab_image(const RgbImage& img, const StainMatrix& m, double i0);

}  // namespace odstain
