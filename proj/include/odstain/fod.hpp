#pragma once

#include "odstain/image.hpp"

namespace odstain {

inline constexpr int kNonTumorClass = 0;
inline constexpr int kTumorClass = 1;

// Focal optical density map: O = (-log10(max(gray,1)/i0))^alpha. The
// exponent is recorded for provenance.
struct FodMap {
    int height = 0;
    int width = 0;
    double alpha = 0.0;
    std::vector<double> values;  // row-major

    FodMap() = default;
    FodMap(int h, int w, double a, double fill = 0.0)
        : height(h), width(w), alpha(a), values(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// One-hot class assignment per pixel. Channel 0 = non-tumor, channel 1 = tumor.
struct ClassMaskMap {
    int height = 0;
    int width = 0;
    int classes = 2;
    std::vector<std::uint8_t> onehot;  // (y*width + x)*classes + c, exactly one 1 per pixel

    ClassMaskMap() = default;
    ClassMaskMap(int h, int w, int c)
        : height(h), width(w), classes(c), onehot(static_cast<std::size_t>(h) * w * c, 0) {}

    std::uint8_t& at(int y, int x, int c) {
        return onehot[(static_cast<std::size_t>(y) * width + x) * classes + c];
    }
    std::uint8_t at(int y, int x, int c) const {
        return onehot[(static_cast<std::size_t>(y) * width + x) * classes + c];
    }
    int active_class(int y, int x) const;
};

// alpha > 1 is required unless allow_low_alpha overrides it (the override
// still requires alpha > 0). i0 must be positive.
FodMap fod_from_gray(const ScalarField& gray, double alpha, double i0,
                     bool allow_low_alpha = false);

// BT.601 grayscale of the DAB-reconstructed image, then the focal map.
FodMap fod_map(const RgbImage& dab_img, double alpha, double i0, bool allow_low_alpha = false);

// Tumor where O > tau (strict), non-tumor otherwise.
ClassMaskMap pseudo_mask(const FodMap& o, double tau);

// Nearest-neighbor sampling at pixel centers: src = floor((dst + 0.5) * scale).
// Preserves the one-hot property. Requires 1 <= h2 <= H and 1 <= w2 <= W.
ClassMaskMap downsample_mask(const ClassMaskMap& m, int h2, int w2);

// 8-bit visualization: linear scaling with the value e mapped to 255,
// larger values clamped.
RgbImage fod_heatmap(const FodMap& o);

// One-hot float tensor view of a mask and its validating inverse. The
// tensor route accepts H x W x C one-hot or a 2-D 0/1 tumor-flag plane.
Tensor3 mask_to_tensor(const ClassMaskMap& m);
ClassMaskMap mask_from_tensor(const Tensor3& t);
ClassMaskMap mask_from_flags(const ScalarField& flags);

}  // namespace odstain
