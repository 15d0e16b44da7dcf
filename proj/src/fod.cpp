#include "odstain/fod.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace odstain {

int ClassMaskMap::active_class(int y, int x) const {
    for (int c = 0; c < classes; ++c) {
        if (at(y, x, c)) return c;
    }
    return -1;
}

FodMap fod_from_gray(const ScalarField& gray, double alpha, double i0, bool allow_low_alpha) {
    if (!(alpha > 1.0) && !allow_low_alpha) {
        fail(Errc::InvalidParameter, "focusing exponent alpha must exceed 1 (override to relax)");
    }
    if (!(alpha > 0.0)) fail(Errc::InvalidParameter, "alpha must be positive");
    if (!(i0 > 0.0)) fail(Errc::InvalidParameter, "i0 must be positive");

    FodMap out(gray.height, gray.width, alpha);
    const double log_i0 = std::log10(i0);
    for (std::size_t i = 0; i < gray.values.size(); ++i) {
        const double od = std::max(0.0, log_i0 - std::log10(std::max(gray.values[i], 1.0)));
        out.values[i] = std::pow(od, alpha);
    }
    return out;
}

FodMap fod_map(const RgbImage& dab_img, double alpha, double i0, bool allow_low_alpha) {
    return fod_from_gray(rgb_to_grayscale(dab_img), alpha, i0, allow_low_alpha);
}

ClassMaskMap pseudo_mask(const FodMap& o, double tau) {
    if (tau < 0.0) fail(Errc::InvalidParameter, "mask threshold must be non-negative");
    ClassMaskMap m(o.height, o.width, 2);
    for (int y = 0; y < o.height; ++y) {
        for (int x = 0; x < o.width; ++x) {
            m.at(y, x, o.at(y, x) > tau ? kTumorClass : kNonTumorClass) = 1;
        }
    }
    return m;
}

ClassMaskMap downsample_mask(const ClassMaskMap& m, int h2, int w2) {
    if (h2 < 1 || h2 > m.height || w2 < 1 || w2 > m.width) {
        fail(Errc::InvalidParameter, "target size must satisfy 1 <= target <= source");
    }
    ClassMaskMap out(h2, w2, m.classes);
    const double sy = static_cast<double>(m.height) / h2;
    const double sx = static_cast<double>(m.width) / w2;
    for (int y = 0; y < h2; ++y) {
        const int src_y = std::min(m.height - 1, static_cast<int>(std::floor((y + 0.5) * sy)));
        for (int x = 0; x < w2; ++x) {
            const int src_x = std::min(m.width - 1, static_cast<int>(std::floor((x + 0.5) * sx)));
            for (int c = 0; c < m.classes; ++c) out.at(y, x, c) = m.at(src_y, src_x, c);
        }
    }
    return out;
}

RgbImage fod_heatmap(const FodMap& o) {
    RgbImage img(o.height, o.width);
    for (std::size_t i = 0; i < o.values.size(); ++i) {
        const double t = std::clamp(o.values[i] / std::numbers::e, 0.0, 1.0);
        const auto v = static_cast<std::uint8_t>(std::lround(t * 255.0));
        img.data[i * 3 + 0] = v;
        img.data[i * 3 + 1] = v;
        img.data[i * 3 + 2] = v;
    }
    return img;
}

Tensor3 mask_to_tensor(const ClassMaskMap& m) {
    Tensor3 t(m.height, m.width, m.classes);
    for (std::size_t i = 0; i < m.onehot.size(); ++i) t.values[i] = m.onehot[i];
    return t;
}

ClassMaskMap mask_from_tensor(const Tensor3& t) {
    ClassMaskMap m(t.height, t.width, t.depth);
    for (int y = 0; y < t.height; ++y) {
        for (int x = 0; x < t.width; ++x) {
            int ones = 0;
            for (int c = 0; c < t.depth; ++c) {
                const double v = t.at(y, x, c);
                if (std::abs(v - 1.0) < 1e-6) {
                    m.at(y, x, c) = 1;
                    ++ones;
                } else if (std::abs(v) > 1e-6) {
                    fail(Errc::InvalidTensor, "mask tensor is not one-hot");
                }
            }
            if (ones != 1) fail(Errc::InvalidTensor, "mask tensor is not one-hot");
        }
    }
    return m;
}

ClassMaskMap mask_from_flags(const ScalarField& flags) {
    ClassMaskMap m(flags.height, flags.width, 2);
    for (int y = 0; y < flags.height; ++y) {
        for (int x = 0; x < flags.width; ++x) {
            const double v = flags.at(y, x);
            if (std::abs(v - 1.0) < 1e-6) {
                m.at(y, x, kTumorClass) = 1;
            } else if (std::abs(v) < 1e-6) {
                m.at(y, x, kNonTumorClass) = 1;
            } else {
                fail(Errc::InvalidTensor, "mask plane values must be 0 or 1");
            }
        }
    }
    return m;
}

}  // namespace odstain
