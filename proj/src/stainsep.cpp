#include "odstain/stainsep.hpp"

#include <algorithm>
#include <cmath>

namespace odstain {

namespace {

std::array<double, 3> normalized(const std::array<double, 3>& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n < 1e-12) fail(Errc::SingularMatrix, "zero-length stain vector");
    return {v[0] / n, v[1] / n, v[2] / n};
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

StainMatrix StainMatrix::hdab() {
    static const StainMatrix m = [] {
        StainMatrix s;
        s.rows[kHematoxylin] = normalized({0.650, 0.704, 0.286});
        s.rows[kDab] = normalized({0.268, 0.570, 0.776});
        s.rows[kResidual] = normalized(cross(s.rows[kHematoxylin], s.rows[kDab]));
        return s;
    }();
    return m;
}

StainMatrix StainMatrix::from_rows(const std::array<double, 9>& row_major) {
    StainMatrix s;
    for (int r = 0; r < 3; ++r) {
        s.rows[r] = normalized({row_major[r * 3], row_major[r * 3 + 1], row_major[r * 3 + 2]});
    }
    s.inverse_transposed();  // rejects a singular set
    return s;
}

std::array<std::array<double, 3>, 3> StainMatrix::inverse_transposed() const {
    // M = transpose(V): columns are the stain vectors.
    double m[3][3];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m[r][c] = rows[c][r];
    }
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (std::abs(det) < 1e-8) {
        fail(Errc::SingularMatrix, "stain matrix is not invertible");
    }
    std::array<std::array<double, 3>, 3> inv{};
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return inv;
}

OdImage od_transform(const RgbImage& img, double i0) {
    if (!(i0 > 0.0)) fail(Errc::InvalidParameter, "i0 must be positive");
    OdImage out(img.height, img.width);
    const double log_i0 = std::log10(i0);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double intensity = std::max<double>(img.data[i], 1.0);
        out.od[i] = std::max(0.0, log_i0 - std::log10(intensity));
    }
    return out;
}

ConcentrationMap separate(const OdImage& od, const StainMatrix& m) {
    const auto inv = m.inverse_transposed();
    ConcentrationMap out(od.height, od.width);
    const std::size_t n = static_cast<std::size_t>(od.height) * od.width;
    for (std::size_t i = 0; i < n; ++i) {
        const double* v = &od.od[i * 3];
        for (int s = 0; s < 3; ++s) {
            const double a = inv[s][0] * v[0] + inv[s][1] * v[1] + inv[s][2] * v[2];
            out.amounts[i * 3 + s] = std::max(0.0, a);
        }
    }
    return out;
}

namespace {

std::uint8_t quantize(double i0, double exponent) {
    const double intensity = std::lround(i0 * std::pow(10.0, -exponent));
    return static_cast<std::uint8_t>(std::clamp(intensity, 0.0, 255.0));
}

}  // namespace

RgbImage reconstruct_stain(const ConcentrationMap& conc, int stain_index, const StainMatrix& m,
                           double i0) {
    if (stain_index < 0 || stain_index > 2) {
        fail(Errc::InvalidParameter, "stain index must be 0, 1 or 2");
    }
    if (!(i0 > 0.0)) fail(Errc::InvalidParameter, "i0 must be positive");
    RgbImage out(conc.height, conc.width);
    const auto& v = m.rows[stain_index];
    const std::size_t n = conc.amounts.size() / 3;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = conc.amounts[i * 3 + stain_index];
        for (int c = 0; c < 3; ++c) out.data[i * 3 + c] = quantize(i0, a * v[c]);
    }
    return out;
}

RgbImage render_stains(const ConcentrationMap& conc, const StainMatrix& m, double i0) {
    if (!(i0 > 0.0)) fail(Errc::InvalidParameter, "i0 must be positive");
    RgbImage out(conc.height, conc.width);
    const std::size_t n = conc.amounts.size() / 3;
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) {
            double exponent = 0.0;
            for (int s = 0; s < 3; ++s) exponent += conc.amounts[i * 3 + s] * m.rows[s][c];
            out.data[i * 3 + c] = quantize(i0, exponent);
        }
    }
    return out;
}

RgbImage dab_image(const RgbImage& img, const StainMatrix& m, double i0) {
    return reconstruct_stain(separate(od_transform(img, i0), m), kDab, m, i0);
}

}  // namespace odstain
