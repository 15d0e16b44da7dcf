#include <doctest.h>

#include <cmath>

#include "odstain/stainsep.hpp"
#include "test_util.hpp"

using namespace odstain;

namespace {

// Forward synthesis od = V^T a, independent of the inverse under test.
OdImage od_from_amounts(const StainMatrix& m, double a_h, double a_d, double a_r = 0.0) {
    OdImage od(1, 1);
    for (int c = 0; c < 3; ++c) {
        od.at(0, 0, c) =
            a_h * m.rows[kHematoxylin][c] + a_d * m.rows[kDab][c] + a_r * m.rows[kResidual][c];
    }
    return od;
}

ConcentrationMap conc_of(double a_h, double a_d, double a_r = 0.0) {
    ConcentrationMap conc(1, 1);
    conc.at(0, 0, kHematoxylin) = a_h;
    conc.at(0, 0, kDab) = a_d;
    conc.at(0, 0, kResidual) = a_r;
    return conc;
}

}  // namespace

TEST_CASE("stain matrix rows are unit length and the set is invertible") {
    const StainMatrix m = StainMatrix::hdab();
    for (const auto& row : m.rows) {
        const double n = std::sqrt(row[0] * row[0] + row[1] * row[1] + row[2] * row[2]);
        CHECK(n == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_NOTHROW(m.inverse_transposed());

    // duplicate rows cannot be inverted
    try {
        StainMatrix::from_rows({1, 0, 0, 1, 0, 0, 0, 0, 1});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingularMatrix);
    }
    try {
        StainMatrix::from_rows({0, 0, 0, 0, 1, 0, 0, 0, 1});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingularMatrix);
    }

    // user-supplied rows are normalized
    const StainMatrix scaled = StainMatrix::from_rows({2, 0, 0, 0, 3, 0, 0, 0, 4});
    CHECK(scaled.rows[0][0] == doctest::Approx(1.0));
    CHECK(scaled.rows[1][1] == doctest::Approx(1.0));
    CHECK(scaled.rows[2][2] == doctest::Approx(1.0));
}

TEST_CASE("od_transform follows the Lambert-Beer form") {
    RgbImage img(1, 3);
    img.at(0, 0, 0) = 255;
    img.at(0, 1, 0) = 26;
    img.at(0, 2, 0) = 0;
    const OdImage od = od_transform(img, 255.0);
    CHECK(od.at(0, 0, 0) == 0.0);
    CHECK(od.at(0, 1, 0) == doctest::Approx(0.991566832463137).epsilon(1e-12));
    // intensity 0 is clamped to 1 before the log
    CHECK(od.at(0, 2, 0) == doctest::Approx(2.406540180433955).epsilon(1e-12));

    try {
        od_transform(img, 0.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidParameter);
    }
}

TEST_CASE("od_transform is monotone decreasing in intensity") {
    RgbImage img(1, 256);
    for (int x = 0; x < 256; ++x) img.at(0, x, 1) = static_cast<std::uint8_t>(x);
    const OdImage od = od_transform(img, 255.0);
    for (int x = 2; x < 256; ++x) {  // intensities 0 and 1 coincide due to the clamp
        CHECK(od.at(0, x, 1) < od.at(0, x - 1, 1));
    }
    CHECK(od.at(0, 0, 1) == od.at(0, 1, 1));
}

TEST_CASE("separate inverts forward synthesis") {
    const StainMatrix m = StainMatrix::hdab();

    SUBCASE("zero od") {
        const ConcentrationMap a = separate(OdImage(1, 1), m);
        CHECK(a.at(0, 0, 0) == 0.0);
        CHECK(a.at(0, 0, 1) == 0.0);
        CHECK(a.at(0, 0, 2) == 0.0);
    }

    SUBCASE("unit DAB vector") {
        const ConcentrationMap a = separate(od_from_amounts(m, 0.0, 1.0), m);
        CHECK(a.at(0, 0, kHematoxylin) == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(a.at(0, 0, kDab) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(a.at(0, 0, kResidual) == doctest::Approx(0.0).epsilon(1e-6));
    }

    SUBCASE("mixed amounts") {
        const ConcentrationMap a = separate(od_from_amounts(m, 0.5, 0.3), m);
        CHECK(a.at(0, 0, kHematoxylin) == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(a.at(0, 0, kDab) == doctest::Approx(0.3).epsilon(1e-6));
        CHECK(a.at(0, 0, kResidual) == doctest::Approx(0.0).epsilon(1e-6));
    }
}

TEST_CASE("separate is linear on the non-negative regime") {
    const StainMatrix m = StainMatrix::hdab();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> amt(0.0, 1.2);
    for (int trial = 0; trial < 50; ++trial) {
        const double h1 = amt(rng), d1 = amt(rng), h2 = amt(rng), d2 = amt(rng);
        const ConcentrationMap ax = separate(od_from_amounts(m, h1, d1), m);
        const ConcentrationMap ay = separate(od_from_amounts(m, h2, d2), m);
        const ConcentrationMap axy = separate(od_from_amounts(m, h1 + h2, d1 + d2), m);
        for (int s = 0; s < 3; ++s) {
            CHECK(axy.at(0, 0, s) ==
                  doctest::Approx(ax.at(0, 0, s) + ay.at(0, 0, s)).epsilon(1e-9));
        }
    }
}

TEST_CASE("reconstruct_stain quantizes the Lambert-Beer inverse") {
    const StainMatrix m = StainMatrix::hdab();

    SUBCASE("zero stain gives white") {
        const RgbImage img = reconstruct_stain(conc_of(0, 0), kDab, m, 255.0);
        CHECK(img.at(0, 0, 0) == 255);
        CHECK(img.at(0, 0, 1) == 255);
        CHECK(img.at(0, 0, 2) == 255);
    }

    SUBCASE("unit DAB amount") {
        const RgbImage img = reconstruct_stain(conc_of(0, 1), kDab, m, 255.0);
        CHECK(img.at(0, 0, 0) == 138);
        CHECK(img.at(0, 0, 1) == 69);
        CHECK(img.at(0, 0, 2) == 43);
    }

    SUBCASE("invalid stain index") {
        try {
            reconstruct_stain(conc_of(0, 1), 3, m, 255.0);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InvalidParameter);
        }
    }
}

// Quantization bounds below were measured with a float64 reference sweep of
// the same formulas; 8-bit rounding at low transmitted intensity dominates.
TEST_CASE("single-stain reconstruct/separate round trip stays within the measured quantization bounds") {
    const StainMatrix m = StainMatrix::hdab();

    auto roundtrip_err = [&](int stain, double amount) {
        ConcentrationMap conc = conc_of(stain == kHematoxylin ? amount : 0.0,
                                        stain == kDab ? amount : 0.0);
        const RgbImage img = reconstruct_stain(conc, stain, m, 255.0);
        const ConcentrationMap rec = separate(od_transform(img, 255.0), m);
        double err = 0.0;
        for (int s = 0; s < 3; ++s) {
            err = std::max(err, std::abs(rec.at(0, 0, s) - conc.at(0, 0, s)));
        }
        return err;
    };

    double worst_h = 0.0, worst_d = 0.0, worst_d15 = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double a = 2.0 * i / 20.0;
        worst_h = std::max(worst_h, roundtrip_err(kHematoxylin, a));
        worst_d = std::max(worst_d, roundtrip_err(kDab, a));
        if (a <= 1.5) worst_d15 = std::max(worst_d15, roundtrip_err(kDab, a));
    }
    CHECK(worst_h <= 0.015);   // measured 0.0124 over [0, 2]
    CHECK(worst_d <= 0.036);   // measured 0.0342 over [0, 2]
    CHECK(worst_d15 <= 0.02);  // measured 0.0172 over [0, 1.5]
}

TEST_CASE("combined-amount round trip over [0,1]^2 keeps errors below 0.02") {
    const StainMatrix m = StainMatrix::hdab();
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
        for (int j = 0; j <= 10; ++j) {
            ConcentrationMap conc = conc_of(i / 10.0, j / 10.0);
            const RgbImage img = render_stains(conc, m, 255.0);
            const ConcentrationMap rec = separate(od_transform(img, 255.0), m);
            worst = std::max(worst, std::abs(rec.at(0, 0, kHematoxylin) - i / 10.0));
            worst = std::max(worst, std::abs(rec.at(0, 0, kDab) - j / 10.0));
        }
    }
    CHECK(worst <= 0.02);  // measured 0.0147
}

TEST_CASE("dab_image keeps DAB and suppresses hematoxylin") {
    const StainMatrix m = StainMatrix::hdab();

    SUBCASE("white stays white") {
        const RgbImage out = dab_image(RgbImage::filled(4, 4, 255, 255, 255), m, 255.0);
        for (std::uint8_t v : out.data) CHECK(v == 255);
    }

    SUBCASE("pure DAB reproduces itself within +-2 per channel") {
        for (int i = 0; i <= 20; ++i) {
            ConcentrationMap conc = conc_of(0.0, 2.0 * i / 20.0);
            const RgbImage img = reconstruct_stain(conc, kDab, m, 255.0);
            const RgbImage out = dab_image(img, m, 255.0);
            for (std::size_t k = 0; k < img.data.size(); ++k) {
                CHECK(std::abs(int(out.data[k]) - int(img.data[k])) <= 2);
            }
        }
    }

    SUBCASE("pure hematoxylin maps near white") {
        // +-2 holds through amount 1.5; the measured bound over [0, 2] is 4.
        for (int i = 0; i <= 20; ++i) {
            const double a = 2.0 * i / 20.0;
            const RgbImage img = reconstruct_stain(conc_of(a, 0.0), kHematoxylin, m, 255.0);
            const RgbImage out = dab_image(img, m, 255.0);
            for (std::uint8_t v : out.data) {
                CHECK(255 - int(v) <= (a <= 1.5 ? 2 : 4));
            }
        }
    }
}
