#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "odstain/mlpa.hpp"
#include "test_util.hpp"

using namespace odstain;
using testutil::fod_of;

TEST_CASE("all terms vanish on identical maps") {
    const FodMap o = testutil::random_fod(8, 8, 7);
    PipelineConfig cfg;
    const MlpaBreakdown b = mlpa_total(o, o, cfg);
    CHECK(b.avg_term == 0.0);
    CHECK(b.histo_term == 0.0);
    CHECK(b.block_term == 0.0);
    CHECK(b.total == 0.0);
}

TEST_CASE("average term honors the tolerance band") {
    const FodMap r = fod_of(1, 1, {1.0});
    CHECK(mlpa_avg(fod_of(1, 1, {1.1}), r, 0.2) == 0.0);
    CHECK(mlpa_avg(fod_of(1, 1, {1.3}), r, 0.2) == doctest::Approx(0.3).epsilon(1e-12));

    // the band is scaled by the reference mean, so swapping the arguments
    // changes the verdict near the edge
    CHECK(mlpa_avg(fod_of(1, 1, {1.22}), r, 0.2) == doctest::Approx(0.22).epsilon(1e-12));
    CHECK(mlpa_avg(r, fod_of(1, 1, {1.22}), 0.2) == 0.0);  // threshold 0.244 does not fire

    // both orders fire at 1.25 (threshold exactly met when swapped)
    CHECK(mlpa_avg(fod_of(1, 1, {1.25}), r, 0.2) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(mlpa_avg(r, fod_of(1, 1, {1.25}), 0.2) == doctest::Approx(0.25).epsilon(1e-12));
    // and both orders stay silent at 1.19
    CHECK(mlpa_avg(fod_of(1, 1, {1.19}), r, 0.2) == 0.0);
    CHECK(mlpa_avg(r, fod_of(1, 1, {1.19}), 0.2) == 0.0);
}

TEST_CASE("histogram term on the 1-pixel witness") {
    // 1.0 falls in bin 8 of 20 over (0, e], 0.5 in bin 4
    CHECK(mlpa_histo(fod_of(1, 1, {0.5}), fod_of(1, 1, {1.0}), 20) ==
          doctest::Approx(0.075).epsilon(1e-12));
}

TEST_CASE("histogram accumulation is permutation invariant") {
    std::mt19937 rng(13);
    const FodMap o = testutil::random_fod(8, 8, 19);
    FodMap shuffled = o;
    std::shuffle(shuffled.values.begin(), shuffled.values.end(), rng);
    CHECK(std::abs(mlpa_histo(shuffled, o, 20)) <= 1e-9);
    CHECK(mlpa_avg(shuffled, o, 0.2) == 0.0);
}

TEST_CASE("histogram mass is conserved including values above e") {
    // sum over bins of the accumulated mass equals the sum of all positive values
    const FodMap o = testutil::random_fod(16, 16, 29, 0.0, 5.0);  // well above e
    const FodMap zero(16, 16, 1.8);
    // against an all-zero map every bin difference is the fake accumulation itself
    const double total = mlpa_histo(o, zero, 20) * 20.0;
    double expected = 0.0;
    for (double v : o.values) expected += v;
    CHECK(total == doctest::Approx(expected).epsilon(1e-12));

    // exact zeros contribute to no bin
    CHECK(mlpa_histo(zero, zero, 20) == 0.0);
}

TEST_CASE("block term separates what the histogram cannot") {
    // swap two unequal pixels across block boundaries: the value multiset is
    // unchanged (histogram blind) but block means move
    FodMap o_r = testutil::random_fod(8, 8, 31, 0.1, 2.5);
    FodMap o_f = o_r;
    std::swap(o_f.at(0, 0), o_f.at(7, 7));  // blocks (0,0) and (3,3) of the 4x4 grid
    REQUIRE(o_r.at(0, 0) != o_r.at(7, 7));

    CHECK(std::abs(mlpa_histo(o_f, o_r, 20)) <= 1e-9);
    CHECK(mlpa_block(o_f, o_r, 16) > 0.0);
}

TEST_CASE("block term on constant maps is the constant difference") {
    FodMap a(8, 8, 1.8, 0.7);
    FodMap b(8, 8, 1.8, 0.2);
    CHECK(mlpa_block(a, b, 16) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mlpa_block(a, b, 4) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("block partition preconditions") {
    const FodMap small = testutil::random_fod(2, 2, 37);
    try {
        mlpa_block(small, small, 16);  // needs 4x4
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ImageTooSmall);
    }
    try {
        mlpa_block(small, small, 3);  // not a perfect square
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidParameter);
    }
}

TEST_CASE("shape mismatches are rejected") {
    const FodMap a = testutil::random_fod(4, 4, 41);
    const FodMap b = testutil::random_fod(4, 5, 41);
    for (auto f : {+[](const FodMap& x, const FodMap& y) { return mlpa_avg(x, y, 0.2); },
                   +[](const FodMap& x, const FodMap& y) { return mlpa_histo(x, y, 20); },
                   +[](const FodMap& x, const FodMap& y) { return mlpa_block(x, y, 4); }}) {
        try {
            f(a, b);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::ShapeMismatch);
        }
    }
}

TEST_CASE("total is exactly the sum of the three terms") {
    PipelineConfig cfg;
    const FodMap a = testutil::random_fod(8, 8, 43);
    const FodMap b = testutil::random_fod(8, 8, 44);
    const MlpaBreakdown t = mlpa_total(a, b, cfg);
    CHECK(t.total == t.avg_term + t.histo_term + t.block_term);
    CHECK(t.avg_term >= 0.0);
    CHECK(t.histo_term >= 0.0);
    CHECK(t.block_term >= 0.0);
}

TEST_CASE("a pair with matching means and blocks reduces to the histogram term") {
    // means agree (1.0 each) and the single block mean agrees, but the bin
    // distribution differs: bins 4, 3 and 12 of 20 receive 0.5 / 0.4 / both.
    PipelineConfig cfg;
    cfg.n_b = 1;
    const FodMap o_r = fod_of(1, 2, {0.5, 1.5});
    const FodMap o_f = fod_of(1, 2, {0.4, 1.6});
    const MlpaBreakdown t = mlpa_total(o_f, o_r, cfg);
    CHECK(t.avg_term == 0.0);
    CHECK(t.block_term == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(t.histo_term == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(t.total == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("breakdown serializes to the documented keys") {
    MlpaBreakdown b{0.1, 0.2, 0.3, 0.6};
    const nlohmann::json j = b.to_json();
    CHECK(j["avg"] == 0.1);
    CHECK(j["histo"] == 0.2);
    CHECK(j["block"] == 0.3);
    CHECK(j["total"] == 0.6);
}
