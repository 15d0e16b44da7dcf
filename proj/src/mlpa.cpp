#include "odstain/mlpa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace odstain {

namespace {

void require_same_shape(const FodMap& a, const FodMap& b) {
    if (a.height != b.height || a.width != b.width) {
        fail(Errc::ShapeMismatch, "FOD maps differ in size: " + std::to_string(a.height) + "x" +
                                      std::to_string(a.width) + " vs " + std::to_string(b.height) +
                                      "x" + std::to_string(b.width));
    }
    if (a.height < 1 || a.width < 1) fail(Errc::ShapeMismatch, "empty FOD map");
}

double mean_of(const FodMap& o) {
    double sum = 0.0;
    for (double v : o.values) sum += v;
    return sum / static_cast<double>(o.values.size());
}

int block_side(int n_b) {
    if (n_b < 1) fail(Errc::InvalidParameter, "block count must be at least 1");
    const int s = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n_b))));
    if (s * s != n_b) fail(Errc::InvalidParameter, "block count must be a perfect square");
    return s;
}

}  // namespace

double mlpa_avg(const FodMap& o_f, const FodMap& o_r, double beta) {
    require_same_shape(o_f, o_r);
    if (beta < 0.0 || beta >= 1.0) fail(Errc::InvalidParameter, "beta must lie in [0, 1)");
    const double avg_f = mean_of(o_f);
    const double avg_r = mean_of(o_r);
    const double diff = std::abs(avg_f - avg_r);
    return diff >= beta * avg_r ? diff : 0.0;
}

double mlpa_histo(const FodMap& o_f, const FodMap& o_r, int n_h) {
    require_same_shape(o_f, o_r);
    if (n_h < 1) fail(Errc::InvalidParameter, "histogram bin count must be at least 1");

    constexpr double e = std::numbers::e;
    auto accumulate = [&](const FodMap& o) {
        std::vector<double> bins(static_cast<std::size_t>(n_h), 0.0);
        for (double v : o.values) {
            if (v <= 0.0) continue;  // exact zeros satisfy no bin's strict lower bound
            int idx = static_cast<int>(std::ceil(std::min(v, e) * n_h / e));
            idx = std::clamp(idx, 1, n_h);
            bins[static_cast<std::size_t>(idx - 1)] += v;  // raw value, even above e
        }
        return bins;
    };

    const std::vector<double> f = accumulate(o_f);
    const std::vector<double> r = accumulate(o_r);
    double sum = 0.0;
    for (int i = 0; i < n_h; ++i) sum += std::abs(f[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)]);
    return sum / n_h;
}

double mlpa_block(const FodMap& o_f, const FodMap& o_r, int n_b) {
    require_same_shape(o_f, o_r);
    const int s = block_side(n_b);
    if (o_f.height < s || o_f.width < s) {
        fail(Errc::ImageTooSmall, "need at least " + std::to_string(s) + "x" + std::to_string(s) +
                                      " pixels for " + std::to_string(n_b) + " blocks");
    }

    auto block_mean = [&](const FodMap& o, int r0, int r1, int c0, int c1) {
        double sum = 0.0;
        for (int y = r0; y < r1; ++y) {
            for (int x = c0; x < c1; ++x) sum += o.at(y, x);
        }
        return sum / (static_cast<double>(r1 - r0) * (c1 - c0));
    };

    double sum = 0.0;
    for (int br = 0; br < s; ++br) {
        const int r0 = br * o_f.height / s;
        const int r1 = (br + 1) * o_f.height / s;
        for (int bc = 0; bc < s; ++bc) {
            const int c0 = bc * o_f.width / s;
            const int c1 = (bc + 1) * o_f.width / s;
            sum += std::abs(block_mean(o_f, r0, r1, c0, c1) - block_mean(o_r, r0, r1, c0, c1));
        }
    }
    return sum / n_b;
}

MlpaBreakdown mlpa_total(const FodMap& o_f, const FodMap& o_r, const PipelineConfig& cfg) {
    MlpaBreakdown b;
    b.avg_term = mlpa_avg(o_f, o_r, cfg.beta);
    b.histo_term = mlpa_histo(o_f, o_r, cfg.n_h);
    b.block_term = mlpa_block(o_f, o_r, cfg.n_b);
    b.total = b.avg_term + b.histo_term + b.block_term;
    return b;
}

nlohmann::json MlpaBreakdown::to_json() const {
    return {{"avg", avg_term}, {"histo", histo_term}, {"block", block_term}, {"total", total}};
}

}  // namespace odstain
