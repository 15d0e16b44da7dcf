#pragma once

#include "odstain/config.hpp"
#include "odstain/fod.hpp"

namespace odstain {

struct MlpaBreakdown {
    double avg_term = 0.0;
    double histo_term = 0.0;
    double block_term = 0.0;
    double total = 0.0;

    nlohmann::json to_json() const;
};

// |mean(O^F) - mean(O^R)| gated by the tolerance band beta * mean(O^R):
// differences inside the band contribute nothing.
double mlpa_avg(const FodMap& o_f, const FodMap& o_r, double beta);

// The FOD range (0, e] split into n_h bins; each bin accumulates the raw
// FOD values of its pixels (bin chosen on min(O, e), exact zeros fall in
// no bin). Returns the mean absolute per-bin accumulation difference.
double mlpa_histo(const FodMap& o_f, const FodMap& o_r, int n_h);

// sqrt(n_b) x sqrt(n_b) grid of floor-balanced blocks; mean absolute
// difference of per-block mean FOD.
double mlpa_block(const FodMap& o_f, const FodMap& o_r, int n_b);

MlpaBreakdown mlpa_total(const FodMap& o_f, const FodMap& o_r, const PipelineConfig& cfg);

}  // namespace odstain
