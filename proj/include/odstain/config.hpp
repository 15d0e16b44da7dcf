#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "odstain/stainsep.hpp"

namespace odstain {

struct LossWeights {
    double lambda_m = 1.0;
    double lambda_c = 2.5;
    double lambda_s = 0.05;
    double lambda_g = 10.0;
};

// Every knob of the pipeline with its published default where one exists.
struct PipelineConfig {
    double alpha = 1.8;    // FOD focusing exponent
    double beta = 0.2;     // average-expression tolerance fraction
    int n_h = 20;          // histogram bin count
    int n_b = 16;          // block count (perfect square)
    double mask_tau = 0.5; // pseudo-mask FOD threshold
    double pos_tau = 0.15; // IOD positivity OD threshold
    double i0 = 255.0;     // incident intensity
    LossWeights weights;
    StainMatrix stains = StainMatrix::hdab();

    // Throws InvalidParameter on any violated bound. allow_low_alpha relaxes
    // the alpha > 1 requirement to alpha > 0 (CLI --force).
    void validate(bool allow_low_alpha = false) const;

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig from_file(const std::filesystem::path& path);
};

}  // namespace odstain
