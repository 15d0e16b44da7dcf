#include "odstain/config.hpp"

#include <cmath>
#include <fstream>

namespace odstain {

void PipelineConfig::validate(bool allow_low_alpha) const {
    if (!(alpha > 1.0) && !allow_low_alpha) {
        fail(Errc::InvalidParameter, "alpha must exceed 1 (pass --force to relax)");
    }
    if (!(alpha > 0.0)) fail(Errc::InvalidParameter, "alpha must be positive");
    if (beta < 0.0 || beta >= 1.0) fail(Errc::InvalidParameter, "beta must lie in [0, 1)");
    if (n_h < 1) fail(Errc::InvalidParameter, "n_h must be at least 1");
    if (n_b < 1) fail(Errc::InvalidParameter, "n_b must be at least 1");
    const int s = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n_b))));
    if (s * s != n_b) fail(Errc::InvalidParameter, "n_b must be a perfect square");
    if (mask_tau < 0.0) fail(Errc::InvalidParameter, "mask_tau must be non-negative");
    if (pos_tau < 0.0) fail(Errc::InvalidParameter, "pos_tau must be non-negative");
    if (!(i0 > 0.0)) fail(Errc::InvalidParameter, "i0 must be positive");
    if (weights.lambda_m < 0.0 || weights.lambda_c < 0.0 || weights.lambda_s < 0.0 ||
        weights.lambda_g < 0.0) {
        fail(Errc::InvalidParameter, "loss weights must be non-negative");
    }
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json matrix = nlohmann::json::array();
    for (const auto& row : stains.rows) {
        for (double v : row) matrix.push_back(v);
    }
    return {
        {"alpha", alpha},
        {"beta", beta},
        {"n_h", n_h},
        {"n_b", n_b},
        {"mask_tau", mask_tau},
        {"pos_tau", pos_tau},
        {"i0", i0},
        {"lambda_m", weights.lambda_m},
        {"lambda_c", weights.lambda_c},
        {"lambda_s", weights.lambda_s},
        {"lambda_g", weights.lambda_g},
        {"stain_matrix", matrix},
    };
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    if (!j.is_object()) fail(Errc::InvalidParameter, "config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "alpha") {
                cfg.alpha = value.get<double>();
            } else if (key == "beta") {
                cfg.beta = value.get<double>();
            } else if (key == "n_h") {
                cfg.n_h = value.get<int>();
            } else if (key == "n_b") {
                cfg.n_b = value.get<int>();
            } else if (key == "mask_tau") {
                cfg.mask_tau = value.get<double>();
            } else if (key == "pos_tau") {
                cfg.pos_tau = value.get<double>();
            } else if (key == "i0") {
                cfg.i0 = value.get<double>();
            } else if (key == "lambda_m") {
                cfg.weights.lambda_m = value.get<double>();
            } else if (key == "lambda_c") {
                cfg.weights.lambda_c = value.get<double>();
            } else if (key == "lambda_s") {
                cfg.weights.lambda_s = value.get<double>();
            } else if (key == "lambda_g") {
                cfg.weights.lambda_g = value.get<double>();
            } else if (key == "stain_matrix") {
                const auto nums = value.get<std::vector<double>>();
                if (nums.size() != 9) {
                    fail(Errc::InvalidParameter, "stain_matrix must hold 9 numbers (row-major)");
                }
                std::array<double, 9> rows{};
                std::copy(nums.begin(), nums.end(), rows.begin());
                cfg.stains = StainMatrix::from_rows(rows);
            } else {
                fail(Errc::InvalidParameter, "unknown config key '" + key + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            fail(Errc::InvalidParameter, "config key '" + key + "': " + e.what());
        }
    }
    return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || ec) {
        fail(Errc::MissingFile, "no such config file: " + path.string());
    }
    std::ifstream in(path);
    if (!in) fail(Errc::MissingFile, "cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::InvalidParameter, "config parse error in " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace odstain
