#pragma once

#include <optional>
#include <span>
#include <string>

#include "odstain/config.hpp"
#include "odstain/fod.hpp"

namespace odstain {

struct IodResult {
    double iod = 0.0;
    double miod = 0.0;
    long positive_count = 0;
};

// Integrated optical density over the positive set {od > pos_tau} of the
// plain (alpha = 1) grayscale OD of the DAB-reconstructed image, plus its
// mean over the positive area (0 when the set is empty).
IodResult iod_miod(const RgbImage& img, const StainMatrix& m, double i0, double pos_tau);

// Sample Pearson correlation coefficient. Throws LengthMismatch on unequal
// lengths and UndefinedStatistic for fewer than two samples or zero variance.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

// 10*log10(255^2 / MSE) over all pixels and channels, saturated at 100 dB
// (identical images report exactly 100.0).
double psnr(const RgbImage& a, const RgbImage& b);

// Mean local SSIM of the BT.601 grayscale planes: 11x11 Gaussian window
// sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255, symmetric boundary handling.
// Requires min(H, W) >= 11.
double ssim(const RgbImage& a, const RgbImage& b);

struct PairMetrics {
    std::string file;
    IodResult fake;
    IodResult real;
    double psnr_db = 0.0;
    double ssim_val = 0.0;
};

// Diffs follow the fake - real convention (closer to 0 is better).
struct DatasetReport {
    int n_pairs = 0;
    double mean_miod_diff = 0.0;
    double mean_iod_diff = 0.0;
    std::optional<double> pearson;  // unset when either IOD sequence is constant
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    std::vector<PairMetrics> pairs;
};

DatasetReport aggregate_pairs(std::vector<PairMetrics> pairs);

// Pairs identically named *.png files from the two directories in
// lexicographic order; any unmatched name is a PairingMismatch. Per-image
// failures are annotated with the filename. Results are independent of the
// worker count.
DatasetReport evaluate_dataset(const std::filesystem::path& fake_dir,
                               const std::filesystem::path& real_dir, const PipelineConfig& cfg,
                               int jobs = 1);

struct CurveRow {
    int index = 0;  // 1-based sample index
    double cum_iod_fake = 0.0;
    double cum_iod_real = 0.0;
};

std::vector<CurveRow> cumulative_iod_curve(const DatasetReport& report);

// lambda_m * mlpa + lambda_c * ctpc + lambda_s * (1 - ssim).
double pathology_loss_terms(double mlpa_total_value, double ctpc, double ssim_value,
                            const LossWeights& w);
double pathology_loss(const FodMap& o_f, const FodMap& o_r, double ctpc, double ssim_value,
                      const PipelineConfig& cfg);

// Report serialization. JSON uses sorted keys; the raw IOD values carry a
// display-scale annotation (divide by the annotated factor to reproduce
// table-style columns).
nlohmann::json report_to_json(const DatasetReport& report, const nlohmann::json& config_echo);
std::string report_pairs_csv(const DatasetReport& report);
std::string curve_csv(const std::vector<CurveRow>& rows);

}  // namespace odstain
