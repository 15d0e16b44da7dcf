#include "odstain/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "odstain/png_io.hpp"
#include "odstain/mlpa.hpp"
#include "odstain/stainsep.hpp"

namespace odstain {

IodResult iod_miod(const RgbImage& img, const StainMatrix& m, double i0, double pos_tau) {
    if (pos_tau < 0.0) fail(Errc::InvalidParameter, "pos_tau must be non-negative");
    const ScalarField gray = rgb_to_grayscale(dab_image(img, m, i0));
    const double log_i0 = std::log10(i0);

    IodResult r;
    for (double g : gray.values) {
        const double od = std::max(0.0, log_i0 - std::log10(std::max(g, 1.0)));
        if (od > pos_tau) {
            r.iod += od;
            ++r.positive_count;
        }
    }
    r.miod = r.positive_count > 0 ? r.iod / r.positive_count : 0.0;
    return r;
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        fail(Errc::LengthMismatch, "sequences differ in length: " + std::to_string(xs.size()) +
                                       " vs " + std::to_string(ys.size()));
    }
    const std::size_t n = xs.size();
    if (n < 2) fail(Errc::UndefinedStatistic, "need at least 2 samples");

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        fail(Errc::UndefinedStatistic, "correlation undefined for a constant sequence");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double psnr(const RgbImage& a, const RgbImage& b) {
    if (a.height != b.height || a.width != b.width) {
        fail(Errc::ShapeMismatch, "images differ in size");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        sq += d * d;
    }
    const double mse = sq / static_cast<double>(a.data.size());
    if (mse == 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

namespace {

constexpr int kSsimRadius = 5;  // 11x11 window

// Reflect including the edge pixel (symmetric padding); one fold suffices
// for min side >= 11.
inline int reflect(int i, int n) {
    if (i < 0) return -i - 1;
    if (i >= n) return 2 * n - i - 1;
    return i;
}

std::array<double, 2 * kSsimRadius + 1> gaussian_taps() {
    std::array<double, 2 * kSsimRadius + 1> w{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
        w[static_cast<std::size_t>(k + kSsimRadius)] = std::exp(-(k * k) / (2.0 * sigma * sigma));
        sum += w[static_cast<std::size_t>(k + kSsimRadius)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable Gaussian filter with symmetric boundaries.
ScalarField gaussian_blur(const ScalarField& src) {
    static const auto taps = gaussian_taps();
    ScalarField tmp(src.height, src.width);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            double acc = 0.0;
            for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
                acc += taps[static_cast<std::size_t>(k + kSsimRadius)] *
                       src.at(y, reflect(x + k, src.width));
            }
            tmp.at(y, x) = acc;
        }
    }
    ScalarField dst(src.height, src.width);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            double acc = 0.0;
            for (int k = -kSsimRadius; k <= kSsimRadius; ++k) {
                acc += taps[static_cast<std::size_t>(k + kSsimRadius)] *
                       tmp.at(reflect(y + k, src.height), x);
            }
            dst.at(y, x) = acc;
        }
    }
    return dst;
}

}  // namespace

double ssim(const RgbImage& a, const RgbImage& b) {
    if (a.height != b.height || a.width != b.width) {
        fail(Errc::ShapeMismatch, "images differ in size");
    }
    if (std::min(a.height, a.width) < 11) {
        fail(Errc::ImageTooSmall, "SSIM needs at least 11 pixels per side");
    }

    const ScalarField x = rgb_to_grayscale(a);
    const ScalarField y = rgb_to_grayscale(b);
    const std::size_t n = x.values.size();

    ScalarField xx(a.height, a.width), yy(a.height, a.width), xy(a.height, a.width);
    for (std::size_t i = 0; i < n; ++i) {
        xx.values[i] = x.values[i] * x.values[i];
        yy.values[i] = y.values[i] * y.values[i];
        xy.values[i] = x.values[i] * y.values[i];
    }

    const ScalarField mu_x = gaussian_blur(x);
    const ScalarField mu_y = gaussian_blur(y);
    const ScalarField e_xx = gaussian_blur(xx);
    const ScalarField e_yy = gaussian_blur(yy);
    const ScalarField e_xy = gaussian_blur(xy);

    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mx = mu_x.values[i];
        const double my = mu_y.values[i];
        const double var_x = e_xx.values[i] - mx * mx;
        const double var_y = e_yy.values[i] - my * my;
        const double cov = e_xy.values[i] - mx * my;
        sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
               ((mx * mx + my * my + c1) * (var_x + var_y + c2));
    }
    return sum / static_cast<double>(n);
}

DatasetReport aggregate_pairs(std::vector<PairMetrics> pairs) {
    DatasetReport r;
    r.n_pairs = static_cast<int>(pairs.size());
    r.pairs = std::move(pairs);
    if (r.n_pairs == 0) return r;

    std::vector<double> iod_f, iod_r;
    iod_f.reserve(r.pairs.size());
    iod_r.reserve(r.pairs.size());
    for (const PairMetrics& p : r.pairs) {
        r.mean_miod_diff += p.fake.miod - p.real.miod;
        r.mean_iod_diff += p.fake.iod - p.real.iod;
        r.mean_psnr += p.psnr_db;
        r.mean_ssim += p.ssim_val;
        iod_f.push_back(p.fake.iod);
        iod_r.push_back(p.real.iod);
    }
    r.mean_miod_diff /= r.n_pairs;
    r.mean_iod_diff /= r.n_pairs;
    r.mean_psnr /= r.n_pairs;
    r.mean_ssim /= r.n_pairs;

    try {
        r.pearson = pearson_r(iod_f, iod_r);
    } catch (const Error& e) {
        if (e.code() != Errc::UndefinedStatistic) throw;
        r.pearson = std::nullopt;
    }
    return r;
}

namespace {

std::vector<std::string> png_names(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec) || ec) {
        fail(Errc::MissingFile, "no such directory: " + dir.string());
    }
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".png") {
            names.push_back(entry.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace

DatasetReport evaluate_dataset(const std::filesystem::path& fake_dir,
                               const std::filesystem::path& real_dir, const PipelineConfig& cfg,
                               int jobs) {
    const std::vector<std::string> fake_names = png_names(fake_dir);
    const std::vector<std::string> real_names = png_names(real_dir);

    // Both lists are sorted; report the first unmatched name.
    std::size_t i = 0, j = 0;
    while (i < fake_names.size() || j < real_names.size()) {
        if (i < fake_names.size() && j < real_names.size() && fake_names[i] == real_names[j]) {
            ++i;
            ++j;
        } else if (j >= real_names.size() ||
                   (i < fake_names.size() && fake_names[i] < real_names[j])) {
            fail(Errc::PairingMismatch, "'" + fake_names[i] + "' has no counterpart in " +
                                            real_dir.string());
        } else {
            fail(Errc::PairingMismatch, "'" + real_names[j] + "' has no counterpart in " +
                                            fake_dir.string());
        }
    }

    const std::size_t n = fake_names.size();
    std::vector<PairMetrics> pairs(n);
    std::vector<std::exception_ptr> errors(n);

    auto compute_pair = [&](std::size_t k) {
        const std::string& name = fake_names[k];
        try {
            const RgbImage fake = load_png(fake_dir / name);
            const RgbImage real = load_png(real_dir / name);
            PairMetrics p;
            p.file = name;
            p.fake = iod_miod(fake, cfg.stains, cfg.i0, cfg.pos_tau);
            p.real = iod_miod(real, cfg.stains, cfg.i0, cfg.pos_tau);
            p.psnr_db = psnr(fake, real);
            p.ssim_val = ssim(fake, real);
            pairs[k] = std::move(p);
        } catch (const Error& e) {
            errors[k] = std::make_exception_ptr(Error(e.code(), name + ": " + e.what()));
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1 || n < 2) {
        for (std::size_t k = 0; k < n; ++k) compute_pair(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const std::size_t worker_count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
        workers.reserve(worker_count);
        for (std::size_t w = 0; w < worker_count; ++w) {
            workers.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < n; k = next.fetch_add(1)) {
                    compute_pair(k);
                }
            });
        }
        for (std::thread& t : workers) t.join();
    }

    // Deterministic error reporting: first failing pair in name order wins.
    for (std::size_t k = 0; k < n; ++k) {
        if (errors[k]) std::rethrow_exception(errors[k]);
    }
    return aggregate_pairs(std::move(pairs));
}

std::vector<CurveRow> cumulative_iod_curve(const DatasetReport& report) {
    if (report.pairs.empty()) fail(Errc::EmptyReport, "report holds no pairs");
    std::vector<CurveRow> rows;
    rows.reserve(report.pairs.size());
    double cf = 0.0, cr = 0.0;
    for (std::size_t k = 0; k < report.pairs.size(); ++k) {
        cf += report.pairs[k].fake.iod;
        cr += report.pairs[k].real.iod;
        rows.push_back({static_cast<int>(k) + 1, cf, cr});
    }
    return rows;
}

double pathology_loss_terms(double mlpa_total_value, double ctpc, double ssim_value,
                            const LossWeights& w) {
    if (ctpc < 0.0) fail(Errc::InvalidParameter, "ctpc must be non-negative");
    if (ssim_value > 1.0) fail(Errc::InvalidParameter, "ssim must not exceed 1");
    return w.lambda_m * mlpa_total_value + w.lambda_c * ctpc + w.lambda_s * (1.0 - ssim_value);
}

double pathology_loss(const FodMap& o_f, const FodMap& o_r, double ctpc, double ssim_value,
                      const PipelineConfig& cfg) {
    return pathology_loss_terms(mlpa_total(o_f, o_r, cfg).total, ctpc, ssim_value, cfg.weights);
}

namespace {

// Route all CSV numbers through the JSON serializer so every report format
// renders a value identically.
std::string num(double v) { return nlohmann::json(v).dump(); }

}  // namespace

nlohmann::json report_to_json(const DatasetReport& report, const nlohmann::json& config_echo) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const PairMetrics& p : report.pairs) {
        pairs.push_back({
            {"file", p.file},
            {"iod_fake", p.fake.iod},
            {"iod_real", p.real.iod},
            {"miod_fake", p.fake.miod},
            {"miod_real", p.real.miod},
            {"positive_fake", p.fake.positive_count},
            {"positive_real", p.real.positive_count},
            {"psnr", p.psnr_db},
            {"ssim", p.ssim_val},
        });
    }
    nlohmann::json j = {
        {"config", config_echo},
        {"mean_iod_diff", report.mean_iod_diff},
        {"mean_miod_diff", report.mean_miod_diff},
        {"mean_psnr", report.mean_psnr},
        {"mean_ssim", report.mean_ssim},
        {"n_pairs", report.n_pairs},
        {"pairs", pairs},
        {"scale", {{"iod", 1.0e7}}},
    };
    if (report.pearson.has_value()) {
        j["pearson_r"] = *report.pearson;
    } else {
        j["pearson_r"] = nullptr;
    }
    return j;
}

std::string report_pairs_csv(const DatasetReport& report) {
    std::ostringstream out;
    out << "file,iod_fake,iod_real,miod_fake,miod_real,positive_fake,positive_real,psnr,ssim\n";
    for (const PairMetrics& p : report.pairs) {
        out << p.file << ',' << num(p.fake.iod) << ',' << num(p.real.iod) << ','
            << num(p.fake.miod) << ',' << num(p.real.miod) << ',' << p.fake.positive_count << ','
            << p.real.positive_count << ',' << num(p.psnr_db) << ',' << num(p.ssim_val) << '\n';
    }
    return out.str();
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
    std::ostringstream out;
    out << "index,cum_iod_fake,cum_iod_real\n";
    for (const CurveRow& r : rows) {
        out << r.index << ',' << num(r.cum_iod_fake) << ',' << num(r.cum_iod_real) << '\n';
    }
    return out.str();
}

}  // namespace odstain
