#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "odstain/config.hpp"
#include "odstain/fod.hpp"
#include "odstain/metrics.hpp"
#include "odstain/mlpa.hpp"
#include "odstain/npy_io.hpp"
#include "odstain/pcls.hpp"
#include "odstain/png_io.hpp"
#include "odstain/stainsep.hpp"

namespace {

using odstain::Errc;
using odstain::fail;

struct ConfigCli {
    std::string config_path;
    std::optional<double> alpha, beta, mask_tau, pos_tau, i0;
    std::optional<double> lambda_m, lambda_c, lambda_s, lambda_g;
    std::optional<int> n_h, n_b;
    std::vector<double> stain_rows;

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "JSON config file")
            ->envname("ODSTAIN_CONFIG");
        app.add_option("--alpha", alpha, "FOD focusing exponent");
        app.add_option("--beta", beta, "average-expression tolerance fraction");
        app.add_option("--n-h", n_h, "histogram bin count");
        app.add_option("--n-b", n_b, "block count (perfect square)");
        app.add_option("--mask-tau", mask_tau, "pseudo-mask FOD threshold");
        app.add_option("--pos-tau", pos_tau, "IOD positivity OD threshold");
        app.add_option("--i0", i0, "incident intensity");
        app.add_option("--lambda-m", lambda_m, "MLPA loss weight");
        app.add_option("--lambda-c", lambda_c, "CTPC loss weight");
        app.add_option("--lambda-s", lambda_s, "SSIM loss weight");
        app.add_option("--lambda-g", lambda_g, "gradient-penalty loss weight");
        app.add_option("--stain-matrix", stain_rows,
                       "stain matrix, 9 numbers row-major (rows auto-normalized)")
            ->expected(9);
    }

    // Defaults, then the config file, then explicit flags.
    odstain::PipelineConfig resolve() const {
        odstain::PipelineConfig cfg;
        if (!config_path.empty()) cfg = odstain::PipelineConfig::from_file(config_path);
        if (alpha) cfg.alpha = *alpha;
        if (beta) cfg.beta = *beta;
        if (n_h) cfg.n_h = *n_h;
        if (n_b) cfg.n_b = *n_b;
        if (mask_tau) cfg.mask_tau = *mask_tau;
        if (pos_tau) cfg.pos_tau = *pos_tau;
        if (i0) cfg.i0 = *i0;
        if (lambda_m) cfg.weights.lambda_m = *lambda_m;
        if (lambda_c) cfg.weights.lambda_c = *lambda_c;
        if (lambda_s) cfg.weights.lambda_s = *lambda_s;
        if (lambda_g) cfg.weights.lambda_g = *lambda_g;
        if (!stain_rows.empty()) {
            std::array<double, 9> rows{};
            std::copy(stain_rows.begin(), stain_rows.end(), rows.begin());
            cfg.stains = odstain::StainMatrix::from_rows(rows);
        }
        return cfg;
    }
};

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoFailure, "cannot write " + path.string());
    out << text;
    if (!out) fail(Errc::IoFailure, "write failed: " + path.string());
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text(out_path, text);
    }
}

// FOD input: a 2-D .npy is taken as a ready FOD map, a .png runs the
// stain-separation pipeline first.
odstain::FodMap load_fod_input(const std::filesystem::path& path,
                               const odstain::PipelineConfig& cfg, bool force) {
    if (path.extension() == ".npy") {
        odstain::ScalarField f = odstain::to_scalar_field(odstain::load_npy(path));
        odstain::FodMap map(f.height, f.width, cfg.alpha);
        map.values = std::move(f.values);
        return map;
    }
    const odstain::RgbImage img = odstain::load_png(path);
    return odstain::fod_map(odstain::dab_image(img, cfg.stains, cfg.i0), cfg.alpha, cfg.i0, force);
}

odstain::ClassMaskMap load_mask_input(const std::filesystem::path& path) {
    const odstain::NpyArray arr = odstain::load_npy(path);
    if (arr.ndim() == 2) return odstain::mask_from_flags(odstain::to_scalar_field(arr));
    return odstain::mask_from_tensor(odstain::to_tensor3(arr));
}

int run(int argc, char** argv) {
    CLI::App app{"DAB optical-density quantification and virtual-staining evaluation"};
    app.require_subcommand(1);
    app.fallthrough();

    ConfigCli cli_cfg;
    cli_cfg.attach(app);

    // separate
    auto* sep = app.add_subcommand("separate", "stain separation artifacts for one image");
    std::string sep_input, sep_out_dir = ".";
    sep->add_option("input", sep_input, "input PNG")->required();
    sep->add_option("--out-dir", sep_out_dir, "output directory");

    // fod
    auto* fod = app.add_subcommand("fod", "focal optical density map of one image");
    std::string fod_input, fod_out = "fod.npy", fod_heat;
    bool fod_force = false;
    fod->add_option("input", fod_input, "input PNG")->required();
    fod->add_option("--out", fod_out, "output .npy path");
    fod->add_option("--heatmap", fod_heat, "optional heat-map PNG path");
    fod->add_flag("--force", fod_force, "allow alpha <= 1");

    // mlpa
    auto* mlpa = app.add_subcommand("mlpa", "protein-awareness loss between two images");
    std::string mlpa_fake, mlpa_real, mlpa_out;
    bool mlpa_force = false;
    mlpa->add_option("fake", mlpa_fake, "generated image (.png) or FOD map (.npy)")->required();
    mlpa->add_option("real", mlpa_real, "reference image (.png) or FOD map (.npy)")->required();
    mlpa->add_option("--out", mlpa_out, "output JSON path (default: stdout)");
    mlpa->add_flag("--force", mlpa_force, "allow alpha <= 1");

    // ctpc
    auto* ctpc = app.add_subcommand("ctpc", "cross-image tumor prototype consistency loss");
    std::string ff, fp, rf, rp, fm, rm, ctpc_out;
    std::vector<std::string> mask_from_fod;
    bool ctpc_force = false;
    ctpc->add_option("--fake-feat", ff, "fake feature map .npy (H x W x D)")->required();
    ctpc->add_option("--fake-prob", fp, "fake probability map .npy (H x W x C)")->required();
    ctpc->add_option("--real-feat", rf, "real feature map .npy (H x W x D)")->required();
    ctpc->add_option("--real-prob", rp, "real probability map .npy (H x W x C)")->required();
    ctpc->add_option("--fake-mask", fm, "fake pseudo-mask .npy");
    ctpc->add_option("--real-mask", rm, "real pseudo-mask .npy");
    ctpc->add_option("--mask-from-fod", mask_from_fod,
                     "derive masks from two FOD sources (fake, real; .npy or .png)")
        ->expected(2);
    ctpc->add_option("--out", ctpc_out, "output JSON path (default: stdout)");
    ctpc->add_flag("--force", ctpc_force, "allow alpha <= 1");

    // eval
    auto* eval = app.add_subcommand("eval", "paired-dataset evaluation report");
    std::string fake_dir, real_dir, eval_out = ".";
    int jobs = 1;
    eval->add_option("--fake-dir", fake_dir, "directory of generated images")->required();
    eval->add_option("--real-dir", real_dir, "directory of reference images")->required();
    eval->add_option("--out", eval_out, "output directory");
    eval->add_option("--jobs", jobs, "worker count (output is independent of it)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }

    const odstain::PipelineConfig cfg = cli_cfg.resolve();
    const bool force = fod_force || mlpa_force || ctpc_force;
    cfg.validate(force);

    if (sep->parsed()) {
        const odstain::RgbImage img = odstain::load_png(sep_input);
        std::filesystem::create_directories(sep_out_dir);
        const odstain::ConcentrationMap conc =
            odstain::separate(odstain::od_transform(img, cfg.i0), cfg.stains);
        odstain::save_png(odstain::reconstruct_stain(conc, odstain::kDab, cfg.stains, cfg.i0),
                          std::filesystem::path(sep_out_dir) / "dab.png");
        odstain::save_png(
            odstain::reconstruct_stain(conc, odstain::kHematoxylin, cfg.stains, cfg.i0),
            std::filesystem::path(sep_out_dir) / "hematoxylin.png");
        odstain::Tensor3 t(conc.height, conc.width, 3);
        t.values = conc.amounts;
        odstain::save_npy(t, std::filesystem::path(sep_out_dir) / "concentrations.npy");
        return 0;
    }

    if (fod->parsed()) {
        const odstain::RgbImage img = odstain::load_png(fod_input);
        const odstain::FodMap map = odstain::fod_map(
            odstain::dab_image(img, cfg.stains, cfg.i0), cfg.alpha, cfg.i0, fod_force);
        odstain::ScalarField f(map.height, map.width);
        f.values = map.values;
        odstain::save_npy(f, fod_out);
        if (!fod_heat.empty()) odstain::save_png(odstain::fod_heatmap(map), fod_heat);
        return 0;
    }

    if (mlpa->parsed()) {
        const odstain::FodMap o_f = load_fod_input(mlpa_fake, cfg, mlpa_force);
        const odstain::FodMap o_r = load_fod_input(mlpa_real, cfg, mlpa_force);
        nlohmann::json j = odstain::mlpa_total(o_f, o_r, cfg).to_json();
        j["config"] = cfg.to_json();
        emit_json(j, mlpa_out);
        return 0;
    }

    if (ctpc->parsed()) {
        const odstain::Tensor3 fake_feat = odstain::to_tensor3(odstain::load_npy(ff));
        const odstain::Tensor3 fake_prob = odstain::to_tensor3(odstain::load_npy(fp));
        const odstain::Tensor3 real_feat = odstain::to_tensor3(odstain::load_npy(rf));
        const odstain::Tensor3 real_prob = odstain::to_tensor3(odstain::load_npy(rp));
        odstain::validate_prob_map(fake_prob);
        odstain::validate_prob_map(real_prob);

        odstain::ClassMaskMap mask_fake, mask_real;
        if (!mask_from_fod.empty()) {
            const odstain::FodMap fod_fake = load_fod_input(mask_from_fod[0], cfg, ctpc_force);
            const odstain::FodMap fod_real = load_fod_input(mask_from_fod[1], cfg, ctpc_force);
            mask_fake = odstain::downsample_mask(odstain::pseudo_mask(fod_fake, cfg.mask_tau),
                                                 fake_feat.height, fake_feat.width);
            mask_real = odstain::downsample_mask(odstain::pseudo_mask(fod_real, cfg.mask_tau),
                                                 real_feat.height, real_feat.width);
        } else if (!fm.empty() && !rm.empty()) {
            mask_fake = load_mask_input(fm);
            mask_real = load_mask_input(rm);
        } else {
            fail(Errc::InvalidParameter,
                 "provide --fake-mask and --real-mask, or --mask-from-fod");
        }

        const double loss =
            odstain::ctpc_loss(fake_feat, fake_prob, real_feat, real_prob, mask_fake, mask_real);
        const odstain::PrototypeSet q_fake = odstain::compute_prototypes(fake_feat, fake_prob);
        const odstain::PrototypeSet q_real = odstain::compute_prototypes(real_feat, real_prob);
        auto proto_json = [](const odstain::PrototypeSet& q) {
            nlohmann::json rows = nlohmann::json::array();
            for (int c = 0; c < q.classes; ++c) {
                nlohmann::json row = nlohmann::json::array();
                for (int d = 0; d < q.dim; ++d) row.push_back(q.at(c, d));
                rows.push_back(row);
            }
            return rows;
        };
        nlohmann::json j = {
            {"config", cfg.to_json()},
            {"ctpc", loss},
            {"prototypes_fake", proto_json(q_fake)},
            {"prototypes_real", proto_json(q_real)},
        };
        emit_json(j, ctpc_out);
        return 0;
    }

    if (eval->parsed()) {
        const odstain::DatasetReport report =
            odstain::evaluate_dataset(fake_dir, real_dir, cfg, jobs);
        std::filesystem::create_directories(eval_out);
        const std::filesystem::path out(eval_out);
        emit_json(odstain::report_to_json(report, cfg.to_json()), (out / "report.json").string());
        write_text(out / "pairs.csv", odstain::report_pairs_csv(report));
        write_text(out / "cumulative_iod.csv",
                   odstain::curve_csv(odstain::cumulative_iod_curve(report)));
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const odstain::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return odstain::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
