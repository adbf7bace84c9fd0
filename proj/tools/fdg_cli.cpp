// Command-line surface for the restoration pipeline: degradation synthesis,
// annihilation analysis, decomposition, diffusion restoration, metrics and
// JPEG inspection. Exit codes: 0 success, 1 runtime/I-O failure, 2 usage or
// config error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fdg/decomposition.hpp"
#include "fdg/diffusion.hpp"
#include "fdg/haze.hpp"
#include "fdg/image.hpp"
#include "fdg/jfif.hpp"
#include "fdg/jpeg.hpp"
#include "fdg/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ostringstream os;
    os << std::hex << fnv1a(bytes);
    return os.str();
}

struct ReportWriter {
    json report;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit ReportWriter(const std::string& command) { report["command"] = command; }

    void write(const std::string& out_dir) {
        report["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        std::ofstream out(fs::path(out_dir) / "report.json");
        out << report.dump(2) << "\n";
    }
};

// JSON config file merged under explicit CLI flags; unknown keys rejected.
json load_config(const std::string& path, const std::vector<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json cfg = json::parse(in);
    if (!cfg.is_object()) throw CLI::ValidationError("config", "config root must be a JSON object");
    for (auto& [key, _] : cfg.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw CLI::ValidationError("config", "unknown config key '" + key + "'");
    }
    return cfg;
}

template <typename T>
void merge_option(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
    if (cfg.contains(key) && opt->count() == 0) value = cfg[key].get<T>();
}

fdg::ImageF32 load_image_f32(const std::string& path) { return fdg::to_f32(fdg::load_ppm(path)); }

json band_table(const fdg::AnnihilationReport& rep) {
    json bands = json::array();
    for (int zz = 1; zz < 64; ++zz)
        bands.push_back({{"band", zz},
                         {"count", rep.bands.count[zz]},
                         {"annihilated", rep.bands.annihilated[zz]},
                         {"frequency", rep.bands.frequency(zz)}});
    return {{"qf", rep.qf},          {"transmission", rep.transmission},
            {"aggregate", rep.aggregate}, {"block_count", rep.block_count},
            {"zero_ac_blocks", rep.zero_ac_blocks}, {"bands", bands}};
}

int cmd_degrade(const std::string& input, const std::string& out_dir, int qf, double t_const,
                const std::string& t_map_path, double ramp_beta, std::vector<double> airlight,
                fdg::RoundingMode mode) {
    ReportWriter rw("degrade");
    fdg::ImageF32 clear = load_image_f32(input);
    fdg::TransmissionMap tmap;
    if (!t_map_path.empty()) {
        tmap = fdg::tensor_to_image(fdg::load_tensor(t_map_path));
        if (tmap.width != clear.width || tmap.height != clear.height || tmap.channels != 1)
            throw CLI::ValidationError("--t-map", "transmission map shape mismatch");
    } else if (t_const > 0.0) {
        tmap = fdg::TransmissionMap(clear.width, clear.height, 1, static_cast<float>(t_const));
    } else {
        // horizontal depth ramp 0..1 attenuated by beta
        fdg::ImageF32 depth(clear.width, clear.height, 1);
        for (int y = 0; y < clear.height; ++y)
            for (int x = 0; x < clear.width; ++x)
                depth.at(y, x, 0) = clear.width > 1 ? static_cast<float>(x) / (clear.width - 1) : 0.0f;
        tmap = fdg::transmission_from_depth(depth, ramp_beta);
    }
    fdg::Airlight a{static_cast<float>(airlight[0]), static_cast<float>(airlight[1]),
                    static_cast<float>(airlight[2])};
    fdg::ImageF32 hazy = fdg::apply_asm(clear, tmap, a);
    fdg::ImageU8 hazy_u8 = fdg::to_u8(hazy);
    fdg::JpegSimResult sim = fdg::simulate_jpeg(hazy_u8, qf, mode);

    fs::create_directories(out_dir);
    fdg::save_ppm(hazy_u8, (fs::path(out_dir) / "hazy.ppm").string());
    fdg::save_ppm(sim.image, (fs::path(out_dir) / "compressed.ppm").string());
    fdg::save_tensor(fdg::image_to_tensor(tmap), (fs::path(out_dir) / "transmission.fdgt").string());
    fdg::save_tensor(fdg::image_to_tensor(fdg::loss_map(hazy_u8, sim.image)),
                     (fs::path(out_dir) / "lossmap.fdgt").string());

    rw.report["inputs"] = {{input, file_digest(input)}};
    rw.report["parameters"] = {{"qf", qf}, {"t_const", t_const}, {"ramp_beta", ramp_beta},
                               {"airlight", airlight}};
    rw.report["outputs"] = {"hazy.ppm", "compressed.ppm", "transmission.fdgt", "lossmap.fdgt"};
    rw.write(out_dir);
    return 0;
}

int cmd_analyze(const std::string& corpus_dir, const std::string& out_dir, int qf,
                std::vector<double> t_list) {
    ReportWriter rw("analyze");
    std::vector<fdg::Block8> corpus;
    int loaded = 0, skipped = 0;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(corpus_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            auto blocks = fdg::blocks_from_image(load_image_f32(f.string()));
            corpus.insert(corpus.end(), blocks.begin(), blocks.end());
            ++loaded;
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping " << f << ": " << e.what() << "\n";
            ++skipped;
        }
    }
    if (corpus.empty()) throw std::runtime_error("analyze: no decodable images in corpus");

    fs::create_directories(out_dir);
    std::sort(t_list.begin(), t_list.end(), std::greater<>());
    std::vector<fdg::AnnihilationReport> reports;
    json jreports = json::array();
    for (double t : t_list) {
        auto rep = fdg::annihilation_stats(corpus, t, qf);
        jreports.push_back(band_table(rep));
        fdg::TensorF32 freq;
        freq.dims = {64};
        for (int zz = 0; zz < 64; ++zz) freq.data.push_back(static_cast<float>(rep.bands.frequency(zz)));
        std::ostringstream name;
        name << "band_frequency_t" << t << ".fdgt";
        fdg::save_tensor(freq, (fs::path(out_dir) / name.str()).string());
        reports.push_back(std::move(rep));
    }
    json verdicts = json::array();
    for (std::size_t i = 0; i + 1 < reports.size(); ++i) {
        // reports sorted by descending t; compare each hazier report to the clearest
        auto v = fdg::verify_inequality(reports[i + 1], reports[0]);
        verdicts.push_back({{"clear_t", reports[0].transmission},
                            {"hazy_t", reports[i + 1].transmission},
                            {"pass", v.pass}});
    }
    rw.report["parameters"] = {{"qf", qf}, {"t_list", t_list}};
    rw.report["corpus"] = {{"images", loaded}, {"skipped", skipped}, {"blocks", corpus.size()}};
    rw.report["reports"] = jreports;
    rw.report["verdicts"] = verdicts;
    rw.write(out_dir);
    std::ofstream(fs::path(out_dir) / "analysis.json") << rw.report.dump(2) << "\n";
    return 0;
}

int cmd_metrics(const std::string& a_path, const std::string& b_path) {
    fdg::ImageF32 a = load_image_f32(a_path);
    fdg::ImageF32 b = load_image_f32(b_path);
    double p = fdg::psnr(a, b);
    double s = fdg::ssim(a, b);
    json out = {{"psnr", std::isinf(p) ? json("inf") : json(p)}, {"ssim", s}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_parse_jpeg(const std::string& input, const std::string& out_dir) {
    ReportWriter rw("parse-jpeg");
    std::ifstream in(input, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + input);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    fdg::ParsedJpeg pj = fdg::parse_jpeg(bytes);

    fs::create_directories(out_dir);
    json tables = json::array();
    for (int id = 0; id < 4; ++id) {
        if (!pj.quant_tables[id]) continue;
        json entries = json::array();
        for (int i = 0; i < 64; ++i) entries.push_back(pj.quant_tables[id]->zig[i]);
        tables.push_back({{"id", id}, {"zigzag_entries", entries}});
        fdg::TensorF32 t;
        t.dims = {64};
        for (int i = 0; i < 64; ++i) t.data.push_back(pj.quant_tables[id]->zig[i]);
        fdg::save_tensor(t, (fs::path(out_dir) / ("quant_table_" + std::to_string(id) + ".fdgt")).string());
    }
    for (std::size_t c = 0; c < pj.coeff_grids.size(); ++c) {
        const auto& g = pj.coeff_grids[c];
        fdg::TensorF32 t;
        t.dims = {static_cast<std::uint32_t>(g.blocks_h), static_cast<std::uint32_t>(g.blocks_w), 64};
        for (const auto& blk : g.blocks)
            for (int k = 0; k < 64; ++k) t.data.push_back(static_cast<float>(blk[k]));
        fdg::save_tensor(t, (fs::path(out_dir) / ("coefficients_c" + std::to_string(c) + ".fdgt")).string());
    }
    rw.report["inputs"] = {{input, file_digest(input)}};
    rw.report["frame"] = {{"width", pj.width}, {"height", pj.height}, {"components", pj.comps.size()}};
    rw.report["quant_tables"] = tables;
    rw.write(out_dir);
    std::cout << rw.report.dump(2) << "\n";
    return 0;
}

int cmd_decompose(const std::string& input, const std::string& mode, const std::string& reference,
                  const std::string& out_dir) {
    ReportWriter rw("decompose");
    fdg::ImageF32 img = load_image_f32(input);
    std::unique_ptr<fdg::Decomposer> dec;
    if (mode == "oracle") {
        if (reference.empty())
            throw CLI::ValidationError("--reference", "oracle mode requires --reference");
        dec = std::make_unique<fdg::OracleDecomposer>(load_image_f32(reference));
    } else if (mode == "passthrough") {
        dec = std::make_unique<fdg::PassthroughDecomposer>();
    } else {
        throw CLI::ValidationError("--mode", "unknown decomposer '" + mode + "'");
    }
    fdg::DecompositionResult res = dec->run(img);

    fs::create_directories(out_dir);
    fdg::TensorF32 spec;
    spec.dims = {static_cast<std::uint32_t>(res.spectrum.channels),
                 static_cast<std::uint32_t>(res.spectrum.blocks_h),
                 static_cast<std::uint32_t>(res.spectrum.blocks_w), 64};
    for (const auto& b : res.spectrum.blocks)
        for (int k = 0; k < 64; ++k) spec.data.push_back(static_cast<float>(b[k]));
    fdg::save_tensor(spec, (fs::path(out_dir) / "spectrum.fdgt").string());
    std::ofstream(fs::path(out_dir) / "spectrum.json")
        << json{{"scale", res.spectrum.scale}, {"offset", res.spectrum.offset},
                {"delta", res.spectrum.delta}, {"width", res.spectrum.width},
                {"height", res.spectrum.height}}
               .dump(2)
        << "\n";
    fdg::save_ppm(fdg::to_u8(res.corrected), (fs::path(out_dir) / "corrected.ppm").string());
    rw.report["inputs"] = {{input, file_digest(input)}};
    rw.report["parameters"] = {{"mode", mode}};
    rw.report["consistency_off_dc"] = fdg::additive_residual_off_dc(img, res);
    rw.write(out_dir);
    return 0;
}

// Loads a decomposition produced out of process (by `decompose` or by an
// external model): spectrum tensor + manifest + corrected image.
class ExternalDecomposer : public fdg::Decomposer {
public:
    ExternalDecomposer(const std::string& spectrum_path, const std::string& corrected_path) {
        fdg::TensorF32 t = fdg::load_tensor(spectrum_path);
        if (t.dims.size() != 4 || t.dims[3] != 64)
            throw std::runtime_error("external spectrum: expected rank-4 tensor {C,BH,BW,64}");
        result_.spectrum.channels = static_cast<int>(t.dims[0]);
        result_.spectrum.blocks_h = static_cast<int>(t.dims[1]);
        result_.spectrum.blocks_w = static_cast<int>(t.dims[2]);
        result_.spectrum.blocks.resize(t.data.size() / 64);
        for (std::size_t b = 0; b < result_.spectrum.blocks.size(); ++b)
            for (int k = 0; k < 64; ++k) result_.spectrum.blocks[b][k] = t.data[b * 64 + k];
        fs::path manifest = fs::path(spectrum_path).replace_extension(".json");
        std::ifstream in(manifest);
        if (!in) throw std::runtime_error("external spectrum: missing manifest " + manifest.string());
        json m = json::parse(in);
        result_.spectrum.scale = m.at("scale").get<double>();
        result_.spectrum.offset = m.at("offset").get<double>();
        result_.spectrum.delta = m.at("delta").get<double>();
        result_.spectrum.width = m.at("width").get<int>();
        result_.spectrum.height = m.at("height").get<int>();
        result_.corrected = load_image_f32(corrected_path);
    }
    fdg::DecompositionResult run(const fdg::ImageF32& compressed_hazy) const override {
        if (!result_.corrected.same_shape(compressed_hazy))
            throw std::runtime_error("external decomposition shape mismatch");
        return result_;
    }

private:
    fdg::DecompositionResult result_;
};

// Replays a fixed externally supplied noise field for every patch; stands in
// for an out-of-process denoiser network.
class ExternalDenoiser : public fdg::Denoiser {
public:
    explicit ExternalDenoiser(const std::string& path)
        : field_(fdg::tensor_to_image(fdg::load_tensor(path))) {}
    fdg::ImageF32 estimate(const fdg::ImageF32&, const fdg::ImageF32& noisy, double,
                           const fdg::CompressionSpectrum*) const override {
        if (!field_.same_shape(noisy))
            throw std::runtime_error("external noise field shape must match the patch");
        return field_;
    }

private:
    fdg::ImageF32 field_;
};

struct RestoreOptions {
    std::string input, out_dir, reference, config_path;
    std::string denoiser = "analytic";
    std::string decomposer = "passthrough";
    std::string predictor = "zero";
    std::string spectrum_path, corrected_path, noise_field_path;
    fdg::SamplerConfig sampler;
    double mu = 0.3, sigma = 0.1;
};

int cmd_restore(const RestoreOptions& opt) {
    ReportWriter rw("restore");
    fdg::ImageF32 img = load_image_f32(opt.input);
    if (img.width < opt.sampler.patch || img.height < opt.sampler.patch)
        throw CLI::ValidationError("--patch", "image smaller than patch size");

    std::unique_ptr<fdg::Decomposer> dec;
    if (opt.decomposer == "oracle") {
        if (opt.reference.empty())
            throw CLI::ValidationError("--reference", "oracle decomposer requires --reference");
        dec = std::make_unique<fdg::OracleDecomposer>(load_image_f32(opt.reference));
    } else if (opt.decomposer == "passthrough") {
        dec = std::make_unique<fdg::PassthroughDecomposer>();
    } else if (opt.decomposer == "external") {
        if (opt.spectrum_path.empty() || opt.corrected_path.empty())
            throw CLI::ValidationError("--decomposer",
                                       "external decomposer requires --spectrum and --corrected");
        dec = std::make_unique<ExternalDecomposer>(opt.spectrum_path, opt.corrected_path);
    } else {
        throw CLI::ValidationError("--decomposer", "unknown decomposer '" + opt.decomposer + "'");
    }
    std::unique_ptr<fdg::Denoiser> den;
    if (opt.denoiser == "analytic") {
        den = std::make_unique<fdg::AnalyticGaussianDenoiser>(opt.mu, opt.sigma);
    } else if (opt.denoiser == "external") {
        if (opt.noise_field_path.empty())
            throw CLI::ValidationError("--denoiser", "external denoiser requires --noise-field");
        den = std::make_unique<ExternalDenoiser>(opt.noise_field_path);
    } else {
        throw CLI::ValidationError("--denoiser", "unknown denoiser '" + opt.denoiser + "'");
    }
    std::unique_ptr<fdg::TimestepPredictor> pred;
    if (opt.predictor == "zero") pred = std::make_unique<fdg::ZeroOffsetPredictor>();
    else if (opt.predictor == "heuristic") pred = std::make_unique<fdg::HeuristicPredictor>();
    else throw CLI::ValidationError("--predictor", "unknown predictor '" + opt.predictor + "'");

    if (!opt.sampler.snapshot_dir.empty()) fs::create_directories(opt.sampler.snapshot_dir);
    fdg::ImageF32 restored = fdg::restore(img, *dec, *den, *pred, opt.sampler);

    fs::create_directories(opt.out_dir);
    fdg::save_ppm(fdg::to_u8(restored), (fs::path(opt.out_dir) / "restored.ppm").string());
    rw.report["inputs"] = {{opt.input, file_digest(opt.input)}};
    rw.report["seed"] = opt.sampler.seed;
    rw.report["parameters"] = {{"steps", opt.sampler.steps}, {"patch", opt.sampler.patch},
                               {"stride", opt.sampler.stride}, {"denoiser", opt.denoiser},
                               {"decomposer", opt.decomposer}, {"predictor", opt.predictor},
                               {"mu", opt.mu}, {"sigma", opt.sigma}};
    if (!opt.reference.empty()) {
        fdg::ImageF32 ref = load_image_f32(opt.reference);
        double p = fdg::psnr(ref, restored);
        rw.report["metrics"] = {{"psnr", std::isinf(p) ? json("inf") : json(p)},
                                {"ssim", fdg::ssim(ref, restored)}};
    }
    rw.write(opt.out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-domain-guided restoration toolkit for compressed hazy images"};
    app.require_subcommand(1);

    // degrade
    auto* degrade = app.add_subcommand("degrade", "synthesize hazy + JPEG-compressed images");
    std::string dg_input, dg_out = "out", dg_tmap;
    int dg_qf = 80;
    double dg_tconst = 0.0, dg_beta = 1.0;
    std::vector<double> dg_air = {0.8, 0.8, 0.8};
    bool dg_symmetric = false;
    degrade->add_option("--input", dg_input)->required();
    degrade->add_option("--out", dg_out);
    degrade->add_option("--qf", dg_qf)->check(CLI::Range(1, 100));
    degrade->add_option("--t-const", dg_tconst);
    degrade->add_option("--t-map", dg_tmap);
    degrade->add_option("--ramp-beta", dg_beta);
    degrade->add_option("--airlight", dg_air)->expected(3);
    degrade->add_flag("--symmetric-rounding", dg_symmetric);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "annihilation statistics over a block corpus");
    std::string an_corpus, an_out = "out";
    int an_qf = 80;
    std::vector<double> an_t = {1.0};
    analyze->add_option("--corpus", an_corpus)->required();
    analyze->add_option("--out", an_out);
    analyze->add_option("--qf", an_qf)->check(CLI::Range(1, 100));
    analyze->add_option("--t", an_t);

    // restore
    auto* restore_cmd = app.add_subcommand("restore", "patch-based diffusion restoration");
    RestoreOptions ro;
    auto* ro_input = restore_cmd->add_option("--input", ro.input);
    auto* ro_out = restore_cmd->add_option("--out", ro.out_dir)->default_val("out");
    restore_cmd->add_option("--reference", ro.reference);
    restore_cmd->add_option("--config", ro.config_path);
    auto* ro_seed = restore_cmd->add_option("--seed", ro.sampler.seed);
    auto* ro_patch = restore_cmd->add_option("--patch", ro.sampler.patch);
    auto* ro_stride = restore_cmd->add_option("--stride", ro.sampler.stride);
    auto* ro_steps = restore_cmd->add_option("--steps", ro.sampler.steps);
    auto* ro_den = restore_cmd->add_option("--denoiser", ro.denoiser);
    auto* ro_dec = restore_cmd->add_option("--decomposer", ro.decomposer);
    auto* ro_pred = restore_cmd->add_option("--predictor", ro.predictor);
    auto* ro_mu = restore_cmd->add_option("--mu", ro.mu);
    auto* ro_sigma = restore_cmd->add_option("--sigma", ro.sigma);
    restore_cmd->add_option("--spectrum", ro.spectrum_path);
    restore_cmd->add_option("--corrected", ro.corrected_path);
    restore_cmd->add_option("--noise-field", ro.noise_field_path);
    restore_cmd->add_option("--snapshot-every", ro.sampler.snapshot_every);
    restore_cmd->add_option("--snapshot-dir", ro.sampler.snapshot_dir);

    // metrics
    auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM between two images");
    std::string me_a, me_b;
    metrics->add_option("a", me_a)->required();
    metrics->add_option("b", me_b)->required();

    // parse-jpeg
    auto* parsejpeg = app.add_subcommand("parse-jpeg", "dump tables and coefficients of a JFIF file");
    std::string pj_input, pj_out = "out";
    parsejpeg->add_option("--input", pj_input)->required();
    parsejpeg->add_option("--out", pj_out);

    // decompose
    auto* decompose = app.add_subcommand("decompose", "spectrum decomposition of a compressed image");
    std::string de_input, de_mode = "passthrough", de_ref, de_out = "out";
    decompose->add_option("--input", de_input)->required();
    decompose->add_option("--mode", de_mode);
    decompose->add_option("--reference", de_ref);
    decompose->add_option("--out", de_out);

    try {
        app.parse(argc, argv);

        if (*degrade)
            return cmd_degrade(dg_input, dg_out, dg_qf, dg_tconst, dg_tmap, dg_beta, dg_air,
                               dg_symmetric ? fdg::RoundingMode::Symmetric
                                            : fdg::RoundingMode::PlusHalfFloor);
        if (*analyze) return cmd_analyze(an_corpus, an_out, an_qf, an_t);
        if (*restore_cmd) {
            if (!ro.config_path.empty()) {
                json cfg = load_config(ro.config_path,
                                       {"input", "out", "reference", "seed", "patch", "stride",
                                        "steps", "denoiser", "decomposer", "predictor", "mu", "sigma"});
                merge_option(cfg, "seed", ro_seed, ro.sampler.seed);
                merge_option(cfg, "patch", ro_patch, ro.sampler.patch);
                merge_option(cfg, "stride", ro_stride, ro.sampler.stride);
                merge_option(cfg, "steps", ro_steps, ro.sampler.steps);
                merge_option(cfg, "denoiser", ro_den, ro.denoiser);
                merge_option(cfg, "decomposer", ro_dec, ro.decomposer);
                merge_option(cfg, "predictor", ro_pred, ro.predictor);
                merge_option(cfg, "mu", ro_mu, ro.mu);
                merge_option(cfg, "sigma", ro_sigma, ro.sigma);
                if (cfg.contains("input") && ro_input->count() == 0)
                    ro.input = cfg["input"].get<std::string>();
                if (cfg.contains("out") && ro_out->count() == 0)
                    ro.out_dir = cfg["out"].get<std::string>();
                if (cfg.contains("reference") && ro.reference.empty())
                    ro.reference = cfg["reference"].get<std::string>();
            }
            if (ro.input.empty()) throw CLI::ValidationError("--input", "input image required");
            return cmd_restore(ro);
        }
        if (*metrics) return cmd_metrics(me_a, me_b);
        if (*parsejpeg) return cmd_parse_jpeg(pj_input, pj_out);
        if (*decompose) return cmd_decompose(de_input, de_mode, de_ref, de_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
