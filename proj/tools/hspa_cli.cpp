// hspa: command-line front end for the soft-threshold attention library.
//
// Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.

#include "hspa/attention.hpp"
#include "hspa/bench.hpp"
#include "hspa/diagnostics.hpp"
#include "hspa/gradcheck.hpp"
#include "hspa/image.hpp"
#include "hspa/metrics.hpp"
#include "hspa/reconstruct.hpp"
#include "hspa/resample.hpp"
#include "hspa/simplex_ops.hpp"
#include "hspa/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailed = 1;
constexpr int kExitUsage = 2;

constexpr const char* kOutputDirEnv = "HSPA_OUTPUT_DIR";

// Thrown for bad user input that CLI11 cannot catch by itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string threads = "auto";
    std::string output_dir;

    unsigned thread_count() const
    {
        if (threads == "auto") {
            return 0;
        }
        unsigned n = 0;
        const auto [end, ec] = std::from_chars(threads.data(), threads.data() + threads.size(), n);
        if (ec != std::errc{} || end != threads.data() + threads.size() || n < 1) {
            throw UsageError("--threads must be 'auto' or a positive integer, got '" + threads + "'");
        }
        return n;
    }

    fs::path resolve(const std::string& name) const
    {
        const fs::path p(name);
        if (p.is_absolute() || output_dir.empty()) {
            return p;
        }
        return fs::path(output_dir) / p;
    }

    void ensure_output_dir() const
    {
        if (!output_dir.empty()) {
            fs::create_directories(output_dir);
        }
    }
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Splits on commas, whitespace and newlines; every token must be a finite number.
std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    std::string token;
    const auto flush = [&] {
        const std::string t = trim(token);
        token.clear();
        if (t.empty()) {
            return;
        }
        double v = 0.0;
        const char* first = t.data();
        if (*first == '+') {
            ++first;
        }
        const auto [end, ec] = std::from_chars(first, t.data() + t.size(), v);
        if (ec != std::errc{} || end != t.data() + t.size() || !std::isfinite(v)) {
            throw UsageError("not a finite number: '" + t + "'");
        }
        out.push_back(v);
    };
    for (const char c : text) {
        if (c == ',' || c == '\n' || c == ' ' || c == '\t' || c == ';') {
            flush();
        } else {
            token.push_back(c);
        }
    }
    flush();
    return out;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read '" + path.string() + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

template <typename T>
std::string join(const std::vector<T>& values)
{
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < values.size(); ++i) {
        os << (i ? "," : "") << values[i];
    }
    return os.str();
}

// ---- st-eval -------------------------------------------------------------

struct StEvalOptions {
    std::vector<std::string> values;
    std::string file;
    std::size_t k = 0;
};

int run_st_eval(const StEvalOptions& o)
{
    std::string text;
    if (!o.file.empty()) {
        if (!o.values.empty()) {
            throw UsageError("give either a vector literal or --file, not both");
        }
        text = read_text(o.file);
    } else {
        for (const auto& v : o.values) {
            text += v + ",";
        }
    }
    const std::vector<double> s = parse_number_list(text);
    if (s.empty()) {
        throw UsageError("st-eval: empty input vector");
    }
    const hspa::SparseWeights w = o.k > 0 ? hspa::soft_threshold_topk(s, o.k) : hspa::soft_threshold_exact(s);
    std::cout << std::setprecision(17);
    std::cout << "weights: " << join(w.weights) << '\n';
    std::cout << "kappa: " << w.threshold << '\n';
    std::cout << "support_size: " << w.support_size << '\n';
    std::cout << "support: " << join(w.support) << '\n';
    return kExitOk;
}

// ---- gradcheck -----------------------------------------------------------

struct GradcheckCliOptions {
    std::size_t trials = 1000;
    std::size_t n = 32;
    hspa::GradCheckOptions check;
};

int run_gradcheck_cmd(const GradcheckCliOptions& o, const GlobalOptions& g)
{
    const auto report = hspa::run_gradcheck(o.trials, o.n, g.seed, o.check, g.thread_count());
    std::cout << report.summary(o.check) << '\n';
    return report.passed(o.check) ? kExitOk : kExitPropertyFailed;
}

// ---- flatness / support-bound --------------------------------------------

struct FlatnessCliOptions {
    std::vector<std::size_t> lengths{16, 64, 256, 400};
    std::size_t trials = 10000;
    std::string csv = "flatness.csv";
};

int run_flatness_cmd(const FlatnessCliOptions& o, const GlobalOptions& g)
{
    const auto profile = hspa::flatness_profile(o.lengths, o.trials, g.seed, g.thread_count());
    g.ensure_output_dir();
    const fs::path path = g.resolve(o.csv);
    hspa::emit_csv(profile, path);
    std::cout << hspa::to_csv(profile);
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < profile.mean_max_prob.size(); ++i) {
        decreasing = decreasing && profile.mean_max_prob[i] > profile.mean_max_prob[i + 1];
    }
    std::cerr << "wrote " << path.string() << "; mean max probability "
              << (decreasing ? "strictly decreasing" : "NOT strictly decreasing") << " in length\n";
    return decreasing ? kExitOk : kExitPropertyFailed;
}

struct SupportBoundCliOptions {
    std::size_t n = 64;
    std::vector<std::size_t> k_values{1, 2, 4, 8, 16};
    std::size_t trials = 100000;
    double sigmas = 3.0;
    std::string csv = "support_bound.csv";
};

int run_support_bound_cmd(const SupportBoundCliOptions& o, const GlobalOptions& g)
{
    const auto report = hspa::support_bound_check(o.n, o.k_values, o.trials, g.seed, g.thread_count());
    g.ensure_output_dir();
    const fs::path path = g.resolve(o.csv);
    hspa::emit_csv(report, path);
    std::cout << hspa::to_csv(report);
    bool ok = true;
    for (std::size_t i = 0; i < report.k_values.size(); ++i) {
        ok = ok && report.holds(i, o.sigmas);
    }
    std::cerr << "wrote " << path.string() << "; bound " << (ok ? "holds" : "VIOLATED") << " at every k\n";
    return ok ? kExitOk : kExitPropertyFailed;
}

// ---- sr-demo -------------------------------------------------------------

struct SrDemoOptions {
    std::string input;
    std::size_t scale = 2;
    std::string mode = "hspa_topk";
    std::size_t k = hspa::kDefaultTopK;
    std::size_t m = 512;
    std::string search = "window:31";
    std::size_t patch_radius = 2;
    std::size_t stride = 1;
    double bandwidth = 0.1;
    std::string similarity = "distance";
    std::string degradation = "bicubic";
    double sigma = hspa::kDefaultBlurSigma;
    std::string out = "sr_output.pnm";
    std::string metrics = "metrics.json";
    std::string save_lr;
};

hspa::Image load_source(const std::string& input)
{
    constexpr std::string_view prefix = "corpus:";
    if (input.rfind(prefix, 0) == 0) {
        const std::string name = input.substr(prefix.size());
        for (auto& item : hspa::synthetic_corpus()) {
            if (item.name == name) {
                return std::move(item.image);
            }
        }
        throw UsageError("unknown corpus image '" + name + "' (stripes, checkerboard, bricks)");
    }
    return hspa::load_image(input);
}

double json_number(double v)
{
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

int run_sr_demo(const SrDemoOptions& o, const GlobalOptions& g)
{
    hspa::PatchConfig cfg;
    cfg.patch_radius = o.patch_radius;
    cfg.stride = o.stride;
    cfg.search = hspa::SearchSpace::parse(o.search);
    cfg.scale = o.scale;
    cfg.mode.mode = hspa::parse_attention_mode(o.mode);
    cfg.mode.k = o.k;
    cfg.mode.m = o.m;
    cfg.mode.seed = g.seed;
    cfg.similarity = hspa::parse_patch_similarity(o.similarity);
    cfg.bandwidth = o.bandwidth;
    cfg.validate();
    cfg.mode.validate();
    const unsigned threads = g.thread_count();

    hspa::DegradationSpec spec;
    spec.kind = hspa::parse_degradation_kind(o.degradation);
    spec.gaussian_sigma = o.sigma;
    spec.scale = o.scale;

    const hspa::Image source = load_source(o.input);
    hspa::Image hr = hspa::crop_to_multiple(source, o.scale);
    if (source.has_rgb()) {
        hr.rgb.clear();
        hr.rgb.reserve(3 * hr.pixels());
        for (std::size_t y = 0; y < hr.height; ++y) {
            const double* row = &source.rgb[3 * y * source.width];
            hr.rgb.insert(hr.rgb.end(), row, row + 3 * hr.width);
        }
    }

    const auto start = std::chrono::steady_clock::now();
    hspa::Image lr_y;
    hspa::Image out;
    double mean_support = 0.0;
    double mean_candidates = 0.0;
    hspa::Image lr_colour;
    if (hr.has_rgb()) {
        const auto planes = hspa::split_ycbcr(hr);
        lr_y = hspa::degrade(planes.y, spec);
        const hspa::Image lr_cb = hspa::degrade(planes.cb, spec);
        const hspa::Image lr_cr = hspa::degrade(planes.cr, spec);
        const auto rec = hspa::reconstruct(lr_y, cfg, threads);
        mean_support = rec.mean_support_size;
        mean_candidates = rec.mean_candidates;
        out = hspa::merge_ycbcr(rec.image, hspa::upsample_bicubic(lr_cb, o.scale),
                                hspa::upsample_bicubic(lr_cr, o.scale));
        // Metrics are on the reconstructed luma, before chroma clamping.
        out.luma = rec.image.luma;
        if (!o.save_lr.empty()) {
            lr_colour = hspa::merge_ycbcr(lr_y, lr_cb, lr_cr);
        }
    } else {
        lr_y = hspa::degrade(hr, spec);
        auto rec = hspa::reconstruct(lr_y, cfg, threads);
        mean_support = rec.mean_support_size;
        mean_candidates = rec.mean_candidates;
        out = std::move(rec.image);
        lr_colour = lr_y;
    }
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    const hspa::Image bicubic = hspa::upsample_bicubic(lr_y, o.scale);
    const double psnr_db = hspa::psnr(out, hr);
    const double bicubic_psnr_db = hspa::psnr(bicubic, hr);
    const bool ssim_ok = hr.width >= hspa::kSsimWindow && hr.height >= hspa::kSsimWindow;

    g.ensure_output_dir();
    const fs::path out_path = g.resolve(o.out);
    hspa::save_image(out, out_path);
    if (!o.save_lr.empty()) {
        hspa::save_image(lr_colour, g.resolve(o.save_lr));
    }

    nlohmann::ordered_json j;
    j["input"] = o.input;
    j["width"] = hr.width;
    j["height"] = hr.height;
    j["scale"] = o.scale;
    j["degradation"] = o.degradation;
    j["mode"] = o.mode;
    j["k"] = o.k;
    j["m"] = o.m;
    j["search"] = cfg.search.to_string();
    j["patch_radius"] = o.patch_radius;
    j["similarity"] = o.similarity;
    j["bandwidth"] = o.bandwidth;
    j["seed"] = g.seed;
    j["psnr_db"] = json_number(psnr_db);
    j["ssim"] = ssim_ok ? nlohmann::ordered_json(hspa::ssim(out, hr)) : nlohmann::ordered_json(nullptr);
    j["bicubic_psnr_db"] = json_number(bicubic_psnr_db);
    j["bicubic_ssim"] =
        ssim_ok ? nlohmann::ordered_json(hspa::ssim(bicubic, hr)) : nlohmann::ordered_json(nullptr);
    j["mean_support_size"] = mean_support;
    j["mean_candidates"] = mean_candidates;
    j["timing_ms"] = elapsed_ms;
    const fs::path metrics_path = g.resolve(o.metrics);
    hspa::write_text_file(metrics_path, j.dump(2) + "\n");

    std::cout << std::setprecision(17) << "psnr_db: " << psnr_db << "\nbicubic_psnr_db: " << bicubic_psnr_db
              << "\nmean_support_size: " << mean_support << " of " << mean_candidates << "\noutput: "
              << out_path.string() << "\nmetrics: " << metrics_path.string() << '\n';
    return kExitOk;
}

// ---- bench ---------------------------------------------------------------

struct BenchCliOptions {
    std::vector<std::string> ops{"exact", "topk", "softmax", "jvp"};
    hspa::BenchOptions bench;
    std::string csv = "bench.csv";
};

int run_bench_cmd(BenchCliOptions o, const GlobalOptions& g)
{
    o.bench.ops.clear();
    for (const auto& name : o.ops) {
        o.bench.ops.push_back(hspa::parse_bench_op(name));
    }
    o.bench.seed = g.seed;
    const auto records = hspa::run_bench(o.bench);
    const std::string csv = hspa::to_csv(records);
    g.ensure_output_dir();
    const fs::path path = g.resolve(o.csv);
    hspa::write_text_file(path, csv);
    std::cout << "# " << hspa::machine_label() << '\n' << csv;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Soft-threshold (simplex projection) attention toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    if (const char* env = std::getenv(kOutputDirEnv)) {
        global.output_dir = env;
    }
    app.add_option("--seed", global.seed, "Master seed for every random stream")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker threads: 'auto' or a positive integer")
        ->capture_default_str();
    app.add_option("--output-dir", global.output_dir,
                   std::string("Directory for relative output paths (default: $") + kOutputDirEnv +
                       " or the working directory)");

    StEvalOptions st;
    auto* st_cmd = app.add_subcommand("st-eval", "Soft-threshold a vector and print weights, kappa and support");
    st_cmd->add_option("values", st.values, "Numbers separated by commas (use -- before negative values)");
    st_cmd->add_option("--file", st.file, "Read numbers from a file, one per line or comma separated");
    st_cmd->add_option("--k", st.k, "Use the top-k fast path with this k (0 = exact)")->capture_default_str();

    GradcheckCliOptions gc;
    auto* gc_cmd = app.add_subcommand("gradcheck", "Compare the analytic JVP against central differences");
    gc_cmd->add_option("--trials", gc.trials, "Number of random points")->capture_default_str()->check(CLI::PositiveNumber);
    gc_cmd->add_option("--n", gc.n, "Vector length")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    gc_cmd->add_option("--step", gc.check.step, "Finite-difference step")->capture_default_str()->check(CLI::PositiveNumber);
    gc_cmd->add_option("--tie-radius", gc.check.tie_radius, "Skip points with an entry this close to the threshold")
        ->capture_default_str();
    gc_cmd->add_option("--tolerance", gc.check.rel_tolerance, "Maximum relative error")->capture_default_str();

    FlatnessCliOptions fl;
    auto* fl_cmd = app.add_subcommand("flatness", "Softmax peakedness and ST support size versus length");
    fl_cmd->add_option("--lengths", fl.lengths, "Sequence lengths")->delimiter(',')->capture_default_str();
    fl_cmd->add_option("--trials", fl.trials, "Trials per length")->capture_default_str()->check(CLI::PositiveNumber);
    fl_cmd->add_option("--csv", fl.csv, "Output CSV (relative to --output-dir)")->capture_default_str();

    SupportBoundCliOptions sb;
    auto* sb_cmd = app.add_subcommand("support-bound", "Monte-Carlo check of P(T > k) <= P(gap_k < 1/k)");
    sb_cmd->add_option("--n", sb.n, "Vector length")->capture_default_str();
    sb_cmd->add_option("--k", sb.k_values, "k values")->delimiter(',')->capture_default_str();
    sb_cmd->add_option("--trials", sb.trials, "Samples (>= 1000)")->capture_default_str();
    sb_cmd->add_option("--sigmas", sb.sigmas, "Allowed sampling margin in binomial sigmas")->capture_default_str();
    sb_cmd->add_option("--csv", sb.csv, "Output CSV (relative to --output-dir)")->capture_default_str();

    SrDemoOptions sr;
    auto* sr_cmd = app.add_subcommand("sr-demo", "Degrade an image, super-resolve it non-locally, report PSNR/SSIM");
    sr_cmd->add_option("--input", sr.input, "PGM/PPM path, or corpus:stripes|checkerboard|bricks")->required();
    sr_cmd->add_option("--scale", sr.scale, "Upscaling factor")->capture_default_str()->check(CLI::Range(2, 4));
    sr_cmd->add_option("--mode", sr.mode, "hspa_exact, hspa_topk, nla or nla_random")->capture_default_str();
    sr_cmd->add_option("--k", sr.k, "Top-k size for hspa_topk")->capture_default_str();
    sr_cmd->add_option("--m", sr.m, "Sample count for nla_random")->capture_default_str();
    sr_cmd->add_option("--search", sr.search, "full or window:<w>")->capture_default_str();
    sr_cmd->add_option("--patch-radius", sr.patch_radius, "Patch radius r (patches are 2r+1 square)")
        ->capture_default_str();
    sr_cmd->add_option("--stride", sr.stride, "Candidate grid spacing")->capture_default_str();
    sr_cmd->add_option("--bandwidth", sr.bandwidth, "Patch-distance bandwidth h")->capture_default_str();
    sr_cmd->add_option("--similarity", sr.similarity, "distance or dot")->capture_default_str();
    sr_cmd->add_option("--degradation", sr.degradation, "bicubic or blur_bicubic")->capture_default_str();
    sr_cmd->add_option("--sigma", sr.sigma, "Gaussian sigma for blur_bicubic")->capture_default_str();
    sr_cmd->add_option("--out", sr.out, "Reconstructed image (P5/P6)")->capture_default_str();
    sr_cmd->add_option("--metrics", sr.metrics, "Metrics JSON")->capture_default_str();
    sr_cmd->add_option("--save-lr", sr.save_lr, "Also write the degraded input here");

    BenchCliOptions bn;
    auto* bn_cmd = app.add_subcommand("bench", "Latency of exact ST, top-k ST, softmax and the JVP");
    bn_cmd->add_option("--ops", bn.ops, "Operations")->delimiter(',')->capture_default_str();
    bn_cmd->add_option("--lengths", bn.bench.lengths, "Vector lengths")->delimiter(',')->capture_default_str();
    bn_cmd->add_option("--k", bn.bench.k, "Top-k size")->capture_default_str();
    bn_cmd->add_option("--reps", bn.bench.reps, "Timed repetitions")->capture_default_str();
    bn_cmd->add_option("--warmup", bn.bench.warmup, "Untimed warm-up calls")->capture_default_str();
    bn_cmd->add_option("--csv", bn.csv, "Output CSV (relative to --output-dir)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*st_cmd) {
            return run_st_eval(st);
        }
        if (*gc_cmd) {
            return run_gradcheck_cmd(gc, global);
        }
        if (*fl_cmd) {
            return run_flatness_cmd(fl, global);
        }
        if (*sb_cmd) {
            return run_support_bound_cmd(sb, global);
        }
        if (*sr_cmd) {
            return run_sr_demo(sr, global);
        }
        if (*bn_cmd) {
            return run_bench_cmd(bn, global);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
