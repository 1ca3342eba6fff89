#include "slowmo/common.hpp"
#include "slowmo/pipeline.hpp"
#include "slowmo/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slowmo;

namespace {

struct Options {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    int pyramid_level = 2;
    double alpha = 0.5;
    int field_char = 47;
    std::string laplacian = "weighted";
    std::string kernel = "gaussian";
    std::optional<int> frames;
    std::optional<double> ghost_gap;
    int subsample_cap = 400;
};

void add_pipeline_flags(CLI::App* app, Options& o) {
    app->add_option("--seed", o.seed, "Random seed (subsampling, benchmark trials)")->capture_default_str();
    app->add_option("--threads", o.threads, "Worker threads, 0 = all cores")->capture_default_str();
    app->add_option("--pyramid-level", o.pyramid_level, "Gaussian pyramid level used for analysis")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--alpha", o.alpha, "Scale blend: sigma = alpha*birth + (1-alpha)*death")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--field-char", o.field_char, "Prime field characteristic for persistence")->capture_default_str();
    app->add_option("--laplacian", o.laplacian, "Adjacency mode")
        ->check(CLI::IsMember({"weighted", "unweighted"}))
        ->capture_default_str();
    app->add_option("--kernel", o.kernel, "Weighted kernel: gaussian exp(-d^2/2s^2) or raw exp(-d/2s^2)")
        ->check(CLI::IsMember({"gaussian", "raw"}))
        ->capture_default_str();
    app->add_option("--frames", o.frames, "Template frames M")->check(CLI::Range(2, 1 << 20))->default_str("4*round(T)");
    app->add_option("--ghost-gap", o.ghost_gap, "Max frame-time gap F of interpolation endpoints")
        ->check(CLI::PositiveNumber)
        ->default_str("T/4");
    app->add_option("--subsample-cap", o.subsample_cap, "Max points passed to persistence")
        ->check(CLI::Range(3, 1 << 20))
        ->capture_default_str();
}

PipelineConfig make_config(const Options& o) {
    set_thread_count(o.threads);
    PipelineConfig cfg;
    cfg.seed = o.seed;
    cfg.pyramid_level = o.pyramid_level;
    cfg.alpha = o.alpha;
    cfg.field_char = o.field_char;
    cfg.mode = o.laplacian == "unweighted" ? LaplacianMode::Unweighted : LaplacianMode::Weighted;
    cfg.kernel = o.kernel == "raw" ? KernelKind::Raw : KernelKind::Gaussian;
    cfg.frames_M = o.frames;
    cfg.ghost_gap = o.ghost_gap;
    cfg.subsample_cap = o.subsample_cap;
    return cfg;
}

bool is_csv(const fs::path& p) { return fs::is_regular_file(p) && p.extension() == ".csv"; }

FrameSequence load_input(const fs::path& p) {
    if (!fs::exists(p)) throw Error(ErrorKind::Io, "cli", "input not found: " + p.string());
    if (is_csv(p)) return to_sequence(read_signal_csv(p));
    return load_frame_dir(p);
}

void write_json(const json& j, const std::string& out) {
    const std::string text = j.dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cli", "cannot write " + out);
    f << text;
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw Error(ErrorKind::Io, "cli", "cannot open " + p.string());
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "cli", p.string() + ": " + e.what());
    }
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Aperiodic: return 2;
    case ErrorKind::NoCycle: return 3;
    default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-cycle slow-motion templates from repetitive videos and time series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "slowmo 1.0");

    Options opt;

    auto* period = app.add_subcommand("period", "Estimate the fundamental period; prints {T, confidence}");
    std::string period_input;
    period->add_option("input", period_input, "Frame directory or one-column CSV")->required();
    add_pipeline_flags(period, opt);

    auto* analyze = app.add_subcommand("analyze", "Recover per-window phases; writes analysis.json");
    std::string analyze_input, analyze_out = "-", cloud_csv;
    analyze->add_option("input", analyze_input, "Frame directory or one-column CSV");
    analyze->add_option("--point-cloud-csv", cloud_csv, "Treat rows of this CSV as already embedded windows")
        ->default_str("none");
    analyze->add_option("-o,--out", analyze_out, "Output file, - for stdout")->capture_default_str();
    add_pipeline_flags(analyze, opt);

    auto* synth = app.add_subcommand("synthesize", "Write the single-cycle template");
    std::string synth_input, synth_out, synth_analysis;
    bool synth_raw = false;
    synth->add_option("input", synth_input, "Frame directory or one-column CSV")->required();
    synth->add_option("-o,--out", synth_out, "Output directory")->required();
    synth->add_option("--analysis", synth_analysis, "Reuse this analysis.json instead of recomputing")
        ->default_str("recompute");
    synth->add_flag("--raw", synth_raw, "Also write the lossless float32 container")->capture_default_str();
    add_pipeline_flags(synth, opt);

    auto* eval = app.add_subcommand("eval", "Angular-error benchmark on synthetic scenarios");
    std::string grid_path, report_path = "-";
    int trials = 50;
    eval->add_option("--grid", grid_path, "Scenario grid JSON")->required();
    eval->add_option("--trials", trials, "Trials per scenario")->check(CLI::PositiveNumber)->capture_default_str();
    eval->add_option("--out", report_path, "Report CSV, - for stdout")->capture_default_str();
    add_pipeline_flags(eval, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const PipelineConfig cfg = make_config(opt);

        if (*period) {
            const PeriodEstimate est = estimate_sequence_period(load_input(period_input), cfg);
            json j;
            j["T"] = round_sig9(est.T);
            j["confidence"] = round_sig9(est.confidence);
            write_json(j, "-");
        } else if (*analyze) {
            Analysis a;
            if (!cloud_csv.empty()) {
                a = analyze_cloud(read_point_cloud_csv(cloud_csv), cfg);
            } else {
                if (analyze_input.empty()) throw Error(ErrorKind::Argument, "cli", "analyze needs an input or --point-cloud-csv");
                a = slowmo::analyze(load_input(analyze_input), cfg);
            }
            write_json(analysis_to_json(a, cfg), analyze_out);
        } else if (*synth) {
            const fs::path in = synth_input;
            const FrameSequence seq = load_input(in);
            const Analysis a = synth_analysis.empty() ? slowmo::analyze(seq, cfg) : analysis_from_json(read_json(synth_analysis));
            const TemplateResult r = synthesize_template(seq, a, cfg);
            const fs::path out = synth_out;
            std::error_code ec;
            fs::create_directories(out, ec);
            if (ec) throw Error(ErrorKind::Io, "cli", "cannot create " + out.string());
            if (is_csv(in)) {
                Signal1D s = to_signal(r.frames);
                write_signal_csv(s, out / "template.csv");
            } else {
                write_frames(r.frames, out);
            }
            if (synth_raw) write_raw(r.frames, out);
            json j = template_to_json(r, cfg.ghost_gap.value_or(default_ghost_gap(a)));
            if (synth_analysis.empty()) {
                std::ofstream f(out / "analysis.json", std::ios::binary);
                f << analysis_to_json(a, cfg).dump(2) << "\n";
            }
            write_json(j, (out / "template.json").string());
        } else if (*eval) {
            const auto grid = grid_from_json(read_json(grid_path));
            const auto rows = run_benchmark(grid, cfg, trials);
            const std::string csv = benchmark_csv(rows);
            if (report_path.empty() || report_path == "-") {
                std::cout << csv;
            } else {
                std::ofstream f(report_path, std::ios::binary);
                if (!f) throw Error(ErrorKind::Io, "cli", "cannot write " + report_path);
                f << csv;
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
