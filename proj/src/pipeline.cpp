#include "slowmo/pipeline.hpp"

#include "slowmo/common.hpp"

#include <algorithm>
#include <cmath>

using nlohmann::json;

namespace slowmo {

namespace {

constexpr const char* kModule = "pipeline";

json rounded(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(round_sig9(x));
    return a;
}

json optional_real(const std::optional<double>& v) { return v ? json(round_sig9(*v)) : json(nullptr); }

void append(std::vector<std::string>& dst, const std::vector<std::string>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

// Steps shared by frame and point-cloud inputs: persistence, scale,
// Laplacian, eigenvector pair, phases and cycle count.
void recover_phase(const PointCloud& windows, int n_frames, const PipelineConfig& cfg, Analysis& a) {
    a.window_count = static_cast<int>(windows.size());
    const Eigen::MatrixXd dist = pairwise_distances(windows);

    RipsOptions rips;
    rips.field_char = cfg.field_char;
    rips.max_points = cfg.subsample_cap;
    if (windows.size() > cfg.subsample_cap) {
        const auto sub = subsample_maxmin(windows, cfg.subsample_cap, cfg.seed);
        a.rips_points = cfg.subsample_cap;
        a.diagram = rips_persistence_h1(pairwise_distances(sub), rips);
    } else {
        a.rips_points = a.window_count;
        a.diagram = rips_persistence_h1(dist, rips);
    }
    a.scale = select_scale(a.diagram, cfg.alpha);
    if (a.diagram.pairs.size() >= 2) {
        const double top = a.diagram.pairs[0].persistence();
        const double runner_up = a.diagram.pairs[1].persistence();
        if (top < cfg.min_dominance * runner_up)
            fail(ErrorKind::NoCycle, "tda",
                 "no 1-cycles found (dominant persistence " + std::to_string(top) + " vs runner-up " +
                     std::to_string(runner_up) + ")");
    }

    const LaplacianGraph graph = build_adjacency(dist, a.scale.sigma, cfg.mode, cfg.kernel);
    const Eigenpairs eig = smallest_eigenpairs(graph.laplacian, cfg.eigen_count);
    append(a.warnings, eig.warnings);
    if (eig.values.size() < 2) fail(ErrorKind::NoCycle, "spectral", "no 1-cycles found (graph has no usable eigenpair)");
    a.eigenvalues.assign(eig.values.data(), eig.values.data() + eig.values.size());
    a.pair = select_eigenpair(eig);
    append(a.warnings, a.pair.warnings);

    const Eigen::VectorXd va = eig.vectors.col(a.pair.a);
    const Eigen::VectorXd vb = eig.vectors.col(a.pair.b);
    a.phi = circular_phase(std::span<const double>(va.data(), static_cast<std::size_t>(va.size())),
                           std::span<const double>(vb.data(), static_cast<std::size_t>(vb.size())));
    const UnwrappedPhase un = unwrap_and_orient(a.phi);
    a.Phi = un.Phi;
    a.direction = un.direction;
    a.k_est = estimate_cycle_count(a.Phi, n_frames, a.d);
}

FrameSequence analysis_frames(const FrameSequence& seq, const PipelineConfig& cfg, int& level) {
    level = std::clamp(cfg.pyramid_level, 0, max_pyramid_level(seq.height(), seq.width()));
    return gaussian_pyramid_level(seq, level);
}

}  // namespace

const char* to_string(LaplacianMode mode) { return mode == LaplacianMode::Weighted ? "weighted" : "unweighted"; }
const char* to_string(KernelKind kind) { return kind == KernelKind::Gaussian ? "gaussian" : "raw"; }

PeriodEstimate estimate_sequence_period(const FrameSequence& seq, const PipelineConfig& cfg) {
    int level = 0;
    const PointCloud z = project_isometric(analysis_frames(seq, cfg, level));
    const int k = std::clamp(cfg.n_neighbors, 1, static_cast<int>(z.size()) - 1);
    const Surrogate s = isomap_1d(z, k);
    return estimate_period(s.signal);
}

Analysis analyze(const FrameSequence& seq, const PipelineConfig& cfg) {
    if (seq.size() < 8) fail(ErrorKind::Argument, kModule, "need at least 8 frames");
    Analysis a;
    a.name = seq.name();
    a.n_frames = static_cast<int>(seq.size());
    const FrameSequence small = analysis_frames(seq, cfg, a.pyramid_level);
    const PointCloud z = project_isometric(small);
    a.projected_dim = static_cast<int>(z.dim());

    const int k = std::clamp(cfg.n_neighbors, 1, a.n_frames - 1);
    const Surrogate s = isomap_1d(z, k);
    append(a.warnings, s.warnings);
    const PeriodEstimate period = estimate_period(s.signal);
    a.T = period.T;
    a.confidence = period.confidence;

    if (cfg.windowed) {
        int d = cfg.window_dim.value_or(choose_window_dim(period.T));
        d = std::clamp(d, 2, a.n_frames / 2);
        a.d = d;
        recover_phase(sliding_window(z, d).cloud, a.n_frames, cfg, a);
    } else {
        a.d = 1;
        recover_phase(z, a.n_frames, cfg, a);
    }
    return a;
}

Analysis analyze_cloud(const PointCloud& cloud, const PipelineConfig& cfg) {
    if (cloud.size() < 4) fail(ErrorKind::Argument, kModule, "need at least 4 points");
    Analysis a;
    a.name = "point-cloud";
    a.n_frames = static_cast<int>(cloud.size());
    a.projected_dim = static_cast<int>(cloud.dim());
    a.d = 1;
    recover_phase(cloud, a.n_frames, cfg, a);
    return a;
}

int default_template_frames(const Analysis& analysis) {
    const double t = analysis.T.value_or(analysis.n_frames / std::max(analysis.k_est, 1.0));
    return std::max(2, 4 * static_cast<int>(std::lround(t)));
}

double default_ghost_gap(const Analysis& analysis) {
    const double t = analysis.T.value_or(analysis.n_frames / std::max(analysis.k_est, 1.0));
    return t / 4.0;
}

TemplateResult synthesize_template(const FrameSequence& seq, const Analysis& analysis, const PipelineConfig& cfg) {
    if (static_cast<int>(seq.size()) != analysis.n_frames)
        fail(ErrorKind::Argument, kModule,
             "analysis covers " + std::to_string(analysis.n_frames) + " frames but input has " +
                 std::to_string(seq.size()));
    TemplateConfig tc;
    tc.M = cfg.frames_M.value_or(default_template_frames(analysis));
    tc.F = cfg.ghost_gap.value_or(default_ghost_gap(analysis));
    return synthesize(seq, analysis.Phi, synthesis_cycle_count(analysis), analysis.d, tc);
}

double synthesis_cycle_count(const Analysis& analysis) {
    const auto w = static_cast<double>(analysis.Phi.size());
    return w > 1 ? analysis.k_est * w / (w - 1) : analysis.k_est;
}

json analysis_to_json(const Analysis& a, const PipelineConfig& cfg) {
    json j;
    j["schema"] = "1";
    j["name"] = a.name;
    j["N"] = a.n_frames;
    j["pyramid_level"] = a.pyramid_level;
    j["projected_dim"] = a.projected_dim;
    j["T"] = optional_real(a.T);
    j["confidence"] = optional_real(a.confidence);
    j["d"] = a.d;
    j["window_count"] = a.window_count;
    j["rips_points"] = a.rips_points;
    j["field_char"] = a.diagram.field_char;
    json diagram = json::array();
    for (const auto& p : a.diagram.pairs) {
        json e{{"birth", round_sig9(p.birth)}};
        e["death"] = p.essential ? json(nullptr) : json(round_sig9(p.death));
        diagram.push_back(e);
    }
    j["diagram"] = diagram;
    j["alpha"] = round_sig9(a.scale.alpha);
    j["sigma"] = round_sig9(a.scale.sigma);
    j["chosen_pair"] = {{"birth", round_sig9(a.scale.chosen.birth)}, {"death", round_sig9(a.scale.chosen.death)}};
    j["laplacian"] = to_string(cfg.mode);
    j["kernel"] = to_string(cfg.kernel);
    j["eigenvalues"] = rounded(a.eigenvalues);
    j["zero_crossings"] = a.pair.zero_crossings;
    j["eigen_pair"] = {a.pair.a, a.pair.b};
    j["eigen_pair_fallback"] = a.pair.fallback;
    j["phi"] = rounded(a.phi);
    j["Phi"] = rounded(a.Phi);
    j["direction"] = a.direction;
    j["k_est"] = round_sig9(a.k_est);
    j["warnings"] = a.warnings;
    return j;
}

Analysis analysis_from_json(const json& j) {
    try {
        if (j.at("schema").get<std::string>() != "1")
            fail(ErrorKind::Argument, kModule, "unsupported analysis schema " + j.at("schema").get<std::string>());
        Analysis a;
        a.name = j.value("name", "");
        a.n_frames = j.at("N").get<int>();
        a.pyramid_level = j.value("pyramid_level", 0);
        a.projected_dim = j.value("projected_dim", 0);
        if (!j.at("T").is_null()) a.T = j.at("T").get<double>();
        if (!j.at("confidence").is_null()) a.confidence = j.at("confidence").get<double>();
        a.d = j.at("d").get<int>();
        a.window_count = j.at("window_count").get<int>();
        a.rips_points = j.value("rips_points", 0);
        a.diagram.field_char = j.value("field_char", 47);
        for (const auto& e : j.at("diagram")) {
            PersistencePair p;
            p.birth = e.at("birth").get<double>();
            if (e.at("death").is_null()) {
                p.essential = true;
                p.death = std::numeric_limits<double>::infinity();
            } else {
                p.death = e.at("death").get<double>();
            }
            a.diagram.pairs.push_back(p);
        }
        a.scale.alpha = j.at("alpha").get<double>();
        a.scale.sigma = j.at("sigma").get<double>();
        a.scale.chosen.birth = j.at("chosen_pair").at("birth").get<double>();
        a.scale.chosen.death = j.at("chosen_pair").at("death").get<double>();
        a.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        a.pair.zero_crossings = j.at("zero_crossings").get<std::vector<int>>();
        a.pair.a = j.at("eigen_pair").at(0).get<int>();
        a.pair.b = j.at("eigen_pair").at(1).get<int>();
        a.pair.fallback = j.value("eigen_pair_fallback", false);
        a.phi = j.at("phi").get<std::vector<double>>();
        a.Phi = j.at("Phi").get<std::vector<double>>();
        a.direction = j.at("direction").get<int>();
        a.k_est = j.at("k_est").get<double>();
        a.warnings = j.value("warnings", std::vector<std::string>{});
        if (static_cast<int>(a.Phi.size()) != a.window_count)
            fail(ErrorKind::Argument, kModule, "analysis Phi length does not match window_count");
        return a;
    } catch (const json::exception& e) {
        fail(ErrorKind::Argument, kModule, std::string("malformed analysis: ") + e.what());
    }
}

json template_to_json(const TemplateResult& r, double ghost_gap) {
    json j;
    j["schema"] = "1";
    j["M"] = r.frames.size();
    j["F"] = std::isfinite(ghost_gap) ? json(round_sig9(ghost_gap)) : json(nullptr);
    j["k_est"] = round_sig9(r.k_est);
    j["contributors"] = r.contributors;
    std::vector<int> holes(r.holes.begin(), r.holes.end());
    j["holes"] = holes;
    j["phases"] = rounded(r.phases);
    return j;
}

}  // namespace slowmo
