#pragma once

#include "slowmo/geometry.hpp"
#include "slowmo/period.hpp"
#include "slowmo/spectral.hpp"
#include "slowmo/tda.hpp"
#include "slowmo/template.hpp"
#include "slowmo/videoio.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slowmo {

struct PipelineConfig {
    double alpha = 0.5;
    int field_char = 47;
    LaplacianMode mode = LaplacianMode::Weighted;
    KernelKind kernel = KernelKind::Gaussian;
    int pyramid_level = 2;           ///< clamped to what the frame size allows
    std::optional<int> frames_M;     ///< default 4 * round(T)
    std::optional<double> ghost_gap; ///< default T / 4
    int subsample_cap = 400;
    int n_neighbors = 10;
    int eigen_count = 10;
    /// A diagram whose top persistence is below this multiple of the runner-up
    /// is treated as having no cycle. Zero disables the check.
    double min_dominance = 0.0;
    bool windowed = true;            ///< false: phases straight from frames (d = 1)
    std::optional<int> window_dim;   ///< overrides the period-derived d
    std::uint64_t seed = 0;
};

struct Analysis {
    std::string name;
    int n_frames = 0;
    int pyramid_level = 0;
    int projected_dim = 0;
    std::optional<double> T;
    std::optional<double> confidence;
    int d = 1;
    int window_count = 0;
    int rips_points = 0;
    PersistenceDiagram diagram;
    ScaleSelection scale;
    std::vector<double> eigenvalues;
    EigenpairChoice pair;
    std::vector<double> phi;
    std::vector<double> Phi;
    int direction = 1;
    double k_est = 0.0;
    std::vector<std::string> warnings;
};

/// Projection (after the pyramid) and period estimate of a sequence.
PeriodEstimate estimate_sequence_period(const FrameSequence& seq, const PipelineConfig& cfg);

/// Period, window dimension, persistence, scale, Laplacian phases and the
/// cycle count of a frame sequence or a 1x1x1 signal.
Analysis analyze(const FrameSequence& seq, const PipelineConfig& cfg);

/// Phase recovery for an already embedded cloud; rows are treated as windows
/// of one frame each.
Analysis analyze_cloud(const PointCloud& cloud, const PipelineConfig& cfg);

/// Synthesizes the template from the original frames and a prior analysis.
TemplateResult synthesize_template(const FrameSequence& seq, const Analysis& analysis, const PipelineConfig& cfg);

/// Cycle count used for the per-frame phase step. The span of W unwrapped
/// window phases covers W - 1 steps, so k_est is rescaled by W / (W - 1).
double synthesis_cycle_count(const Analysis& analysis);

int default_template_frames(const Analysis& analysis);
double default_ghost_gap(const Analysis& analysis);

/// analysis.json, schema "1". Reals are rounded to 9 significant digits.
nlohmann::json analysis_to_json(const Analysis& analysis, const PipelineConfig& cfg);
Analysis analysis_from_json(const nlohmann::json& j);

/// template.json: M, F, k_est, contributors, holes, phases.
nlohmann::json template_to_json(const TemplateResult& result, double ghost_gap);

const char* to_string(LaplacianMode mode);
const char* to_string(KernelKind kind);

}  // namespace slowmo
