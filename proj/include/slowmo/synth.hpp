#pragma once

#include "slowmo/pipeline.hpp"
#include "slowmo/videoio.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slowmo {

enum class ScenarioKind { BouncingDisk, PendulumBar, PulsingBlob, Cosine1D };
enum class ShakeMode { Translate, Blur };

struct CorruptionSpec {
    double shake_px = 0.0;      ///< translation range (or blur width) in pixels
    double noise_sigma = 0.0;   ///< Gaussian noise on [0, 1] pixel values
    int occluder_size = 0;      ///< side of the random-walk square
    std::uint64_t occluder_seed = 0;
    ShakeMode shake_mode = ShakeMode::Translate;
};

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::BouncingDisk;
    int cycles = 10;
    int samples_per_period = 20;
    int height = 64;
    int width = 64;
    std::uint64_t seed = 0;
    CorruptionSpec corruption;
    std::optional<double> alpha;  ///< per-scenario override in benchmark grids
};

struct Scenario {
    FrameSequence frames;
    std::vector<double> truth_phase;  ///< 2*pi*t / samples_per_period, wrapped
};

/// Renders the spec and applies shake, then occluder, then noise. Image
/// scenes are clamped to [0, 1]; the 1-D cosine is left unclamped and
/// ignores shake and occluders.
Scenario generate(const ScenarioSpec& spec);

/// One noiseless, unshaken frame of the scene at a continuous phase.
std::vector<double> render_clean(const ScenarioSpec& spec, double phase);

struct PhaseAlignment {
    double error_deg = 0.0;
    int sign = 1;       ///< truth ~ sign * estimated + offset
    double offset = 0.0;
};

/// Best global offset and orientation mapping estimated phases onto truth.
PhaseAlignment align_phases(std::span<const double> estimated, std::span<const double> truth);

/// Mean circular distance in degrees after the best global offset and
/// orientation (720-step grid plus golden-section refinement).
double angular_error(std::span<const double> estimated, std::span<const double> truth);

ScenarioKind parse_kind(const std::string& name);
std::string to_string(ScenarioKind kind);
ScenarioSpec spec_from_json(const nlohmann::json& j);

/// Accepts an array of scenarios, or an object with "scenarios" and/or a
/// "base" scenario expanded over every combination in "vary".
std::vector<ScenarioSpec> grid_from_json(const nlohmann::json& j);

struct BenchmarkRow {
    std::string scenario;
    double shake = 0.0;
    double sigma = 0.0;
    int occluder = 0;
    double alpha = 0.0;
    bool windowed = true;
    double mean_deg = 0.0;
    double std_deg = 0.0;
    int failures = 0;
    std::vector<double> trial_errors;  ///< NaN where the pipeline failed
};

/// Seed of trial `trial` derived from the base seed through std::seed_seq.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial);

/// Runs every scenario `trials` times, windowed and with d = 1, and reports
/// the angular error of the recovered window phases.
std::vector<BenchmarkRow> run_benchmark(const std::vector<ScenarioSpec>& grid, const PipelineConfig& cfg, int trials);

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

}  // namespace slowmo
