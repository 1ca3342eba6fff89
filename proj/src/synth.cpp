#include "slowmo/synth.hpp"

#include "slowmo/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using nlohmann::json;

namespace slowmo {

namespace {

constexpr const char* kModule = "synth";

enum Stream : std::uint64_t { kShakeStream = 1, kNoiseStream = 2, kOccluderStream = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

void validate(const ScenarioSpec& s) {
    if (s.samples_per_period < 3) fail(ErrorKind::Argument, kModule, "samples_per_period must be at least 3");
    if (s.cycles < 4) fail(ErrorKind::Argument, kModule, "need at least 4 cycles");
    if (s.kind != ScenarioKind::Cosine1D && (s.height < 8 || s.width < 8))
        fail(ErrorKind::Argument, kModule, "image scenarios need at least 8x8 pixels");
    const auto& c = s.corruption;
    if (c.shake_px < 0 || c.noise_sigma < 0 || c.occluder_size < 0)
        fail(ErrorKind::Argument, kModule, "corruption parameters must be non-negative");
}

double coverage(double signed_distance) { return std::clamp(0.5 - signed_distance, 0.0, 1.0); }

struct Rgb {
    double r, g, b;
};

constexpr Rgb kBackgroundTop{0.10, 0.14, 0.22};
constexpr Rgb kBackgroundBottom{0.30, 0.26, 0.20};

void paint(std::vector<double>& img, int w, int x, int y, const Rgb& c, double a) {
    double* p = &img[(static_cast<std::size_t>(y) * w + x) * 3];
    p[0] = (1 - a) * p[0] + a * c.r;
    p[1] = (1 - a) * p[1] + a * c.g;
    p[2] = (1 - a) * p[2] + a * c.b;
}

std::vector<double> background(int h, int w) {
    std::vector<double> img(static_cast<std::size_t>(h) * w * 3);
    for (int y = 0; y < h; ++y) {
        const double s = h > 1 ? static_cast<double>(y) / (h - 1) : 0.0;
        for (int x = 0; x < w; ++x) {
            double* p = &img[(static_cast<std::size_t>(y) * w + x) * 3];
            p[0] = (1 - s) * kBackgroundTop.r + s * kBackgroundBottom.r;
            p[1] = (1 - s) * kBackgroundTop.g + s * kBackgroundBottom.g;
            p[2] = (1 - s) * kBackgroundTop.b + s * kBackgroundBottom.b;
        }
    }
    return img;
}

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax;
    const double vy = by - ay;
    const double t = std::clamp(((px - ax) * vx + (py - ay) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
    return std::hypot(px - ax - t * vx, py - ay - t * vy);
}

double bilinear(const FrameSequence& seq, std::size_t f, double x, double y, int c) {
    x = std::clamp(x, 0.0, seq.width() - 1.0);
    y = std::clamp(y, 0.0, seq.height() - 1.0);
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, seq.width() - 1);
    const int y1 = std::min(y0 + 1, seq.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    return (1 - fy) * ((1 - fx) * seq.at(f, y0, x0, c) + fx * seq.at(f, y0, x1, c)) +
           fy * ((1 - fx) * seq.at(f, y1, x0, c) + fx * seq.at(f, y1, x1, c));
}

FrameSequence apply_shake(const FrameSequence& in, const CorruptionSpec& c, std::uint64_t seed) {
    auto rng = make_rng(seed, kShakeStream);
    FrameSequence out(in.height(), in.width(), in.channels(), in.name(), in.frame_rate());
    const double half = c.shake_px / 2.0;
    std::uniform_real_distribution<double> offset(-half, half);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (std::size_t f = 0; f < in.size(); ++f) {
        std::vector<double> frame(in.frame_size());
        if (c.shake_mode == ShakeMode::Translate) {
            const double dx = offset(rng);
            const double dy = offset(rng);
            for (int y = 0; y < in.height(); ++y)
                for (int x = 0; x < in.width(); ++x)
                    for (int ch = 0; ch < in.channels(); ++ch)
                        frame[(static_cast<std::size_t>(y) * in.width() + x) * in.channels() + ch] =
                            bilinear(in, f, x - dx, y - dy, ch);
        } else {
            // Linear motion blur of length shake_px along a random direction.
            const double a = angle(rng);
            const int taps = std::max(1, static_cast<int>(std::lround(c.shake_px)));
            for (int y = 0; y < in.height(); ++y)
                for (int x = 0; x < in.width(); ++x)
                    for (int ch = 0; ch < in.channels(); ++ch) {
                        double acc = 0.0;
                        for (int t = 0; t < taps; ++t) {
                            const double s = taps == 1 ? 0.0 : (t / (taps - 1.0) - 0.5) * c.shake_px;
                            acc += bilinear(in, f, x + s * std::cos(a), y + s * std::sin(a), ch);
                        }
                        frame[(static_cast<std::size_t>(y) * in.width() + x) * in.channels() + ch] = acc / taps;
                    }
        }
        out.push_back(std::move(frame));
    }
    return out;
}

void apply_occluder(FrameSequence& seq, const CorruptionSpec& c) {
    auto rng = make_rng(c.occluder_seed, kOccluderStream);
    const int s = std::min({c.occluder_size, seq.height(), seq.width()});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Rgb color{unit(rng), unit(rng), unit(rng)};
    int px = std::uniform_int_distribution<int>(0, seq.width() - s)(rng);
    int py = std::uniform_int_distribution<int>(0, seq.height() - s)(rng);
    const int stride = std::max(1, s / 4);
    std::uniform_int_distribution<int> step(-stride, stride);
    for (std::size_t f = 0; f < seq.size(); ++f) {
        for (int y = py; y < py + s; ++y)
            for (int x = px; x < px + s; ++x) {
                if (seq.channels() == 3) {
                    seq.at(f, y, x, 0) = color.r;
                    seq.at(f, y, x, 1) = color.g;
                    seq.at(f, y, x, 2) = color.b;
                } else {
                    seq.at(f, y, x, 0) = color.r;
                }
            }
        px = std::clamp(px + step(rng), 0, seq.width() - s);
        py = std::clamp(py + step(rng), 0, seq.height() - s);
    }
}

void apply_noise(FrameSequence& seq, double sigma, std::uint64_t seed, bool clamp) {
    auto rng = make_rng(seed, kNoiseStream);
    std::normal_distribution<double> noise(0.0, sigma);
    for (std::size_t f = 0; f < seq.size(); ++f)
        for (double& v : seq.frame(f)) {
            v += noise(rng);
            if (clamp) v = std::clamp(v, 0.0, 1.0);
        }
}

}  // namespace

std::vector<double> render_clean(const ScenarioSpec& spec, double phase) {
    const double s = wrap_angle(phase) / kTwoPi;
    if (spec.kind == ScenarioKind::Cosine1D) return {std::cos(phase)};

    const int h = spec.height;
    const int w = spec.width;
    const double unit = std::min(h, w);
    std::vector<double> img = background(h, w);

    switch (spec.kind) {
    case ScenarioKind::BouncingDisk: {
        // Parabolic hop with a sideways sway, one bounce per cycle.
        const double r = 0.12 * unit;
        const double cx = 0.5 * w + 0.25 * w * std::sin(kTwoPi * s);
        const double cy = (h - 1.0 - r - 1.0) - 0.55 * h * 4.0 * s * (1.0 - s);
        const Rgb color{0.95, 0.62, 0.18};
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double a = coverage(std::hypot(x - cx, y - cy) - r);
                if (a > 0) paint(img, w, x, y, color, a);
            }
        break;
    }
    case ScenarioKind::PendulumBar: {
        const double theta = 0.7 * std::sin(kTwoPi * s);
        const double ax = 0.5 * w;
        const double ay = 0.12 * h;
        const double len = 0.7 * h;
        const double bx = ax + len * std::sin(theta);
        const double by = ay + len * std::cos(theta);
        const double half_width = 0.04 * unit;
        const double bob = 0.09 * unit;
        const Rgb bar{0.85, 0.85, 0.90};
        const Rgb weight{0.20, 0.75, 0.45};
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double a = coverage(segment_distance(x, y, ax, ay, bx, by) - half_width);
                if (a > 0) paint(img, w, x, y, bar, a);
                const double b = coverage(std::hypot(x - bx, y - by) - bob);
                if (b > 0) paint(img, w, x, y, weight, b);
            }
        break;
    }
    case ScenarioKind::PulsingBlob: {
        // Radius and hue both cycle so the frames trace a loop on their own.
        const double r = 0.16 * unit * (1.0 + 0.4 * std::sin(kTwoPi * s));
        const Rgb color{0.5 + 0.45 * std::cos(kTwoPi * s), 0.35, 0.5 - 0.45 * std::cos(kTwoPi * s)};
        const double cx = 0.5 * (w - 1);
        const double cy = 0.5 * (h - 1);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                paint(img, w, x, y, color, std::exp(-d2 / (2.0 * r * r)));
            }
        break;
    }
    case ScenarioKind::Cosine1D:
        break;
    }
    return img;
}

Scenario generate(const ScenarioSpec& spec) {
    validate(spec);
    const int n = spec.cycles * spec.samples_per_period;
    const bool image = spec.kind != ScenarioKind::Cosine1D;
    Scenario sc;
    sc.frames = image ? FrameSequence(spec.height, spec.width, 3, to_string(spec.kind))
                      : FrameSequence(1, 1, 1, to_string(spec.kind));
    sc.truth_phase.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double phase = kTwoPi * (t % spec.samples_per_period) / spec.samples_per_period;
        sc.truth_phase[static_cast<std::size_t>(t)] = phase;
        sc.frames.push_back(render_clean(spec, phase));
    }
    const auto& c = spec.corruption;
    if (image && c.shake_px > 0) sc.frames = apply_shake(sc.frames, c, spec.seed);
    if (image && c.occluder_size > 0) apply_occluder(sc.frames, c);
    if (c.noise_sigma > 0) apply_noise(sc.frames, c.noise_sigma, spec.seed, image);
    return sc;
}

PhaseAlignment align_phases(std::span<const double> estimated, std::span<const double> truth) {
    if (estimated.size() != truth.size()) fail(ErrorKind::Argument, kModule, "phase sequences differ in length");
    if (estimated.size() < 3) fail(ErrorKind::Argument, kModule, "need at least 3 phases");
    const auto n = static_cast<double>(estimated.size());

    PhaseAlignment best{std::numeric_limits<double>::infinity(), 1, 0.0};
    auto consider = [&best](double cost, int sign, double delta) {
        if (cost < best.error_deg) best = {cost, sign, wrap_angle(delta)};
    };
    for (int sign : {1, -1}) {
        auto cost = [&](double delta) {
            double sum = 0.0;
            for (std::size_t i = 0; i < estimated.size(); ++i)
                sum += circular_distance(sign * estimated[i] + delta, truth[i]);
            return sum / n;
        };
        constexpr int kGrid = 720;
        const double step = kTwoPi / kGrid;
        int arg = 0;
        double grid_best = std::numeric_limits<double>::infinity();
        for (int g = 0; g < kGrid; ++g) {
            const double c = cost(g * step);
            if (c < grid_best) {
                grid_best = c;
                arg = g;
            }
        }
        // Golden-section search on the bracketing grid cells.
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = (arg - 1) * step;
        double hi = (arg + 1) * step;
        double x1 = hi - inv_phi * (hi - lo);
        double x2 = lo + inv_phi * (hi - lo);
        double f1 = cost(x1);
        double f2 = cost(x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = cost(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = cost(x2);
            }
        }
        consider(grid_best, sign, arg * step);
        consider(f1, sign, x1);
        consider(f2, sign, x2);
    }
    best.error_deg *= 180.0 / std::numbers::pi;
    return best;
}

double angular_error(std::span<const double> estimated, std::span<const double> truth) {
    return align_phases(estimated, truth).error_deg;
}

ScenarioKind parse_kind(const std::string& name) {
    if (name == "bouncing-disk") return ScenarioKind::BouncingDisk;
    if (name == "pendulum-bar") return ScenarioKind::PendulumBar;
    if (name == "pulsing-blob") return ScenarioKind::PulsingBlob;
    if (name == "1d-cosine") return ScenarioKind::Cosine1D;
    fail(ErrorKind::Argument, kModule, "unknown scenario kind '" + name + "'");
}

std::string to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::BouncingDisk: return "bouncing-disk";
    case ScenarioKind::PendulumBar: return "pendulum-bar";
    case ScenarioKind::PulsingBlob: return "pulsing-blob";
    case ScenarioKind::Cosine1D: return "1d-cosine";
    }
    return "unknown";
}

ScenarioSpec spec_from_json(const json& j) {
    try {
        ScenarioSpec s;
        s.kind = parse_kind(j.at("kind").get<std::string>());
        s.cycles = j.value("cycles", s.cycles);
        s.samples_per_period = j.value("samples_per_period", s.samples_per_period);
        s.height = j.value("height", s.height);
        s.width = j.value("width", s.width);
        s.seed = j.value("seed", s.seed);
        s.corruption.shake_px = j.value("shake_px", 0.0);
        s.corruption.noise_sigma = j.value("noise_sigma", 0.0);
        s.corruption.occluder_size = j.value("occluder_size", 0);
        s.corruption.occluder_seed = j.value("occluder_seed", std::uint64_t{0});
        const std::string mode = j.value("shake_mode", std::string("translate"));
        if (mode == "blur")
            s.corruption.shake_mode = ShakeMode::Blur;
        else if (mode != "translate")
            fail(ErrorKind::Argument, kModule, "shake_mode must be translate or blur");
        if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
        return s;
    } catch (const json::exception& e) {
        fail(ErrorKind::Argument, kModule, std::string("malformed scenario: ") + e.what());
    }
}

std::vector<ScenarioSpec> grid_from_json(const json& j) {
    std::vector<ScenarioSpec> grid;
    if (j.is_array()) {
        for (const auto& e : j) grid.push_back(spec_from_json(e));
        return grid;
    }
    if (!j.is_object()) fail(ErrorKind::Argument, kModule, "grid must be an array or an object");
    if (!j.contains("scenarios") && !j.contains("base"))
        fail(ErrorKind::Argument, kModule, "grid object needs a \"scenarios\" array or a \"base\" scenario");
    if (j.contains("scenarios"))
        for (const auto& e : j.at("scenarios")) grid.push_back(spec_from_json(e));
    if (j.contains("base")) {
        // Cartesian product of every listed value; keys in alphabetical order, the last varying fastest.
        std::vector<json> combos{j.at("base")};
        if (j.contains("vary")) {
            for (const auto& [key, values] : j.at("vary").items()) {
                if (!values.is_array() || values.empty())
                    fail(ErrorKind::Argument, kModule, "vary." + key + " must be a nonempty array");
                std::vector<json> next;
                for (const auto& c : combos)
                    for (const auto& v : values) {
                        json e = c;
                        e[key] = v;
                        next.push_back(std::move(e));
                    }
                combos = std::move(next);
            }
        }
        for (const auto& c : combos) grid.push_back(spec_from_json(c));
    }
    return grid;
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<BenchmarkRow> run_benchmark(const std::vector<ScenarioSpec>& grid, const PipelineConfig& cfg, int trials) {
    if (trials < 1) fail(ErrorKind::Argument, kModule, "trials must be positive");
    std::vector<BenchmarkRow> rows;
    for (const ScenarioSpec& base : grid) {
        validate(base);
        // errors[trial][windowed]
        std::vector<std::array<double, 2>> errors(static_cast<std::size_t>(trials));
        parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
            ScenarioSpec spec = base;
            spec.seed = trial_seed(base.seed, t);
            spec.corruption.occluder_seed = trial_seed(base.corruption.occluder_seed ^ 0x9e3779b97f4a7c15ULL, t);
            const Scenario sc = generate(spec);
            for (int windowed = 0; windowed < 2; ++windowed) {
                PipelineConfig pc = cfg;
                pc.alpha = base.alpha.value_or(cfg.alpha);
                pc.windowed = windowed == 1;
                pc.seed = spec.seed;
                double err = std::numeric_limits<double>::quiet_NaN();
                try {
                    const Analysis a = analyze(sc.frames, pc);
                    err = angular_error(a.phi, std::span<const double>(sc.truth_phase).first(a.phi.size()));
                } catch (const Error&) {
                }
                errors[t][static_cast<std::size_t>(windowed)] = err;
            }
        });
        for (int windowed = 1; windowed >= 0; --windowed) {
            BenchmarkRow row;
            row.scenario = to_string(base.kind);
            row.shake = base.corruption.shake_px;
            row.sigma = base.corruption.noise_sigma;
            row.occluder = base.corruption.occluder_size;
            row.alpha = base.alpha.value_or(cfg.alpha);
            row.windowed = windowed == 1;
            double sum = 0.0;
            double sum2 = 0.0;
            int ok = 0;
            for (const auto& e : errors) {
                const double v = e[static_cast<std::size_t>(windowed)];
                row.trial_errors.push_back(v);
                if (std::isnan(v)) {
                    ++row.failures;
                    continue;
                }
                sum += v;
                sum2 += v * v;
                ++ok;
            }
            row.mean_deg = ok ? sum / ok : std::numeric_limits<double>::quiet_NaN();
            row.std_deg = ok ? std::sqrt(std::max(0.0, sum2 / ok - row.mean_deg * row.mean_deg))
                             : std::numeric_limits<double>::quiet_NaN();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
    std::ostringstream out;
    out << "scenario,shake,sigma,occluder,alpha,windowed,mean_deg,std_deg,failures\n";
    auto num = [](double v) {
        if (std::isnan(v)) return std::string("nan");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    for (const auto& r : rows)
        out << r.scenario << ',' << num(r.shake) << ',' << num(r.sigma) << ',' << r.occluder << ',' << num(r.alpha)
            << ',' << (r.windowed ? 1 : 0) << ',' << num(r.mean_deg) << ',' << num(r.std_deg) << ',' << r.failures
            << '\n';
    return out.str();
}

}  // namespace slowmo
