#include "slowmo/template.hpp"

#include "slowmo/common.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace slowmo {

namespace {
constexpr const char* kModule = "template";
constexpr double kSnap = 1e-9;

double lower_median(std::vector<double>& v) {
    auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}
}  // namespace

UnwrappedPhase unwrap_and_orient(std::span<const double> phi) {
    if (phi.size() < 3) fail(ErrorKind::Argument, kModule, "unwrapping needs at least 3 phases");
    std::vector<double> steps(phi.size() - 1);
    for (std::size_t i = 1; i < phi.size(); ++i) {
        double s = phi[i] - phi[i - 1];
        while (s > std::numbers::pi) s -= kTwoPi;
        while (s < -std::numbers::pi) s += kTwoPi;
        steps[i - 1] = s;
    }
    std::vector<double> sorted = steps;
    const double median_step = lower_median(sorted);

    UnwrappedPhase out;
    out.direction = median_step < 0.0 ? -1 : 1;
    out.Phi.resize(phi.size());
    out.Phi[0] = out.direction > 0 ? phi[0] : wrap_angle(-phi[0]);
    for (std::size_t i = 1; i < phi.size(); ++i) out.Phi[i] = out.Phi[i - 1] + out.direction * steps[i - 1];
    return out;
}

double estimate_cycle_count(std::span<const double> Phi, int n_frames, int d) {
    if (Phi.empty()) fail(ErrorKind::Argument, kModule, "empty phase sequence");
    const auto [lo, hi] = std::minmax_element(Phi.begin(), Phi.end());
    const double span = *hi - *lo;
    if (!(span > 0.0)) fail(ErrorKind::Argument, kModule, "unwrapped phase has no positive span");
    return n_frames * span / (kTwoPi * (n_frames - d + 1));
}

TemplateResult synthesize(const FrameSequence& seq, std::span<const double> Phi, double k_est, int d,
                          const TemplateConfig& cfg) {
    const int n = static_cast<int>(seq.size());
    const int count = n - d + 1;
    if (d < 2) fail(ErrorKind::Argument, kModule, "synthesis needs windows of at least 2 frames");
    if (static_cast<int>(Phi.size()) != count)
        fail(ErrorKind::Argument, kModule,
             "expected " + std::to_string(count) + " window phases, got " + std::to_string(Phi.size()));
    if (!std::all_of(Phi.begin(), Phi.end(), [](double v) { return std::isfinite(v); }))
        fail(ErrorKind::Argument, kModule, "window phases must be finite");
    if (cfg.M < 2) fail(ErrorKind::Argument, kModule, "template needs at least 2 frames");
    if (!(cfg.F > 0.0)) fail(ErrorKind::Argument, kModule, "ghost gap F must be positive");
    if (!(k_est > 0.0) || !std::isfinite(k_est)) fail(ErrorKind::Argument, kModule, "cycle count must be positive");

    const double base = *std::min_element(Phi.begin(), Phi.end());
    std::vector<double> phase(Phi.size());
    for (std::size_t i = 0; i < Phi.size(); ++i) phase[i] = Phi[i] - base;

    const double step = kTwoPi * k_est / n;  // phase advance per frame
    const double reach = (d - 1) * step;
    const double frames_per_radian = n / (kTwoPi * k_est);

    // Own phase estimate of each frame: the phase of the window it starts,
    // extrapolated past the last window.
    std::vector<double> frame_phase(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f)
        frame_phase[f] = f < count ? phase[f] : phase[count - 1] + (f - count + 1) * step;

    TemplateResult result;
    result.k_est = k_est;
    result.phases.resize(static_cast<std::size_t>(cfg.M));
    result.contributors.assign(static_cast<std::size_t>(cfg.M), 0);
    result.holes.assign(static_cast<std::size_t>(cfg.M), 0);
    result.votes.resize(static_cast<std::size_t>(cfg.M));
    std::vector<std::vector<double>> out(static_cast<std::size_t>(cfg.M));
    const std::size_t fsize = seq.frame_size();

    parallel_for(static_cast<std::size_t>(cfg.M), [&](std::size_t t) {
        const double theta = kTwoPi * static_cast<double>(t) / cfg.M;
        result.phases[t] = theta;

        std::map<std::pair<int, int>, std::vector<double>> votes;
        for (int i = 0; i < count; ++i) {
            const double u = wrap_angle(theta - phase[i]);
            if (u > reach * (1.0 + kSnap)) continue;
            double x = u / step;
            int j = static_cast<int>(std::floor(x));
            double frac = x - j;
            if (frac < kSnap) frac = 0.0;
            if (frac > 1.0 - kSnap) {
                ++j;
                frac = 0.0;
            }
            if (j >= d - 1) {
                j = d - 1;
                frac = 0.0;
            }
            const int lo = i + j;
            const int hi = frac > 0.0 ? lo + 1 : lo;
            if (std::isfinite(cfg.F)) {
                const double gap_lo = circular_distance(frame_phase[lo], theta) * frames_per_radian;
                const double gap_hi = circular_distance(frame_phase[hi], theta) * frames_per_radian;
                if (gap_lo > cfg.F || gap_hi > cfg.F) continue;
            }
            votes[{lo, hi}].push_back(frac);
        }
        if (votes.empty()) return;

        std::vector<std::vector<double>> contrib;
        contrib.reserve(votes.size());
        for (auto& [pair, fracs] : votes) {
            const double w = lower_median(fracs);
            result.votes[t].push_back({pair.first, pair.second, w});
            const auto a = seq.frame(static_cast<std::size_t>(pair.first));
            const auto b = seq.frame(static_cast<std::size_t>(pair.second));
            std::vector<double> v(fsize);
            for (std::size_t p = 0; p < fsize; ++p) v[p] = w == 0.0 ? a[p] : a[p] + w * (b[p] - a[p]);
            contrib.push_back(std::move(v));
        }
        std::vector<double> frame(fsize);
        std::vector<double> buf(contrib.size());
        for (std::size_t p = 0; p < fsize; ++p) {
            for (std::size_t c = 0; c < contrib.size(); ++c) buf[c] = contrib[c][p];
            frame[p] = lower_median(buf);
        }
        out[t] = std::move(frame);
        result.contributors[t] = static_cast<int>(contrib.size());
    });

    const int m = cfg.M;
    if (std::all_of(result.contributors.begin(), result.contributors.end(), [](int c) { return c == 0; }))
        fail(ErrorKind::CoverageEmpty, kModule, "phase coverage empty");
    for (int t = 0; t < m; ++t) {
        if (result.contributors[t] > 0) continue;
        result.holes[t] = 1;
        for (int delta = 1; delta <= m / 2; ++delta) {
            const int before = ((t - delta) % m + m) % m;
            const int after = (t + delta) % m;
            if (result.contributors[before] > 0) {
                out[t] = out[before];
                break;
            }
            if (result.contributors[after] > 0) {
                out[t] = out[after];
                break;
            }
        }
    }

    result.frames = FrameSequence(seq.height(), seq.width(), seq.channels(), seq.name() + "_template",
                                  seq.frame_rate());
    for (auto& f : out) result.frames.push_back(std::move(f));
    return result;
}

}  // namespace slowmo
