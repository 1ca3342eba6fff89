#pragma once

#include "slowmo/videoio.hpp"

#include <limits>
#include <span>
#include <vector>

namespace slowmo {

struct UnwrappedPhase {
    std::vector<double> Phi;
    int direction = 1;  ///< -1 when the input phase ran backwards
};

/// Removes 2*pi jumps and flips orientation when the median step is
/// negative, so the result increases. Starts at the (oriented) first phase.
UnwrappedPhase unwrap_and_orient(std::span<const double> phi);

/// Number of cycles the frames go through, N * span(Phi) / (2*pi*(N-d+1)),
/// with span measured from min(Phi).
double estimate_cycle_count(std::span<const double> Phi, int n_frames, int d);

struct TemplateConfig {
    int M = 48;  ///< output frames, at phases 2*pi*t/M
    /// Largest allowed distance, in frame-times, between the target phase and
    /// either interpolation endpoint's own phase estimate.
    double F = std::numeric_limits<double>::infinity();
};

struct TemplateVote {
    int lo = 0;           ///< source frame indices blended by the vote
    int hi = 0;
    double weight = 0.0;  ///< share of frame hi
};

struct TemplateResult {
    FrameSequence frames;
    std::vector<int> contributors;  ///< votes per output frame (0 for holes)
    std::vector<std::vector<TemplateVote>> votes;
    std::vector<char> holes;        ///< filled by copying the nearest covered phase
    std::vector<double> phases;
    double k_est = 0.0;
};

/// Phase-ordered median voting over sliding windows of the original frames.
///
/// Window i puts its j-th frame at phase Phi[i] + 2*pi*k*j/N (Phi shifted so
/// its minimum is zero). Every window whose span covers a target phase
/// proposes a frame interpolated linearly between the two stacked frames
/// around it. Windows that land on the same pair of source frames cast one
/// vote, using the lower median of their interpolation weights. The output
/// pixel is the lower median of the votes, per channel.
TemplateResult synthesize(const FrameSequence& seq, std::span<const double> Phi, double k_est, int d,
                          const TemplateConfig& cfg);

}  // namespace slowmo
