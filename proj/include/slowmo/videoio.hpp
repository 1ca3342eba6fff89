#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace slowmo {

/// Ordered frames of identical H x W x C shape, stored row-major with
/// interleaved channels. A 1 x 1 x 1 sequence is also how a scalar time
/// series travels through the pipeline.
class FrameSequence {
public:
    FrameSequence() = default;
    FrameSequence(int height, int width, int channels, std::string name = {},
                  double frame_rate = 0.0);

    /// Appends a frame; throws on size mismatch or non-finite values.
    void push_back(std::vector<double> frame);

    std::size_t size() const noexcept { return frames_.size(); }
    bool empty() const noexcept { return frames_.empty(); }
    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    std::size_t frame_size() const noexcept {
        return static_cast<std::size_t>(height_) * width_ * channels_;
    }

    std::span<const double> frame(std::size_t i) const { return frames_[i]; }
    std::span<double> frame(std::size_t i) { return frames_[i]; }

    double at(std::size_t f, int y, int x, int c) const {
        return frames_[f][(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    double& at(std::size_t f, int y, int x, int c) {
        return frames_[f][(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    const std::string& name() const noexcept { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    double frame_rate() const noexcept { return frame_rate_; }
    void set_frame_rate(double r) { frame_rate_ = r; }

    bool operator==(const FrameSequence&) const = default;

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<std::vector<double>> frames_;
    std::string name_;
    double frame_rate_ = 0.0;
};

struct Signal1D {
    std::vector<double> samples;
    std::string name;
    double frame_rate = 0.0;

    /// Throws unless all samples are finite and there are at least two.
    void validate() const;
};

FrameSequence to_sequence(const Signal1D& signal);
/// Requires a 1 x 1 x 1 sequence.
Signal1D to_signal(const FrameSequence& seq);

/// Loads a frame directory: `frames.f32` + `manifest.json` if present,
/// otherwise every `*.png` in lexicographic order (or the manifest's
/// "files" order when given). Pixel values are normalized to [0, 1].
FrameSequence load_frame_dir(const std::filesystem::path& dir);

/// Writes `frame_%06d.png` files plus `manifest.json`. Values are clamped to
/// [0, 1] and quantized to 8 bits.
void write_frames(const FrameSequence& seq, const std::filesystem::path& dir);

/// Lossless container: little-endian float32, row-major, frame after frame.
void write_raw(const FrameSequence& seq, const std::filesystem::path& dir);
FrameSequence load_raw(const std::filesystem::path& dir);

/// One sample per line. A non-numeric first line is treated as a header.
Signal1D read_signal_csv(const std::filesystem::path& file);
void write_signal_csv(const Signal1D& signal, const std::filesystem::path& file);

/// Smooths with the separable binomial kernel [1 4 6 4 1]/16 using
/// reflect-101 borders and keeps every second row and column, `level` times.
FrameSequence gaussian_pyramid_level(const FrameSequence& seq, int level);

/// Largest level accepted by gaussian_pyramid_level for this frame size.
int max_pyramid_level(int height, int width);

}  // namespace slowmo
