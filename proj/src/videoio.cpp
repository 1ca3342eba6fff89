#include "slowmo/videoio.hpp"

#include "slowmo/common.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace slowmo {

namespace {

constexpr const char* kModule = "videoio";

[[noreturn]] void io_error(const std::string& what) { fail(ErrorKind::Io, kModule, what); }
[[noreturn]] void arg_error(const std::string& what) { fail(ErrorKind::Argument, kModule, what); }

json read_manifest(const fs::path& file) {
    std::ifstream in(file);
    if (!in) io_error("cannot open " + file.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        io_error("malformed manifest " + file.string() + ": " + e.what());
    }
}

void write_manifest(const FrameSequence& seq, const fs::path& file, const char* format) {
    json m;
    m["N"] = seq.size();
    m["H"] = seq.height();
    m["W"] = seq.width();
    m["C"] = seq.channels();
    m["frame_rate"] = round_sig9(seq.frame_rate());
    m["format"] = format;
    m["name"] = seq.name();
    std::ofstream out(file);
    if (!out) io_error("cannot write " + file.string());
    out << m.dump(2) << '\n';
    if (!out) io_error("write failed for " + file.string());
}

struct PngImage {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;
};

PngImage read_png(const fs::path& file) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, file.string().c_str()))
        io_error("cannot read " + file.string() + ": " + image.message);
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    PngImage out;
    out.height = static_cast<int>(image.height);
    out.width = static_cast<int>(image.width);
    out.channels = color ? 3 : 1;
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        io_error("cannot decode " + file.string() + ": " + msg);
    }
    return out;
}

void write_png(const fs::path& file, int height, int width, int channels,
               const std::vector<std::uint8_t>& pixels) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, file.string().c_str(), 0, pixels.data(), 0, nullptr))
        io_error("cannot write " + file.string() + ": " + image.message);
}

std::uint8_t quantize(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

// Reflect-101 indexing (… 2 1 | 0 1 2 … n-1 | n-2 …), valid for any offset.
int reflect101(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

FrameSequence pyramid_down(const FrameSequence& seq) {
    constexpr std::array<double, 5> k{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const int h = seq.height();
    const int w = seq.width();
    const int c = seq.channels();
    const int oh = (h + 1) / 2;
    const int ow = (w + 1) / 2;
    FrameSequence out(oh, ow, c, seq.name(), seq.frame_rate());
    std::vector<std::vector<double>> frames(seq.size());
    parallel_for(seq.size(), [&](std::size_t f) {
        const auto src = seq.frame(f);
        // Horizontal pass only at the kept columns, then vertical at kept rows.
        std::vector<double> tmp(static_cast<std::size_t>(h) * ow * c);
        for (int y = 0; y < h; ++y)
            for (int ox = 0; ox < ow; ++ox)
                for (int ch = 0; ch < c; ++ch) {
                    double acc = 0.0;
                    for (int t = -2; t <= 2; ++t) {
                        const int x = reflect101(2 * ox + t, w);
                        acc += k[t + 2] * src[(static_cast<std::size_t>(y) * w + x) * c + ch];
                    }
                    tmp[(static_cast<std::size_t>(y) * ow + ox) * c + ch] = acc;
                }
        std::vector<double> dst(static_cast<std::size_t>(oh) * ow * c);
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox)
                for (int ch = 0; ch < c; ++ch) {
                    double acc = 0.0;
                    for (int t = -2; t <= 2; ++t) {
                        const int y = reflect101(2 * oy + t, h);
                        acc += k[t + 2] * tmp[(static_cast<std::size_t>(y) * ow + ox) * c + ch];
                    }
                    dst[(static_cast<std::size_t>(oy) * ow + ox) * c + ch] = acc;
                }
        frames[f] = std::move(dst);
    });
    for (auto& fr : frames) out.push_back(std::move(fr));
    return out;
}

bool parse_double(const std::string& text, double& value) {
    const char* begin = text.c_str();
    char* end = nullptr;
    value = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

}  // namespace

FrameSequence::FrameSequence(int height, int width, int channels, std::string name,
                             double frame_rate)
    : height_(height), width_(width), channels_(channels), name_(std::move(name)),
      frame_rate_(frame_rate) {
    if (height < 1 || width < 1) arg_error("frame dimensions must be positive");
    if (channels != 1 && channels != 3) arg_error("channel count must be 1 or 3");
}

void FrameSequence::push_back(std::vector<double> frame) {
    if (frame.size() != frame_size())
        fail(ErrorKind::DimensionMismatch, kModule,
             "frame " + std::to_string(frames_.size()) + " has " + std::to_string(frame.size()) +
                 " values, expected " + std::to_string(frame_size()));
    for (double v : frame)
        if (!std::isfinite(v)) arg_error("non-finite pixel value in frame " + std::to_string(frames_.size()));
    frames_.push_back(std::move(frame));
}

void Signal1D::validate() const {
    if (samples.size() < 2) arg_error("signal needs at least 2 samples");
    for (double v : samples)
        if (!std::isfinite(v)) arg_error("non-finite sample in signal");
}

FrameSequence to_sequence(const Signal1D& signal) {
    signal.validate();
    FrameSequence seq(1, 1, 1, signal.name, signal.frame_rate);
    for (double v : signal.samples) seq.push_back({v});
    return seq;
}

Signal1D to_signal(const FrameSequence& seq) {
    if (seq.frame_size() != 1) arg_error("sequence is not a 1x1x1 signal");
    Signal1D s;
    s.name = seq.name();
    s.frame_rate = seq.frame_rate();
    s.samples.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) s.samples.push_back(seq.frame(i)[0]);
    return s;
}

FrameSequence load_frame_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) io_error("not a directory: " + dir.string());
    if (fs::exists(dir / "frames.f32")) return load_raw(dir);

    std::vector<fs::path> files;
    json manifest;
    const bool has_manifest = fs::exists(dir / "manifest.json");
    if (has_manifest) manifest = read_manifest(dir / "manifest.json");
    if (has_manifest && manifest.contains("files")) {
        for (const auto& f : manifest["files"]) files.push_back(dir / f.get<std::string>());
    } else {
        for (const auto& entry : fs::directory_iterator(dir)) {
            auto ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
            if (entry.is_regular_file() && ext == ".png") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) io_error("no frames found in " + dir.string());

    FrameSequence seq;
    for (std::size_t i = 0; i < files.size(); ++i) {
        PngImage img = read_png(files[i]);
        if (i == 0) {
            seq = FrameSequence(img.height, img.width, img.channels, dir.filename().string());
        } else if (img.height != seq.height() || img.width != seq.width() ||
                   img.channels != seq.channels()) {
            fail(ErrorKind::DimensionMismatch, kModule,
                 files[i].filename().string() + " is " + std::to_string(img.width) + "x" +
                     std::to_string(img.height) + "x" + std::to_string(img.channels) + ", expected " +
                     std::to_string(seq.width()) + "x" + std::to_string(seq.height()) + "x" +
                     std::to_string(seq.channels()));
        }
        std::vector<double> frame(img.pixels.size());
        std::transform(img.pixels.begin(), img.pixels.end(), frame.begin(),
                       [](std::uint8_t v) { return v / 255.0; });
        seq.push_back(std::move(frame));
    }
    if (has_manifest) {
        if (manifest.contains("frame_rate")) seq.set_frame_rate(manifest["frame_rate"].get<double>());
        if (manifest.contains("name")) seq.set_name(manifest["name"].get<std::string>());
    }
    return seq;
}

void write_frames(const FrameSequence& seq, const fs::path& dir) {
    if (seq.empty()) arg_error("cannot write an empty sequence");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) io_error("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::uint8_t> pixels(seq.frame_size());
    char name[32];
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto f = seq.frame(i);
        std::transform(f.begin(), f.end(), pixels.begin(), quantize);
        std::snprintf(name, sizeof name, "frame_%06zu.png", i + 1);
        write_png(dir / name, seq.height(), seq.width(), seq.channels(), pixels);
    }
    write_manifest(seq, dir / "manifest.json", "png");
}

void write_raw(const FrameSequence& seq, const fs::path& dir) {
    if (seq.empty()) arg_error("cannot write an empty sequence");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) io_error("cannot create " + dir.string() + ": " + ec.message());
    std::ofstream out(dir / "frames.f32", std::ios::binary);
    if (!out) io_error("cannot write " + (dir / "frames.f32").string());
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (double v : seq.frame(i)) {
            auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
            if constexpr (std::endian::native == std::endian::big)
                bits = __builtin_bswap32(bits);
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    if (!out) io_error("write failed for frames.f32");
    write_manifest(seq, dir / "manifest.json", "f32");
}

FrameSequence load_raw(const fs::path& dir) {
    const json m = read_manifest(dir / "manifest.json");
    for (const char* key : {"N", "H", "W", "C"})
        if (!m.contains(key)) io_error(std::string("manifest lacks key ") + key);
    const auto n = m["N"].get<std::size_t>();
    FrameSequence seq(m["H"].get<int>(), m["W"].get<int>(), m["C"].get<int>(),
                      m.value("name", dir.filename().string()), m.value("frame_rate", 0.0));
    const fs::path file = dir / "frames.f32";
    std::ifstream in(file, std::ios::binary);
    if (!in) io_error("cannot open " + file.string());
    const std::uintmax_t expected = n * seq.frame_size() * sizeof(float);
    if (fs::file_size(file) != expected)
        fail(ErrorKind::DimensionMismatch, kModule,
             file.string() + " holds " + std::to_string(fs::file_size(file)) + " bytes, manifest implies " +
                 std::to_string(expected));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> frame(seq.frame_size());
        for (auto& v : frame) {
            std::uint32_t bits = 0;
            in.read(reinterpret_cast<char*>(&bits), sizeof bits);
            if constexpr (std::endian::native == std::endian::big)
                bits = __builtin_bswap32(bits);
            v = std::bit_cast<float>(bits);
        }
        if (!in) io_error("short read in " + file.string());
        seq.push_back(std::move(frame));
    }
    return seq;
}

Signal1D read_signal_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) io_error("cannot open " + file.string());
    Signal1D s;
    s.name = file.stem().string();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Only the first field is used.
        const auto comma = line.find(',');
        if (comma != std::string::npos) line.resize(comma);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        double v = 0.0;
        if (!parse_double(line, v)) {
            if (lineno == 1) continue;
            io_error(file.string() + ":" + std::to_string(lineno) + ": not a number");
        }
        s.samples.push_back(v);
    }
    s.validate();
    return s;
}

void write_signal_csv(const Signal1D& signal, const fs::path& file) {
    std::ofstream out(file);
    if (!out) io_error("cannot write " + file.string());
    char buf[32];
    for (double v : signal.samples) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << '\n';
    }
    if (!out) io_error("write failed for " + file.string());
}

int max_pyramid_level(int height, int width) {
    const int m = std::min(height, width);
    int level = 0;
    while ((2 << level) <= m) ++level;
    return level;
}

FrameSequence gaussian_pyramid_level(const FrameSequence& seq, int level) {
    if (level < 0) arg_error("pyramid level must be non-negative");
    if (level > max_pyramid_level(seq.height(), seq.width()))
        arg_error("pyramid level " + std::to_string(level) + " too large for " +
                  std::to_string(seq.height()) + "x" + std::to_string(seq.width()) + " frames");
    FrameSequence out = seq;
    for (int l = 0; l < level; ++l) out = pyramid_down(out);
    return out;
}

}  // namespace slowmo
