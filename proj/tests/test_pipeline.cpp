#include "test_util.hpp"

#include "slowmo/pipeline.hpp"
#include "slowmo/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace slowmo;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SLOWMO_CLI_PATH) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

void write_csv(const fs::path& p, const std::vector<double>& values) {
    std::ofstream out(p);
    out.precision(17);
    for (double v : values) out << v << '\n';
}

std::vector<double> cosine(int n, double period) {
    std::vector<double> v;
    for (int t = 1; t <= n; ++t) v.push_back(std::cos(2.0 * std::numbers::pi * t / period));
    return v;
}

// A single blade turning once per period around the frame centre.
FrameSequence fan(int samples_per_period, int cycles, int size) {
    FrameSequence seq(size, size, 1, "fan");
    const double c = (size - 1) / 2.0;
    for (int t = 0; t < samples_per_period * cycles; ++t) {
        const double a = kTwoPi * (t % samples_per_period) / samples_per_period;
        const double ux = std::cos(a), uy = std::sin(a);
        std::vector<double> img(static_cast<std::size_t>(size) * size);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                const double px = x - c, py = y - c;
                const double along = px * ux + py * uy;
                const double across = std::abs(-px * uy + py * ux);
                double v = 0.1;
                if (along > 0 && along < 0.45 * size) v += 0.8 * std::clamp(2.5 - across, 0.0, 1.0);
                img[static_cast<std::size_t>(y) * size + x] = v;
            }
        seq.push_back(img);
    }
    return seq;
}

std::size_t count_png(const fs::path& dir) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".png") ++n;
    return n;
}

Scenario figure1(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Cosine1D;
    spec.cycles = 20;
    spec.samples_per_period = 12;
    spec.corruption.noise_sigma = 1.0;
    spec.seed = seed;
    return generate(spec);
}

}  // namespace

TEST_CASE("period: cosine CSV of period 25") {
    TempDir dir;
    write_csv(dir.path() / "cos.csv", cosine(500, 25.0));
    const auto r = run_cli("period " + quoted(dir.path() / "cos.csv"));
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j.at("T").get<double>() >= 24.0);
    CHECK(j.at("T").get<double>() <= 26.0);
    CHECK(j.at("confidence").get<double>() >= 0.95);
}

TEST_CASE("period: constant CSV exits 2") {
    TempDir dir;
    write_csv(dir.path() / "flat.csv", std::vector<double>(200, 0.25));
    const auto r = run_cli("period " + quoted(dir.path() / "flat.csv"));
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("aperiodic") != std::string::npos);
}

TEST_CASE("period: bouncing-disk frame directory") {
    TempDir dir;
    ScenarioSpec spec;
    spec.kind = ScenarioKind::BouncingDisk;
    spec.cycles = 10;
    spec.samples_per_period = 20;
    write_frames(generate(spec).frames, dir.path());
    const auto r = run_cli("period " + quoted(dir.path()));
    REQUIRE(r.exit_code == 0);
    CHECK(std::abs(nlohmann::json::parse(r.output).at("T").get<double>() - 20.0) <= 1.0);
}

TEST_CASE("missing inputs exit 1 and name the path") {
    const std::string missing = "/nonexistent/slowmo/input_dir";
    for (const std::string& cmd : {"period " + missing, "analyze " + missing, "synthesize " + missing + " -o /tmp/x"}) {
        CAPTURE(cmd);
        const auto r = run_cli(cmd);
        CHECK(r.exit_code == 1);
        CHECK(r.output.find(missing) != std::string::npos);
    }
}

TEST_CASE("bad arguments exit 1") {
    CHECK(run_cli("period").exit_code == 1);
    CHECK(run_cli("analyze --alpha 2 x.csv").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("analyze writes the analysis contract") {
    TempDir dir;
    write_csv(dir.path() / "cos.csv", cosine(300, 20.0));
    const auto r = run_cli("analyze " + quoted(dir.path() / "cos.csv") + " -o " + quoted(dir.path() / "a.json"));
    REQUIRE(r.exit_code == 0);
    const auto j = read_json(dir.path() / "a.json");
    CHECK(j.at("schema") == "1");
    for (const char* key : {"T", "confidence", "d", "window_count", "diagram", "sigma", "alpha", "chosen_pair",
                            "eigenvalues", "zero_crossings", "eigen_pair", "phi", "Phi", "k_est", "field_char",
                            "laplacian", "kernel", "pyramid_level", "warnings"})
        CHECK_MESSAGE(j.contains(key), key);
    CHECK(j.at("phi").size() == j.at("window_count").get<std::size_t>());
    CHECK(j.at("d").get<int>() == 21);
    for (const auto& p : j.at("diagram")) {
        CHECK(p.contains("birth"));
        CHECK(p.contains("death"));
    }
    const Analysis back = analysis_from_json(j);
    CHECK(back.phi.size() == j.at("phi").size());
    CHECK(back.d == 21);
}

TEST_CASE("analyze: a cycle-free point cloud exits 3") {
    TempDir dir;
    {
        std::ofstream out(dir.path() / "line.csv");
        for (int i = 0; i < 20; ++i) out << i << ',' << 2 * i << '\n';
    }
    const auto r = run_cli("analyze --point-cloud-csv " + quoted(dir.path() / "line.csv"));
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("no 1-cycles found") != std::string::npos);
}

TEST_CASE("analyze: circle point cloud phases follow the angles within 5 degrees") {
    TempDir dir;
    std::vector<double> angles;
    {
        std::ofstream out(dir.path() / "circle.csv");
        out.precision(17);
        out << "x,y\n";
        for (int i = 0; i < 120; ++i) {
            const double a = kTwoPi * i / 40.0;
            angles.push_back(std::fmod(a, kTwoPi));
            out << std::cos(a) << ',' << std::sin(a) << '\n';
        }
    }
    const auto r = run_cli("analyze --point-cloud-csv " + quoted(dir.path() / "circle.csv"));
    REQUIRE(r.exit_code == 0);
    const auto phi = nlohmann::json::parse(r.output).at("phi").get<std::vector<double>>();
    REQUIRE(phi.size() == angles.size());
    CHECK(angular_error(phi, angles) < 5.0);
}

TEST_CASE("analyze: white noise reports no cycle in at least 80% of trials") {
    TempDir dir;
    int no_cycle = 0;
    std::string codes;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(trial_seed(99, static_cast<std::uint64_t>(t)));
        std::normal_distribution<double> nd;
        std::vector<double> x(240);
        for (auto& v : x) v = nd(rng);
        const fs::path csv = dir.path() / ("noise" + std::to_string(t) + ".csv");
        write_csv(csv, x);
        const auto r = run_cli("analyze " + quoted(csv) + " -o " + quoted(dir.path() / "a.json"));
        if (r.exit_code == 3) ++no_cycle;
        codes += std::to_string(r.exit_code) + " ";
    }
    MESSAGE("exit codes: " << codes);
    CHECK(no_cycle >= (8 * trials + 9) / 10);
}

TEST_CASE("analyze: the noisy 12-sample cosine has one dominant pair (ratio >= 3)") {
    for (int t = 0; t < 5; ++t) {
        CAPTURE(t);
        const Analysis a = analyze(figure1(trial_seed(2024, static_cast<std::uint64_t>(t))).frames, PipelineConfig{});
        REQUIRE(a.diagram.pairs.size() >= 1);
        if (a.diagram.pairs.size() >= 2) {
            MESSAGE("top/runner-up persistence ratio "
                    << a.diagram.pairs[0].persistence() / a.diagram.pairs[1].persistence());
            CHECK(a.diagram.pairs[0].persistence() >= 3.0 * a.diagram.pairs[1].persistence());
        }
    }
}

TEST_CASE("synthesize: fan with 6 samples per period over 30 cycles, M=60") {
    TempDir dir;
    write_frames(fan(6, 30, 32), dir.path() / "in");
    const auto r = run_cli("synthesize " + quoted(dir.path() / "in") + " -o " + quoted(dir.path() / "out") +
                           " --frames 60");
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    CHECK(count_png(dir.path() / "out") == 60);
    const auto t = read_json(dir.path() / "out" / "template.json");
    CHECK(t.at("M") == 60);
    const auto contributors = t.at("contributors").get<std::vector<int>>();
    REQUIRE(contributors.size() == 60);
    for (int c : contributors) CHECK(c >= 3);
    CHECK(fs::exists(dir.path() / "out" / "analysis.json"));
    CHECK(fs::exists(dir.path() / "out" / "manifest.json"));
}

TEST_CASE("synthesize: M=2, reused analysis, CSV input") {
    TempDir dir;
    ScenarioSpec spec;
    spec.kind = ScenarioKind::PulsingBlob;
    spec.cycles = 8;
    spec.samples_per_period = 12;
    spec.height = spec.width = 32;
    write_frames(generate(spec).frames, dir.path() / "in");
    REQUIRE(run_cli("analyze " + quoted(dir.path() / "in") + " -o " + quoted(dir.path() / "a.json")).exit_code == 0);
    const auto r = run_cli("synthesize " + quoted(dir.path() / "in") + " -o " + quoted(dir.path() / "out") +
                           " --frames 2 --analysis " + quoted(dir.path() / "a.json"));
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    CHECK(count_png(dir.path() / "out") == 2);
    CHECK_FALSE(fs::exists(dir.path() / "out" / "analysis.json"));
    CHECK(run_cli("synthesize " + quoted(dir.path() / "in") + " -o " + quoted(dir.path() / "o1") + " --frames 1")
              .exit_code == 1);

    write_csv(dir.path() / "cos.csv", cosine(240, 12.0));
    const auto c = run_cli("synthesize " + quoted(dir.path() / "cos.csv") + " -o " + quoted(dir.path() / "csv_out") +
                           " --frames 24");
    REQUIRE_MESSAGE(c.exit_code == 0, c.output);
    CHECK(read_signal_csv(dir.path() / "csv_out" / "template.csv").samples.size() == 24);
}

TEST_CASE("identical runs produce byte-identical output") {
    TempDir dir;
    ScenarioSpec spec;
    spec.kind = ScenarioKind::BouncingDisk;
    spec.cycles = 6;
    spec.samples_per_period = 10;
    spec.height = spec.width = 32;
    spec.corruption.noise_sigma = 0.05;
    spec.seed = 4;
    write_frames(generate(spec).frames, dir.path() / "in");
    const std::string in = quoted(dir.path() / "in");
    for (int run = 0; run < 2; ++run) {
        const std::string tag = std::to_string(run);
        REQUIRE(run_cli("analyze " + in + " --seed 7 -o " + quoted(dir.path() / ("a" + tag + ".json"))).exit_code ==
                0);
        REQUIRE(run_cli("synthesize " + in + " --seed 7 -o " + quoted(dir.path() / ("s" + tag))).exit_code == 0);
        REQUIRE(run_cli("period " + in + " > " + quoted(dir.path() / ("p" + tag + ".json"))).exit_code == 0);
    }
    CHECK(read_file(dir.path() / "a0.json") == read_file(dir.path() / "a1.json"));
    CHECK(read_file(dir.path() / "p0.json") == read_file(dir.path() / "p1.json"));
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir.path() / "s0")) {
        ++files;
        CHECK_MESSAGE(read_file(e.path()) == read_file(dir.path() / "s1" / e.path().filename()), e.path().string());
    }
    CHECK(files > 3);
}

TEST_CASE("eval writes the benchmark report") {
    TempDir dir;
    {
        std::ofstream out(dir.path() / "grid.json");
        out << R"([{"kind": "pulsing-blob", "cycles": 5, "samples_per_period": 10, "height": 24, "width": 24}])";
    }
    const auto r = run_cli("eval --grid " + quoted(dir.path() / "grid.json") + " --trials 2 --out " +
                           quoted(dir.path() / "report.csv"));
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    std::istringstream csv(read_file(dir.path() / "report.csv"));
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(csv, line)) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "scenario,shake,sigma,occluder,alpha,windowed,mean_deg,std_deg,failures");
    CHECK(lines[1].rfind("pulsing-blob,", 0) == 0);
    CHECK(run_cli("eval --grid " + quoted(dir.path() / "missing.json")).exit_code == 1);
}

TEST_CASE("--help on every subcommand lists every flag with its default") {
    const std::vector<std::string> common{"--seed",   "--threads", "--pyramid-level", "--alpha",
                                          "--field-char", "--laplacian", "--kernel", "--frames",
                                          "--ghost-gap",  "--subsample-cap"};
    const std::vector<std::pair<std::string, std::vector<std::string>>> extra{
        {"period", {}},
        {"analyze", {"--point-cloud-csv", "--out"}},
        {"synthesize", {"--analysis"}},
        {"eval", {"--trials", "--out"}},
    };
    for (const auto& [sub, flags] : extra) {
        const auto r = run_cli(sub + " --help");
        CHECK(r.exit_code == 0);
        std::vector<std::string> all = common;
        all.insert(all.end(), flags.begin(), flags.end());
        for (const auto& flag : all) {
            CAPTURE(sub);
            CAPTURE(flag);
            const auto pos = r.output.find(flag + " ");
            REQUIRE(pos != std::string::npos);
            const std::string rest = r.output.substr(pos, r.output.find('\n', pos) - pos);
            CHECK(rest.find('[') != std::string::npos);
        }
    }
}

TEST_CASE("synthesis cycle count rescales k_est by W / (W - 1)") {
    Analysis a;
    a.k_est = 9.9;
    a.Phi.assign(100, 0.0);
    CHECK(synthesis_cycle_count(a) == doctest::Approx(10.0));
    a.Phi.assign(1, 0.0);
    CHECK(synthesis_cycle_count(a) == doctest::Approx(9.9));
}

TEST_CASE("default template size and ghost gap follow the period") {
    Analysis a;
    a.T = 12.4;
    CHECK(default_template_frames(a) == 48);
    CHECK(default_ghost_gap(a) == doctest::Approx(3.1));
}
