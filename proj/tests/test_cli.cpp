#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "mtc/codec.hpp"
#include "mtc/error.hpp"
#include "mtc/sequence.hpp"

namespace fs = std::filesystem;
using namespace mtc;

namespace {

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "mtc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Scratch directory with a smooth n = 4, f = 700 sequence in both formats.
struct Workspace {
    fs::path dir;
    fs::path txt;
    fs::path csv;

    Workspace() {
        dir = fs::temp_directory_path() / ("mtc_cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g(0.0, 1.0);
        Matrix m(12, 700);
        for (std::size_t r = 0; r < 12; ++r) {
            const double a = 10 * g(rng), w = 1 + std::fabs(g(rng)), off = 50 * g(rng);
            for (std::size_t c = 0; c < 700; ++c) m(r, c) = off + a * std::sin(w * c / 120.0) + 0.01 * g(rng);
        }
        const MocapSequence seq(4, m);
        txt = dir / "seq.txt";
        csv = dir / "seq.csv";
        save_sequence(seq, txt, FileFormat::matrix_text);
        save_sequence(seq, csv, FileFormat::csv);
    }
    ~Workspace() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("k list parsing") {
    CHECK(cli::parse_k_list("15:65:5").size() == 11);
    CHECK(cli::parse_k_list("40") == std::vector<std::size_t>{40});
    CHECK(cli::parse_k_list("30,10,20,10") == std::vector<std::size_t>{10, 20, 30});
    CHECK(cli::parse_k_list("1:3,7") == std::vector<std::size_t>{1, 2, 3, 7});
    CHECK_THROWS_AS(cli::parse_k_list(""), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_k_list("5:1"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_k_list("1:5:0"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_k_list("a"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_k_list("3,,4"), InvalidArgument);
}

TEST_CASE("compress with equal segmentation") {
    Workspace ws;
    const auto r = run({"compress", ws.txt.string(), ws.path("a.mtc"), "--L", "280", "--k", "6", "--verify"});
    CHECK(r.status == 0);
    CHECK(r.out.find("clips: 2\n") != std::string::npos);
    CHECK(r.out.find("distortion: ") != std::string::npos);
    CHECK(r.out.find("ratio: ") != std::string::npos);
    CHECK(r.out.find("encode_fps: ") != std::string::npos);

    const auto info = run({"info", ws.path("a.mtc"), "--clips"});
    CHECK(info.status == 0);
    CHECK(info.out.find("clips: 2\n") != std::string::npos);
    CHECK(info.out.find("0,280,") != std::string::npos);
}

TEST_CASE("compress with a cuts file") {
    Workspace ws;
    {
        std::ofstream cuts(ws.path("cuts.txt"));
        cuts << "150\n400\n700\n";
    }
    const auto r = run({"compress", ws.txt.string(), ws.path("c.mtc"), "--cuts", ws.path("cuts.txt"), "--k", "5"});
    CHECK(r.status == 0);
    const auto info = run({"info", ws.path("c.mtc"), "--clips"});
    CHECK(info.out.find("0,150,") != std::string::npos);
    CHECK(info.out.find("1,250,") != std::string::npos);
    CHECK(info.out.find("2,300,") != std::string::npos);
}

TEST_CASE("database mode is deterministic across runs") {
    Workspace ws;
    const auto a = run({"compress", ws.txt.string(), ws.path("d1.mtc"), "--L", "100", "--k", "4", "--K", "4", "--seed", "7"});
    const auto b = run({"compress", ws.txt.string(), ws.path("d2.mtc"), "--L", "100", "--k", "4", "--K", "4", "--seed", "7"});
    CHECK(a.status == 0);
    CHECK(b.status == 0);
    CHECK(slurp(ws.path("d1.mtc")) == slurp(ws.path("d2.mtc")));
    CHECK(run({"info", ws.path("d1.mtc")}).out.find("mode: database") != std::string::npos);
}

TEST_CASE("compress then decompress in both output formats") {
    Workspace ws;
    REQUIRE(run({"compress", ws.csv.string(), ws.path("x.mtc"), "--k", "8", "--L", "350"}).status == 0);
    const auto t = run({"decompress", ws.path("x.mtc"), ws.path("x.txt")});
    CHECK(t.status == 0);
    const auto c = run({"decompress", ws.path("x.mtc"), ws.path("x.out"), "--format", "csv"});
    CHECK(c.status == 0);
    const auto from_txt = load_sequence(ws.path("x.txt"), FileFormat::matrix_text);
    const auto from_csv = load_sequence(ws.path("x.out"), FileFormat::csv);
    CHECK(from_txt == from_csv);
    CHECK(slurp(ws.path("x.out")).find(' ') == std::string::npos);

    const auto original = load_sequence(ws.txt, FileFormat::matrix_text);
    CHECK(from_txt.frames() == 700);
    CHECK(codec::distortion(original, from_txt) < 1.0);
    const std::string stream = slurp(ws.path("x.mtc"));
    const std::vector<std::uint8_t> bytes(stream.begin(), stream.end());
    CHECK(from_txt.data() == codec::decode_sequence(bytes).data());
}

TEST_CASE("corrupt stream fails with a checksum message") {
    Workspace ws;
    REQUIRE(run({"compress", ws.txt.string(), ws.path("y.mtc"), "--k", "3"}).status == 0);
    auto bytes = slurp(ws.path("y.mtc"));
    bytes[bytes.size() / 2] ^= 0x01;
    {
        std::ofstream out(ws.path("y.mtc"), std::ios::binary);
        out << bytes;
    }
    const auto r = run({"decompress", ws.path("y.mtc"), ws.path("y.txt")});
    CHECK(r.status != 0);
    CHECK(r.err.find("checksum") != std::string::npos);
    CHECK_FALSE(fs::exists(ws.path("y.txt")));
}

TEST_CASE("sweep writes one sorted row per k") {
    Workspace ws;
    const auto r = run({"sweep", ws.txt.string(), "--k", "12,2:10:2", "--L", "270", "--out", ws.path("s.csv"), "--no-timing"});
    CHECK(r.status == 0);
    const std::string csv = slurp(ws.path("s.csv"));
    CHECK(csv.rfind("k,l,Q,CR,distortion,encode_fps,decode_fps\n", 0) == 0);
    CHECK(count_lines(csv) == 7);
    CHECK(csv.find('\r') == std::string::npos);

    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::size_t prev_k = 0;
    double prev_cr = 1e300;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        REQUIRE(cells.size() == 7);
        const std::size_t k = std::stoul(cells[0]);
        CHECK(k > prev_k);
        const double cr = std::stod(cells[3]);
        CHECK(cr < prev_cr);  // CR strictly falls as k grows
        CHECK(cells[5] == "0");
        CHECK(cells[6] == "0");
        prev_k = k;
        prev_cr = cr;
    }

    // Identical flags give byte-identical CSVs.
    REQUIRE(run({"sweep", ws.txt.string(), "--k", "12,2:10:2", "--L", "270", "--out", ws.path("s2.csv"), "--no-timing"})
                .status == 0);
    CHECK(slurp(ws.path("s2.csv")) == csv);

    const auto one = run({"sweep", ws.txt.string(), "--k", "5", "--no-timing"});
    CHECK(one.status == 0);
    CHECK(count_lines(one.out) == 2);
}

TEST_CASE("analyze reports statistics and spectra") {
    Workspace ws;
    const auto r = run({"analyze", ws.txt.string(), "--J", "7", "--out", ws.path("spec.csv"), "--clip-out",
                        ws.path("clip.csv")});
    CHECK(r.status == 0);
    CHECK(r.out.find("mean_variation: ") != std::string::npos);
    CHECK(r.out.find("stddev_sum: ") != std::string::npos);
    CHECK(r.out.find("stddev_mean: ") != std::string::npos);
    const std::string spec = slurp(ws.path("spec.csv"));
    CHECK(spec.rfind("index,normalized_value\n1,1\n", 0) == 0);
    CHECK(count_lines(spec) == 13);
    const std::string clip = slurp(ws.path("clip.csv"));
    CHECK(clip.rfind("index,normalized_value\n1,1\n", 0) == 0);
    CHECK(count_lines(clip) == 8);

    save_sequence(MocapSequence(1, Matrix(3, 10, 2.0)), ws.path("const.txt"), FileFormat::matrix_text);
    const auto c = run({"analyze", ws.path("const.txt")});
    CHECK(c.status == 0);
    CHECK(c.out.find("mean_variation: 0\n") != std::string::npos);
    CHECK(c.out.find("stddev_sum: 0\n") != std::string::npos);
}

TEST_CASE("usage errors exit nonzero") {
    Workspace ws;
    CHECK(run({}).status != 0);
    CHECK(run({"compress", ws.txt.string(), ws.path("z.mtc")}).status != 0);                    // --k missing
    CHECK(run({"compress", ws.txt.string(), ws.path("z.mtc"), "--k", "99"}).status != 0);      // k > 3n
    CHECK(run({"compress", ws.txt.string(), ws.path("z.mtc"), "--k", "3", "--backend", "zip"}).status != 0);
    CHECK(run({"compress", ws.path("missing.txt"), ws.path("z.mtc"), "--k", "3"}).status != 0);
    CHECK(run({"decompress", ws.txt.string(), ws.path("z.txt")}).status != 0);               // not a stream
    CHECK(run({"analyze", ws.txt.string(), "--clip-out", ws.path("c.csv")}).status != 0);     // needs --J
    CHECK(run({"bogus"}).status != 0);
    const auto help = run({"--help"});
    CHECK(help.status == 0);
    CHECK(help.out.find("compress") != std::string::npos);
}
