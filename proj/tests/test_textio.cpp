#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "lhi/container.hpp"
#include "lhi/error.hpp"
#include "lhi/matrix.hpp"
#include "lhi/parallel.hpp"
#include "lhi/rng.hpp"
#include "lhi/textio.hpp"

using namespace lhi;
namespace fs = std::filesystem;

namespace {
fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("lhi_textio_" + name);
}
}  // namespace

TEST_SUITE("textio") {

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.0, 1.0, -1.0, 1.0 / 3.0, 3.14159265358979312, 1e-300, 2.5e300,
                     123456.789012345678, -0.0625}) {
        CHECK(textio::parse_double(textio::format_double(v)) == v);
    }
}

TEST_CASE("parse_double rejects partial and empty tokens") {
    CHECK(textio::parse_double("42") == 42.0);
    CHECK(textio::parse_double("-1.5e3") == -1500.0);
    CHECK_THROWS_AS(textio::parse_double("12abc"), ParseError);
    CHECK_THROWS_AS(textio::parse_double(""), ParseError);
    CHECK_THROWS_AS(textio::parse_double("nanx", 7), ParseError);
}

TEST_CASE("parse_double error carries the line number") {
    try {
        textio::parse_double("bogus", 13);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 13);
        CHECK(std::string(e.what()).find("13") != std::string::npos);
    }
}

TEST_CASE("split_ws handles runs and edges") {
    auto parts = textio::split_ws("  a\t\tbb  c ");
    REQUIRE(parts.size() == 3);
    CHECK(parts[0] == "a");
    CHECK(parts[1] == "bb");
    CHECK(parts[2] == "c");
    CHECK(textio::split_ws("").empty());
    CHECK(textio::split_ws(" \t ").empty());
}

TEST_CASE("atomic write then read round-trips and leaves no temp file") {
    const fs::path path = temp_file("roundtrip.txt");
    textio::write_file_atomic(path, "line1\nline2\n");
    CHECK(textio::read_file(path) == "line1\nline2\n");
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    fs::remove(path);
}

TEST_CASE("read_file on a missing path is an IO error") {
    CHECK_THROWS_AS(textio::read_file(temp_file("does_not_exist")), IoError);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
    CHECK(textio::fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(textio::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("to_hex is fixed-width lowercase") {
    CHECK(textio::to_hex(0) == "0000000000000000");
    CHECK(textio::to_hex(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
}

TEST_CASE("join_csv joins without a trailing newline") {
    CHECK(textio::join_csv({"a", "b", "c"}) == "a,b,c");
    CHECK(textio::join_csv({"solo"}) == "solo");
    CHECK(textio::join_csv({}) == "");
}

TEST_CASE("matrix shape check throws with both shapes in the message") {
    Matrix m(2, 3);
    CHECK_NOTHROW(require_shape(m, 2, 3, "m"));
    CHECK_THROWS_AS(require_shape(m, 3, 2, "m"), ShapeError);
}

TEST_CASE("container round-trips kind, meta and arrays bitwise") {
    TextContainer c;
    c.kind = "ae";
    c.add_meta("dataset", "FD001");
    Matrix w(2, 2);
    w.at(0, 0) = 1.0 / 3.0;
    w.at(1, 1) = -2.75e-4;
    c.add_array("w", w);
    c.add_vector("b", {0.1, 0.2, 0.3});
    c.add_scalar("beta", 0.5);

    const TextContainer back = TextContainer::deserialize(c.serialize());
    CHECK(back.kind == "ae");
    CHECK(back.require_meta("dataset") == "FD001");
    CHECK(back.require_array("w").at(0, 0) == 1.0 / 3.0);
    CHECK(back.require_array("w").at(1, 1) == -2.75e-4);
    CHECK(back.require_vector("b") == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(back.require_scalar("beta") == 0.5);
    CHECK_FALSE(back.find_meta("missing").has_value());
    CHECK(back.has_array("w"));
    CHECK_FALSE(back.has_array("v"));
}

TEST_CASE("container rejects corruption, truncation and version drift") {
    TextContainer c;
    c.kind = "ae";
    c.add_vector("b", {1.0, 2.0});
    std::string text = c.serialize();

    SUBCASE("altered digest fails the checksum") {
        std::string bad = text;
        const std::size_t pos = bad.rfind("end ") + 4;
        bad[pos] = bad[pos] == '0' ? '1' : '0';
        CHECK_THROWS_AS(TextContainer::deserialize(bad), CheckpointError);
    }
    SUBCASE("flipped payload byte fails the checksum") {
        std::string bad = text;
        const std::size_t row = bad.find("\n1 2\n");
        REQUIRE(row != std::string::npos);
        bad[row + 1] = '7';
        CHECK_THROWS_AS(TextContainer::deserialize(bad), CheckpointError);
    }
    SUBCASE("missing end line") {
        const std::string bad = text.substr(0, text.find("end "));
        CHECK_THROWS_AS(TextContainer::deserialize(bad), CheckpointError);
    }
    SUBCASE("truncated array body") {
        TextContainer big;
        big.kind = "ae";
        big.add_array("w", Matrix(3, 2, 1.0));
        std::string whole = big.serialize();
        // Drop the final data row together with the end line.
        std::size_t cut = whole.rfind("end ");
        cut = whole.rfind('\n', cut - 2);
        CHECK_THROWS_AS(TextContainer::deserialize(whole.substr(0, cut + 1)), CheckpointError);
    }
    SUBCASE("foreign magic") {
        CHECK_THROWS_AS(TextContainer::deserialize("XYZ 1 ae\nend 0\n"), CheckpointError);
    }
    SUBCASE("future version") {
        std::string bad = text;
        bad.replace(bad.find(" 1 "), 3, " 2 ");
        CHECK_THROWS_AS(TextContainer::deserialize(bad), CheckpointError);
    }
    SUBCASE("missing entries throw checkpoint errors") {
        const TextContainer back = TextContainer::deserialize(text);
        CHECK_THROWS_AS(back.require_meta("nope"), CheckpointError);
        CHECK_THROWS_AS(back.require_array("nope"), CheckpointError);
        CHECK_THROWS_AS(back.require_scalar("b"), CheckpointError);  // not 1x1
    }
}

TEST_CASE("save/load container enforces the expected kind") {
    const fs::path path = temp_file("container.txt");
    TextContainer c;
    c.kind = "norm";
    c.add_scalar("x", 4.0);
    save_container(path, c);
    CHECK(load_container(path, "norm").require_scalar("x") == 4.0);
    CHECK_THROWS_AS(load_container(path, "ae"), CheckpointError);
    CHECK_THROWS_AS(load_container(temp_file("absent.txt"), "norm"), IoError);
    fs::remove(path);
}

TEST_CASE("substreams are reproducible and key-sensitive") {
    auto a1 = rng::substream(42, 1, 2, 3);
    auto a2 = rng::substream(42, 1, 2, 3);
    auto b = rng::substream(42, 1, 2, 4);
    CHECK(a1() == a2());
    CHECK(a1() != b());
}

TEST_CASE("uniform01 stays in [0,1) and uniform01_open in (0,1]") {
    auto gen = rng::substream(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng::uniform01(gen);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = rng::uniform01_open(gen);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("gauss consumes exactly two engine draws") {
    auto g1 = rng::substream(9, 1);
    auto g2 = g1;
    (void)rng::gauss(g1);
    g2();
    g2();
    CHECK(rng::gauss(g1) == rng::gauss(g2));
}

TEST_CASE("gauss is standard normal to sampling accuracy") {
    auto gen = rng::substream(11);
    const int n = 20000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng::gauss(gen);
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("parallel_for visits each index once for any worker count") {
    for (int threads : {1, 2, 7}) {
        std::vector<int> hits(101, 0);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 101);
        CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
    }
    CHECK_NOTHROW(parallel_for(0, 4, [](std::size_t) { FAIL("must not run"); }));
}

TEST_CASE("error types carry their exit codes") {
    CHECK(UsageError("u").code() == ExitCode::usage);
    CHECK(IoError("i").code() == ExitCode::io);
    CHECK(ParseError("p", 3).code() == ExitCode::io);
    CHECK(IntegrityError("n").code() == ExitCode::io);
    CHECK(TrainingError("t").code() == ExitCode::training);
    CHECK(CheckpointError("c").code() == ExitCode::checkpoint);
    CHECK(ShapeError("s").code() == ExitCode::usage);
}

TEST_CASE("warn sink replacement captures messages") {
    std::vector<std::string> seen;
    auto previous = logging::set_warn_sink([&](std::string_view m) { seen.emplace_back(m); });
    logging::warn("something odd");
    logging::set_warn_sink(previous);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0] == "something odd");
}

}  // TEST_SUITE
