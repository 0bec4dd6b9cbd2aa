#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "lhi/cmapss.hpp"
#include "lhi/error.hpp"
#include "lhi/synthetic.hpp"
#include "lhi/textio.hpp"

using namespace lhi;
namespace fs = std::filesystem;

namespace {

struct WarnCapture {
    std::vector<std::string> messages;
    logging::WarnSink previous;
    WarnCapture() {
        previous = logging::set_warn_sink(
            [this](std::string_view m) { messages.emplace_back(m); });
    }
    ~WarnCapture() { logging::set_warn_sink(previous); }
};

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "lhi_cmapss_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_scratch(const std::string& name, const std::string& content) {
    const fs::path path = scratch_dir() / name;
    textio::write_file_atomic(path, content);
    return path;
}

// Two units, 26 columns each; values chosen small and distinct.
std::string two_unit_text() {
    std::string text;
    for (int unit = 1; unit <= 2; ++unit) {
        for (int cycle = 1; cycle <= 2 + unit; ++cycle) {
            text += std::to_string(unit) + " " + std::to_string(cycle);
            for (int c = 0; c < 24; ++c) {
                text += " " + std::to_string(unit * 100 + cycle * 10 + c) + ".5";
            }
            text += " \n";  // the public files carry trailing whitespace
        }
    }
    return text;
}

}  // namespace

TEST_SUITE("cmapss") {

TEST_CASE("canonical counts match the published table") {
    auto c1 = cmapss::canonical_counts("FD001");
    REQUIRE(c1.has_value());
    CHECK(c1->train_units == 100);
    CHECK(c1->test_units == 100);
    CHECK(c1->conditions == 1);
    CHECK(c1->fault_modes == 1);

    auto c2 = cmapss::canonical_counts("FD002");
    REQUIRE(c2.has_value());
    CHECK(c2->train_units == 260);
    CHECK(c2->test_units == 259);
    CHECK(c2->conditions == 6);
    CHECK(c2->fault_modes == 1);

    auto c3 = cmapss::canonical_counts("FD003");
    REQUIRE(c3.has_value());
    CHECK(c3->train_units == 100);
    CHECK(c3->test_units == 100);
    CHECK(c3->conditions == 1);
    CHECK(c3->fault_modes == 2);

    auto c4 = cmapss::canonical_counts("FD004");
    REQUIRE(c4.has_value());
    CHECK(c4->train_units == 248);
    CHECK(c4->test_units == 249);
    CHECK(c4->conditions == 6);
    CHECK(c4->fault_modes == 2);

    CHECK_FALSE(cmapss::canonical_counts("FD005").has_value());
}

TEST_CASE("parse_trajectories splits columns into settings and sensors") {
    const fs::path path = write_scratch("ok.txt", two_unit_text());
    const auto trajs = cmapss::parse_trajectories(path, cmapss::TrajKind::train);
    REQUIRE(trajs.size() == 2);
    CHECK(trajs[0].unit_id == 1);
    CHECK(trajs[0].length() == 3);
    CHECK(trajs[1].unit_id == 2);
    CHECK(trajs[1].length() == 4);
    CHECK(trajs[0].settings.rows == 3);
    CHECK(trajs[0].settings.cols == 3);
    CHECK(trajs[0].sensors.cols == 21);
    // Column 3 of the line is settings[0]; column 6 is sensors[0].
    CHECK(trajs[0].settings.at(0, 0) == 110.5);
    CHECK(trajs[0].settings.at(1, 2) == 122.5);
    CHECK(trajs[0].sensors.at(0, 0) == 113.5);
    CHECK(trajs[1].sensors.at(3, 20) == 263.5);
}

TEST_CASE("parser error paths") {
    SUBCASE("missing file") {
        CHECK_THROWS_AS(
            cmapss::parse_trajectories(scratch_dir() / "absent.txt", cmapss::TrajKind::train),
            IoError);
    }
    SUBCASE("wrong column count names the line") {
        const fs::path path = write_scratch("cols.txt", "1 1 0.0 0.0\n");
        try {
            cmapss::parse_trajectories(path, cmapss::TrajKind::train);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 1);
        }
    }
    SUBCASE("non-numeric value") {
        std::string text = two_unit_text();
        text.replace(text.find("110.5"), 5, "oops!");
        const fs::path path = write_scratch("nan.txt", text);
        CHECK_THROWS_AS(cmapss::parse_trajectories(path, cmapss::TrajKind::train), ParseError);
    }
    SUBCASE("cycle gap breaks contiguity") {
        std::string text;
        text += "1 1";
        for (int c = 0; c < 24; ++c) text += " 0.0";
        text += "\n1 3";
        for (int c = 0; c < 24; ++c) text += " 0.0";
        text += "\n";
        const fs::path path = write_scratch("gap.txt", text);
        CHECK_THROWS_AS(cmapss::parse_trajectories(path, cmapss::TrajKind::train),
                        IntegrityError);
    }
    SUBCASE("unit ids must be contiguous from 1") {
        std::string text;
        text += "2 1";
        for (int c = 0; c < 24; ++c) text += " 0.0";
        text += "\n";
        const fs::path path = write_scratch("unit2.txt", text);
        CHECK_THROWS_AS(cmapss::parse_trajectories(path, cmapss::TrajKind::train),
                        IntegrityError);
    }
    SUBCASE("empty file warns and yields nothing") {
        WarnCapture warns;
        const fs::path path = write_scratch("empty.txt", "");
        CHECK(cmapss::parse_trajectories(path, cmapss::TrajKind::train).empty());
        REQUIRE(warns.messages.size() == 1);
        CHECK(warns.messages[0].find("empty") != std::string::npos);
    }
}

TEST_CASE("parse_rul_file maps lines to test units in order") {
    const fs::path traj_path = write_scratch("rul_traj.txt", two_unit_text());
    const auto test = cmapss::parse_trajectories(traj_path, cmapss::TrajKind::test);

    const fs::path rul_path = write_scratch("rul_ok.txt", "17\n3\n");
    const auto rul = cmapss::parse_rul_file(rul_path, test);
    REQUIRE(rul.size() == 2);
    CHECK(rul.at(1) == 17.0);
    CHECK(rul.at(2) == 3.0);

    SUBCASE("count mismatch") {
        const fs::path bad = write_scratch("rul_short.txt", "17\n");
        CHECK_THROWS_AS(cmapss::parse_rul_file(bad, test), IntegrityError);
    }
    SUBCASE("negative RUL") {
        const fs::path bad = write_scratch("rul_neg.txt", "17\n-1\n");
        CHECK_THROWS_AS(cmapss::parse_rul_file(bad, test), ParseError);
    }
}

TEST_CASE("serialize then parse is bitwise lossless") {
    const fs::path path = write_scratch("roundtrip_src.txt", two_unit_text());
    const auto trajs = cmapss::parse_trajectories(path, cmapss::TrajKind::train);
    const fs::path back_path = write_scratch("roundtrip.txt",
                                             cmapss::serialize_trajectories(trajs));
    const auto back = cmapss::parse_trajectories(back_path, cmapss::TrajKind::train);
    REQUIRE(back.size() == trajs.size());
    for (std::size_t u = 0; u < trajs.size(); ++u) {
        CHECK(back[u].unit_id == trajs[u].unit_id);
        CHECK(back[u].settings.data == trajs[u].settings.data);
        CHECK(back[u].sensors.data == trajs[u].sensors.data);
    }
}

TEST_CASE("load_split stitches the three files and checks counts") {
    const fs::path dir = scratch_dir() / "mini_corpus";
    synthetic::SynthParams p;
    p.name = "FD001";
    p.train_units = 4;
    p.test_units = 3;
    p.conditions = 1;
    p.fault_modes = 1;
    p.seed = 99;
    p.min_life = 60;
    p.max_life = 90;
    synthetic::write_dataset(dir, p);

    WarnCapture warns;  // 4/3 units do not match the published 100/100
    const auto split = cmapss::load_split(dir, "FD001");
    CHECK(split.name == "FD001");
    CHECK(split.train.size() == 4);
    CHECK(split.test.size() == 3);
    CHECK(split.test_rul.size() == 3);
    CHECK_FALSE(warns.messages.empty());
    for (const auto& traj : split.test) {
        CHECK(split.test_rul.count(traj.unit_id) == 1);
    }

    CHECK_THROWS_AS(cmapss::load_split(dir, "FD009"), UsageError);
    CHECK_THROWS_AS(cmapss::load_split(scratch_dir() / "nowhere", "FD001"), IoError);
}

TEST_CASE("synthetic generator hits the published table counts") {
    const fs::path dir = scratch_dir() / "fd003_corpus";
    synthetic::write_dataset(dir, synthetic::synth_params_for("FD003", 5));
    const auto split = cmapss::load_split(dir, "FD003");
    CHECK(split.train.size() == 100);
    CHECK(split.test.size() == 100);
    for (const auto& traj : split.train) {
        CHECK(traj.length() >= 40);
    }
    for (const auto& [unit, rul] : split.test_rul) {
        CHECK(rul >= 0.0);
    }
    CHECK_THROWS_AS(synthetic::synth_params_for("FD007", 5), UsageError);
}

}  // TEST_SUITE
