#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "topsim/ingest.hpp"

using namespace topsim;
namespace fs = std::filesystem;

namespace {

const char* kTwoFrames =
    "3\n"
    "comment line\n"
    "C 0.0 0.0 0.0\n"
    "O 1.5 0.0 0.0\n"
    "H 0.0 2.25 0.0\n"
    "\n"
    "2\n"
    "second frame\n"
    "N 0.125 -3.5 7.0\n"
    "N 10 10 10\n";

fs::path make_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("parse_xyz reads multi-frame files with blank separators") {
    TrajectorySet traj = parse_xyz(kTwoFrames, "demo");
    CHECK(traj.group_label == "demo");
    REQUIRE(traj.frames.size() == 2);
    CHECK(traj.frames[0].size() == 3);
    CHECK(traj.frames[1].size() == 2);
    CHECK(traj.frames[0].frame_id == 0);
    CHECK(traj.frames[1].frame_id == 1);
    CHECK(traj.frames[0].source_tag == "demo");
    CHECK(traj.frames[0].elements[1] == "O");
    CHECK(traj.frames[0].points[1].x() == 1.5);
    CHECK(traj.frames[1].points[0].y() == -3.5);
}

TEST_CASE("write_xyz round-trips coordinates exactly") {
    TrajectorySet traj = parse_xyz(kTwoFrames, "demo");
    // Perturb with values that do not have short decimal forms.
    traj.frames[0].points[0] = Eigen::Vector3d(1.0 / 3.0, 2.0 / 7.0, 1e-17);
    TrajectorySet back = parse_xyz(write_xyz(traj), "demo");
    REQUIRE(back.frames.size() == traj.frames.size());
    for (std::size_t f = 0; f < traj.frames.size(); ++f) {
        REQUIRE(back.frames[f].size() == traj.frames[f].size());
        for (std::size_t i = 0; i < traj.frames[f].size(); ++i)
            for (int c = 0; c < 3; ++c)
                CHECK(back.frames[f].points[i][c] ==
                      traj.frames[f].points[i][c]);
    }
}

TEST_CASE("parse_xyz rejects malformed input") {
    CHECK_THROWS_AS(parse_xyz("", "t"), DataError);
    CHECK_THROWS_AS(parse_xyz("not_a_count\nc\n", "t"), DataError);
    CHECK_THROWS_AS(parse_xyz("2\ncomment\nC 0 0 0\n", "t"), DataError);
    CHECK_THROWS_AS(parse_xyz("1\ncomment\nC 0 zero 0\n", "t"), DataError);
    CHECK_THROWS_AS(parse_xyz("1\n", "t"), DataError);
    CHECK_THROWS_AS(parse_xyz("-3\ncomment\n", "t"), DataError);
    // Duplicate atoms within one frame.
    CHECK_THROWS_AS(
        parse_xyz("2\nc\nC 1 1 1\nC 1 1 1\n", "t"), DataError);
}

TEST_CASE("validate_cloud enforces finiteness and distinctness") {
    PointCloud c;
    CHECK_THROWS_AS(validate_cloud(c), DataError);
    c.points.push_back(Eigen::Vector3d(0, 0, 0));
    CHECK_NOTHROW(validate_cloud(c));
    c.points.push_back(
        Eigen::Vector3d(std::numeric_limits<double>::quiet_NaN(), 0, 0));
    CHECK_THROWS_AS(validate_cloud(c), DataError);
    c.points[1] = Eigen::Vector3d(0, 0, 5e-10);
    CHECK_THROWS_AS(validate_cloud(c), DataError);
    c.points[1] = Eigen::Vector3d(0, 0, 1e-3);
    CHECK_NOTHROW(validate_cloud(c));
}

TEST_CASE("load_inputs handles files and directories") {
    fs::path dir = make_dir("topsim_ingest_test");
    std::ofstream(dir / "b_second.xyz") << "1\nc\nC 0 0 0\n";
    std::ofstream(dir / "a_first.xyz") << "1\nc\nC 1 1 1\n";
    std::ofstream(dir / "ignored.txt") << "nothing";

    auto sets = load_inputs({dir.string()});
    REQUIRE(sets.size() == 2);
    // Lexicographic file order, tags from stems.
    CHECK(sets[0].group_label == "a_first");
    CHECK(sets[1].group_label == "b_second");
    CHECK(sets[0].frames[0].source_tag == "a_first");

    auto single = load_inputs({(dir / "a_first.xyz").string()});
    REQUIRE(single.size() == 1);
    CHECK(single[0].frames[0].points[0].x() == 1.0);

    CHECK_THROWS_AS(load_inputs({(dir / "missing.xyz").string()}), DataError);
    fs::path empty_dir = make_dir("topsim_ingest_empty");
    CHECK_THROWS_AS(load_inputs({empty_dir.string()}), DataError);
    fs::remove_all(dir);
    fs::remove_all(empty_dir);
}
