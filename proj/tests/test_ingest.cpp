#include <doctest.h>

#include <cmath>
#include <fstream>

#include "strokebench/errors.hpp"
#include "strokebench/ingest.hpp"
#include "strokebench/rng.hpp"
#include "synthetic.hpp"

using namespace strokebench;
using testsupport::TempDir;

namespace {

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::array<SensorStream, 4> streams_of_lengths(std::size_t a, std::size_t b, std::size_t c,
                                               std::size_t d) {
    std::array<SensorStream, 4> streams;
    const std::size_t lens[4] = {a, b, c, d};
    for (int s = 0; s < 4; ++s) {
        streams[s].sensor_id = kAllSensors[static_cast<std::size_t>(s)];
        for (std::size_t i = 0; i < lens[s]; ++i) {
            ImuSample sample;
            sample.index = static_cast<std::int64_t>(i);
            sample.accel = Eigen::Vector3d(0.1 * static_cast<double>(i), 0, 9.8);
            sample.gyro = Eigen::Vector3d(0, 0.01, 0);
            streams[s].samples.push_back(sample);
        }
    }
    return streams;
}

}  // namespace

TEST_CASE("parse_sensor_file converts units on a hand-built fixture") {
    TempDir tmp("parse");
    // Raw counts chosen so the hand conversion is exact: with accel scale
    // 0.5 and gyro scale 0.25 the expected SI values are trivial.
    const auto path = write_file(tmp.path(), "s.csv",
                                 "index,ax,ay,az,gx,gy,gz\n"
                                 "0,2,4,6,8,4,0\n"
                                 "1,1,0,-2,-4,0,12\n"
                                 "2,0,0,20,0,0,0\n");
    ScaleSpec scale{0.5, 0.25};
    const SensorStream stream = parse_sensor_file(path, SensorId::Wrist, scale);
    REQUIRE(stream.size() == 3);
    CHECK(stream.samples[0].accel == Eigen::Vector3d(1.0, 2.0, 3.0));
    CHECK(stream.samples[0].gyro == Eigen::Vector3d(2.0, 1.0, 0.0));
    CHECK(stream.samples[1].accel == Eigen::Vector3d(0.5, 0.0, -1.0));
    CHECK(stream.samples[1].gyro == Eigen::Vector3d(-1.0, 0.0, 3.0));
    CHECK(stream.samples[2].accel.z() == doctest::Approx(10.0));
    CHECK(stream.samples[2].index == 2);
}

TEST_CASE("parse_sensor_file rejects malformed rows with the line number") {
    TempDir tmp("parse_bad");
    const auto path = write_file(tmp.path(), "bad.csv",
                                 "index,ax,ay,az,gx,gy,gz\n"
                                 "0,a,b,c,d,e,f\n");
    try {
        parse_sensor_file(path, SensorId::Wrist, ScaleSpec::identity());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("parse_sensor_file edge cases") {
    TempDir tmp("parse_edge");
    SUBCASE("header-only file yields an empty stream") {
        const auto path = write_file(tmp.path(), "empty.csv", "index,ax,ay,az,gx,gy,gz\n");
        CHECK(parse_sensor_file(path, SensorId::Forearm, ScaleSpec::identity()).size() == 0);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(
            parse_sensor_file(tmp.path() / "nope.csv", SensorId::Wrist, ScaleSpec::identity()),
            IoError);
    }
    SUBCASE("bad header") {
        const auto path = write_file(tmp.path(), "h.csv", "idx,ax,ay,az,gx,gy,gz\n");
        CHECK_THROWS_AS(parse_sensor_file(path, SensorId::Wrist, ScaleSpec::identity()),
                        ParseError);
    }
    SUBCASE("wrong column count") {
        const auto path = write_file(tmp.path(), "c.csv",
                                     "index,ax,ay,az,gx,gy,gz\n0,1,2,3,4,5\n");
        CHECK_THROWS_AS(parse_sensor_file(path, SensorId::Wrist, ScaleSpec::identity()),
                        ParseError);
    }
    SUBCASE("non-monotone indices") {
        const auto path = write_file(tmp.path(), "m.csv",
                                     "index,ax,ay,az,gx,gy,gz\n"
                                     "0,1,1,1,0,0,0\n"
                                     "2,1,1,1,0,0,0\n"
                                     "1,1,1,1,0,0,0\n");
        CHECK_THROWS_AS(parse_sensor_file(path, SensorId::Wrist, ScaleSpec::identity()),
                        ValidationError);
    }
}

TEST_CASE("parse -> serialize -> parse is identity on the payload") {
    TempDir tmp("roundtrip");
    Rng rng(7);
    SensorStream stream;
    stream.sensor_id = SensorId::Biceps;
    for (int i = 0; i < 200; ++i) {
        ImuSample s;
        s.index = i;
        for (int c = 0; c < 3; ++c) {
            s.accel[c] = rng.normal(0.0, 9.0);
            s.gyro[c] = rng.normal(0.0, 2.0);
        }
        stream.samples.push_back(s);
    }
    const auto path = tmp.path() / "rt.csv";
    write_sensor_stream(stream, path);
    const SensorStream back = parse_sensor_file(path, SensorId::Biceps, ScaleSpec::identity());
    REQUIRE(back.size() == stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            CHECK(back.samples[i].accel[c] ==
                  doctest::Approx(stream.samples[i].accel[c]).epsilon(1e-9));
            CHECK(back.samples[i].gyro[c] ==
                  doctest::Approx(stream.samples[i].gyro[c]).epsilon(1e-9));
        }
    }
}

TEST_CASE("mpu6050 scale constants") {
    const ScaleSpec scale = ScaleSpec::mpu6050();
    CHECK(scale.accel_to_mps2 == doctest::Approx(9.80665 / 16384.0).epsilon(1e-12));
    CHECK(scale.gyro_to_radps == doctest::Approx(M_PI / 180.0 / 131.0).epsilon(1e-12));
}

TEST_CASE("align_streams") {
    SUBCASE("equal lengths unchanged") {
        auto aligned = align_streams(streams_of_lengths(100, 100, 100, 100));
        for (const auto& s : aligned) CHECK(s.size() == 100);
    }
    SUBCASE("truncates to the minimum and re-bases indices") {
        auto aligned = align_streams(streams_of_lengths(100, 98, 100, 99));
        for (const auto& s : aligned) {
            CHECK(s.size() == 98);
            CHECK(s.samples.front().index == 0);
            CHECK(s.samples.back().index == 97);
        }
    }
    SUBCASE("empty stream is an error") {
        CHECK_THROWS_AS(align_streams(streams_of_lengths(100, 0, 100, 100)), ValidationError);
    }
    SUBCASE("idempotent") {
        auto once = align_streams(streams_of_lengths(51, 64, 52, 60));
        auto twice = align_streams(once);
        for (int s = 0; s < 4; ++s) {
            REQUIRE(twice[s].size() == once[s].size());
            for (std::size_t i = 0; i < once[s].size(); ++i) {
                CHECK(twice[s].samples[i].index == once[s].samples[i].index);
                CHECK(twice[s].samples[i].accel == once[s].samples[i].accel);
            }
        }
    }
}

TEST_CASE("split_realizations") {
    const auto streams = align_streams(streams_of_lengths(128, 128, 128, 128));
    SUBCASE("partitions into per-boundary realizations") {
        AnnotationIndex ann{"alice", {{0, 64}, {64, 128}}};
        const auto rs = split_realizations(streams, ann);
        REQUIRE(rs.size() == 2);
        CHECK(rs[0].length == 64);
        CHECK(rs[1].length == 64);
        CHECK(rs[0].person_id == "alice");
        CHECK(rs[0].stroke_index == 0);
        CHECK(rs[1].stroke_index == 1);
        // Slices carry the right payload: sample 70 of the source is sample 6
        // of realization 1.
        CHECK(rs[1].stream(SensorId::Wrist).samples[6].accel.x() ==
              doctest::Approx(0.1 * 70.0));
    }
    SUBCASE("out-of-range boundary") {
        AnnotationIndex ann{"bob", {{0, 200}}};
        CHECK_THROWS_AS(split_realizations(streams, ann), ValidationError);
    }
    SUBCASE("overlapping boundaries") {
        AnnotationIndex ann{"bob", {{0, 64}, {60, 100}}};
        CHECK_THROWS_AS(split_realizations(streams, ann), ValidationError);
    }
    SUBCASE("fifty boundaries give fifty realizations") {
        const auto big = align_streams(streams_of_lengths(500, 500, 500, 500));
        AnnotationIndex ann{"carol", {}};
        for (int i = 0; i < 50; ++i) ann.boundaries.emplace_back(i * 10, i * 10 + 10);
        CHECK(split_realizations(big, ann).size() == 50);
    }
    SUBCASE("lengths sum to the covered measure and no sample is shared") {
        AnnotationIndex ann{"dave", {{3, 20}, {20, 57}, {60, 128}}};
        const auto rs = split_realizations(streams, ann);
        std::size_t total = 0;
        for (const auto& r : rs) total += r.length;
        CHECK(total == (20 - 3) + (57 - 20) + (128 - 60));
        CHECK(rs[1].stream(SensorId::Wrist).samples[0].accel.x() ==
              doctest::Approx(0.1 * 20.0));
        CHECK(rs[0].stream(SensorId::Wrist).samples.back().accel.x() ==
              doctest::Approx(0.1 * 19.0));
    }
}

TEST_CASE("validate_realization") {
    const auto streams = align_streams(streams_of_lengths(64, 64, 64, 64));
    AnnotationIndex ann{"p", {{0, 64}}};
    auto realization = split_realizations(streams, ann).front();
    ValidationSpec limits;

    SUBCASE("clean realization passes") {
        CHECK(validate_realization(realization, limits).ok());
    }
    SUBCASE("NaN names sensor, sample and channel") {
        realization.streams[static_cast<int>(SensorId::Biceps)].samples[7].accel.y() =
            std::numeric_limits<double>::quiet_NaN();
        const auto verdict = validate_realization(realization, limits);
        REQUIRE(verdict.violations.size() == 1);
        CHECK(verdict.violations[0].kind == Violation::Kind::NonFinite);
        CHECK(verdict.violations[0].sensor == SensorId::Biceps);
        CHECK(verdict.violations[0].sample == 7);
        CHECK(verdict.violations[0].channel == "ay");
    }
    SUBCASE("length below minimum") {
        realization.length = 2;
        for (auto& s : realization.streams) s.samples.resize(2);
        const auto verdict = validate_realization(realization, limits);
        REQUIRE(verdict.violations.size() == 1);
        CHECK(verdict.violations[0].kind == Violation::Kind::LengthOutOfRange);
    }
    SUBCASE("gyro saturation") {
        realization.streams[0].samples[3].gyro = Eigen::Vector3d(5.0, 0, 0);
        const auto verdict = validate_realization(realization, limits);
        REQUIRE(verdict.violations.size() == 1);
        CHECK(verdict.violations[0].kind == Violation::Kind::GyroSaturation);
    }
}

TEST_CASE("annotation and manifest parsing") {
    TempDir tmp("manifest");
    write_file(tmp.path(), "ann.json", R"({"person_id":"p01","boundaries":[[0,64],[64,120]]})");
    const auto ann = parse_annotation_file(tmp.path() / "ann.json");
    CHECK(ann.person_id == "p01");
    REQUIRE(ann.boundaries.size() == 2);
    CHECK(ann.boundaries[1].first == 64);

    SUBCASE("well-formed manifest resolves relative paths") {
        write_file(tmp.path(), "manifest.json", R"({
          "expected_realizations": 2,
          "participants": [{
            "person_id": "p01",
            "sensors": {"wrist":"w.csv","forearm":"f.csv","biceps":"b.csv","shoulder":"s.csv"},
            "annotation": "ann.json",
            "measurements": "meas.json"
          }]})");
        const auto manifest = parse_manifest(tmp.path() / "manifest.json");
        CHECK(manifest.expected_realizations == 2);
        REQUIRE(manifest.participants.size() == 1);
        CHECK(manifest.participants[0].sensor_files[static_cast<int>(SensorId::Shoulder)] ==
              tmp.path() / "s.csv");
    }
    SUBCASE("missing sensor key is an error") {
        write_file(tmp.path(), "short.json", R"({
          "participants": [{
            "person_id": "p01",
            "sensors": {"wrist":"w.csv","forearm":"f.csv","biceps":"b.csv"},
            "annotation": "a.json",
            "measurements": "m.json"
          }]})");
        CHECK_THROWS(parse_manifest(tmp.path() / "short.json"));
    }
    SUBCASE("duplicate person is an error") {
        write_file(tmp.path(), "dup.json", R"({
          "participants": [
            {"person_id":"x","sensors":{"wrist":"w","forearm":"f","biceps":"b","shoulder":"s"},
             "annotation":"a","measurements":"m"},
            {"person_id":"x","sensors":{"wrist":"w","forearm":"f","biceps":"b","shoulder":"s"},
             "annotation":"a","measurements":"m"}
          ]})");
        CHECK_THROWS_AS(parse_manifest(tmp.path() / "dup.json"), ValidationError);
    }
}
