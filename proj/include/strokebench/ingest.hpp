#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace strokebench {

enum class SensorId { Wrist = 0, Forearm = 1, Biceps = 2, Shoulder = 3 };

inline constexpr std::array<SensorId, 4> kAllSensors{SensorId::Wrist, SensorId::Forearm,
                                                     SensorId::Biceps, SensorId::Shoulder};

const char* sensor_name(SensorId id);
SensorId sensor_from_name(const std::string& name);

struct ImuSample {
    std::int64_t index = 0;
    Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // m/s^2
    Eigen::Vector3d gyro = Eigen::Vector3d::Zero();   // rad/s
};

struct SensorStream {
    SensorId sensor_id = SensorId::Wrist;
    std::vector<ImuSample> samples;
    double sample_rate_hz = 64.0;

    std::size_t size() const { return samples.size(); }
};

// Multiplicative conversion from file counts to SI units.
struct ScaleSpec {
    double accel_to_mps2 = 1.0;
    double gyro_to_radps = 1.0;

    // MPU6050 at +/-2 g (16384 LSB/g) and +/-250 deg/s (131 LSB/(deg/s)).
    static ScaleSpec mpu6050();
    // Files already hold SI floats.
    static ScaleSpec identity() { return {}; }
};

struct ImuRealization {
    std::string person_id;
    std::int64_t stroke_index = 0;
    std::array<SensorStream, 4> streams;  // indexed by SensorId
    std::size_t length = 0;

    const SensorStream& stream(SensorId id) const { return streams[static_cast<int>(id)]; }
};

struct AnnotationIndex {
    std::string person_id;
    std::vector<std::pair<std::int64_t, std::int64_t>> boundaries;  // [start, end)
};

struct ParticipantEntry {
    std::string person_id;
    std::array<std::filesystem::path, 4> sensor_files;  // indexed by SensorId
    std::filesystem::path annotation_file;
    std::filesystem::path measurement_file;
};

struct SessionManifest {
    std::vector<ParticipantEntry> participants;
    std::size_t expected_realizations = 50;
};

struct ValidationSpec {
    std::size_t min_length = 16;
    std::size_t max_length = 4096;
    double gyro_saturation_radps = 4.363323129985824;  // 250 deg/s
};

struct Violation {
    enum class Kind { NonFinite, LengthOutOfRange, GyroSaturation };
    Kind kind;
    SensorId sensor;
    std::int64_t sample;   // -1 when not sample-specific
    std::string channel;   // "ax".."gz", empty when not channel-specific
    std::string message;
};

struct ValidationVerdict {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Reads a `index,ax,ay,az,gx,gy,gz` record file and applies the unit scale.
SensorStream parse_sensor_file(const std::filesystem::path& path, SensorId id,
                               const ScaleSpec& scale, double sample_rate_hz = 64.0);

// Writes a stream back out in the same format (SI units, full precision).
void write_sensor_stream(const SensorStream& stream, const std::filesystem::path& path);

// Truncates all four streams to the shortest and re-bases indices at 0.
std::array<SensorStream, 4> align_streams(std::array<SensorStream, 4> streams);

std::vector<ImuRealization> split_realizations(const std::array<SensorStream, 4>& streams,
                                               const AnnotationIndex& ann);

ValidationVerdict validate_realization(const ImuRealization& r, const ValidationSpec& limits);

AnnotationIndex parse_annotation_file(const std::filesystem::path& path);
SessionManifest parse_manifest(const std::filesystem::path& path);

}  // namespace strokebench
