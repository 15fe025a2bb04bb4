#include "strokebench/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "strokebench/errors.hpp"

namespace strokebench {

using nlohmann::json;

const char* sensor_name(SensorId id) {
    switch (id) {
        case SensorId::Wrist: return "wrist";
        case SensorId::Forearm: return "forearm";
        case SensorId::Biceps: return "biceps";
        case SensorId::Shoulder: return "shoulder";
    }
    return "?";
}

SensorId sensor_from_name(const std::string& name) {
    for (SensorId id : kAllSensors)
        if (name == sensor_name(id)) return id;
    throw ValidationError("unknown sensor id '" + name + "'");
}

ScaleSpec ScaleSpec::mpu6050() {
    constexpr double g = 9.80665;
    return {g / 16384.0, (M_PI / 180.0) / 131.0};
}

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("non-numeric field '" + s + "'", path.string(), line);
    if (!std::isfinite(value))
        throw ParseError("non-finite field '" + s + "'", path.string(), line);
    return value;
}

}  // namespace

SensorStream parse_sensor_file(const std::filesystem::path& path, SensorId id,
                               const ScaleSpec& scale, double sample_rate_hz) {
    if (sample_rate_hz <= 0.0) throw ValidationError("sample_rate_hz must be positive");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sensor file " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file, expected header", path.string(), 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    static const std::vector<std::string> kHeader{"index", "ax", "ay", "az", "gx", "gy", "gz"};
    if (split_csv(line) != kHeader)
        throw ParseError("bad header, expected 'index,ax,ay,az,gx,gy,gz'", path.string(), 1);

    SensorStream stream;
    stream.sensor_id = id;
    stream.sample_rate_hz = sample_rate_hz;

    std::size_t line_no = 1;
    std::int64_t prev_index = -1;
    bool have_prev = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 7)
            throw ParseError("expected 7 fields, got " + std::to_string(fields.size()),
                             path.string(), line_no);
        ImuSample s;
        const double idx = parse_double(fields[0], path, line_no);
        s.index = static_cast<std::int64_t>(std::llround(idx));
        if (s.index < 0) throw ParseError("negative sample index", path.string(), line_no);
        if (have_prev && s.index <= prev_index)
            throw ValidationError("non-monotone sample index at " + path.string() + ":" +
                                  std::to_string(line_no));
        prev_index = s.index;
        have_prev = true;
        for (int i = 0; i < 3; ++i)
            s.accel[i] = parse_double(fields[1 + i], path, line_no) * scale.accel_to_mps2;
        for (int i = 0; i < 3; ++i)
            s.gyro[i] = parse_double(fields[4 + i], path, line_no) * scale.gyro_to_radps;
        stream.samples.push_back(s);
    }
    return stream;
}

void write_sensor_stream(const SensorStream& stream, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "index,ax,ay,az,gx,gy,gz\n";
    char buf[256];
    for (const auto& s : stream.samples) {
        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(s.index), s.accel.x(), s.accel.y(), s.accel.z(),
                      s.gyro.x(), s.gyro.y(), s.gyro.z());
        out << buf;
    }
    if (!out) throw IoError("write failed for " + path.string());
}

std::array<SensorStream, 4> align_streams(std::array<SensorStream, 4> streams) {
    std::size_t min_len = streams[0].size();
    for (const auto& s : streams) min_len = std::min(min_len, s.size());
    if (min_len == 0) throw ValidationError("cannot align: at least one stream is empty");
    for (auto& s : streams) {
        s.samples.resize(min_len);
        for (std::size_t i = 0; i < min_len; ++i) s.samples[i].index = static_cast<std::int64_t>(i);
    }
    return streams;
}

std::vector<ImuRealization> split_realizations(const std::array<SensorStream, 4>& streams,
                                               const AnnotationIndex& ann) {
    const std::size_t len = streams[0].size();
    for (const auto& s : streams)
        if (s.size() != len) throw ValidationError("streams must be aligned before splitting");

    std::int64_t prev_end = 0;
    for (std::size_t b = 0; b < ann.boundaries.size(); ++b) {
        const auto [start, end] = ann.boundaries[b];
        if (start < 0 || end <= start)
            throw ValidationError("annotation boundary " + std::to_string(b) +
                                  " is not a valid [start, end) interval");
        if (start < prev_end)
            throw ValidationError("annotation boundaries overlap or are unsorted at entry " +
                                  std::to_string(b));
        if (static_cast<std::size_t>(end) > len)
            throw ValidationError("annotation boundary " + std::to_string(b) +
                                  " exceeds stream length " + std::to_string(len));
        prev_end = end;
    }

    std::vector<ImuRealization> out;
    out.reserve(ann.boundaries.size());
    for (std::size_t b = 0; b < ann.boundaries.size(); ++b) {
        const auto [start, end] = ann.boundaries[b];
        ImuRealization r;
        r.person_id = ann.person_id;
        r.stroke_index = static_cast<std::int64_t>(b);
        r.length = static_cast<std::size_t>(end - start);
        for (std::size_t s = 0; s < 4; ++s) {
            SensorStream& dst = r.streams[s];
            dst.sensor_id = streams[s].sensor_id;
            dst.sample_rate_hz = streams[s].sample_rate_hz;
            dst.samples.assign(streams[s].samples.begin() + start,
                               streams[s].samples.begin() + end);
            for (std::size_t i = 0; i < dst.samples.size(); ++i)
                dst.samples[i].index = static_cast<std::int64_t>(i);
        }
        out.push_back(std::move(r));
    }
    return out;
}

ValidationVerdict validate_realization(const ImuRealization& r, const ValidationSpec& limits) {
    ValidationVerdict verdict;
    if (r.length < limits.min_length || r.length > limits.max_length) {
        verdict.violations.push_back({Violation::Kind::LengthOutOfRange, SensorId::Wrist, -1, "",
                                      "realization length " + std::to_string(r.length) +
                                          " outside [" + std::to_string(limits.min_length) + ", " +
                                          std::to_string(limits.max_length) + "]"});
    }
    static const char* kChannels[6] = {"ax", "ay", "az", "gx", "gy", "gz"};
    for (const auto& stream : r.streams) {
        for (const auto& s : stream.samples) {
            for (int c = 0; c < 3; ++c) {
                if (!std::isfinite(s.accel[c]))
                    verdict.violations.push_back({Violation::Kind::NonFinite, stream.sensor_id,
                                                  s.index, kChannels[c],
                                                  std::string("non-finite accel on ") +
                                                      sensor_name(stream.sensor_id)});
                if (!std::isfinite(s.gyro[c]))
                    verdict.violations.push_back({Violation::Kind::NonFinite, stream.sensor_id,
                                                  s.index, kChannels[3 + c],
                                                  std::string("non-finite gyro on ") +
                                                      sensor_name(stream.sensor_id)});
            }
            if (s.gyro.norm() > limits.gyro_saturation_radps)
                verdict.violations.push_back({Violation::Kind::GyroSaturation, stream.sensor_id,
                                              s.index, "",
                                              std::string("gyro magnitude above saturation on ") +
                                                  sensor_name(stream.sensor_id)});
        }
    }
    return verdict;
}

AnnotationIndex parse_annotation_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotation file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad annotation JSON: ") + e.what(), path.string());
    }
    AnnotationIndex ann;
    try {
        ann.person_id = j.at("person_id").get<std::string>();
        for (const auto& pair : j.at("boundaries")) {
            if (!pair.is_array() || pair.size() != 2)
                throw ParseError("boundary entries must be [start, end] pairs", path.string());
            ann.boundaries.emplace_back(pair[0].get<std::int64_t>(), pair[1].get<std::int64_t>());
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad annotation schema: ") + e.what(), path.string());
    }
    return ann;
}

SessionManifest parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad manifest JSON: ") + e.what(), path.string());
    }

    const auto base = path.parent_path();
    auto resolve = [&base](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    SessionManifest manifest;
    try {
        if (j.contains("expected_realizations")) {
            const auto n = j.at("expected_realizations").get<std::int64_t>();
            if (n <= 0) throw ValidationError("expected_realizations must be positive");
            manifest.expected_realizations = static_cast<std::size_t>(n);
        }
        for (const auto& pj : j.at("participants")) {
            ParticipantEntry entry;
            entry.person_id = pj.at("person_id").get<std::string>();
            const auto& sensors = pj.at("sensors");
            if (sensors.size() != 4)
                throw ValidationError("participant " + entry.person_id +
                                      " must declare exactly the four sensors");
            for (SensorId id : kAllSensors)
                entry.sensor_files[static_cast<int>(id)] =
                    resolve(sensors.at(sensor_name(id)).get<std::string>());
            entry.annotation_file = resolve(pj.at("annotation").get<std::string>());
            entry.measurement_file = resolve(pj.at("measurements").get<std::string>());
            manifest.participants.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad manifest schema: ") + e.what(), path.string());
    }
    for (std::size_t i = 0; i < manifest.participants.size(); ++i)
        for (std::size_t k = i + 1; k < manifest.participants.size(); ++k)
            if (manifest.participants[i].person_id == manifest.participants[k].person_id)
                throw ValidationError("duplicate person_id '" + manifest.participants[i].person_id +
                                      "' in manifest");
    return manifest;
}

}  // namespace strokebench
