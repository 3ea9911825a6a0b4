#include "vspline/geo.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "vspline/csv.hpp"

namespace vspline::geo {

namespace {

constexpr double kEarthRadius = 6371000.0;  // meters
constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void parse_error(int line, const std::string& what) {
    std::ostringstream msg;
    msg << "line " << line << ": " << what;
    throw std::runtime_error(msg.str());
}

double parse_field(const std::string& text, const char* name, int line) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &consumed);
    } catch (const std::exception&) {
        parse_error(line, std::string("malformed value in column '") + name + "'");
    }
    if (consumed != text.size() || !std::isfinite(value))
        parse_error(line, std::string("malformed value in column '") + name + "'");
    return value;
}

void merge_into(GpsRecord& target, const GpsRecord& other) {
    target.lon = 0.5 * (target.lon + other.lon);
    target.lat = 0.5 * (target.lat + other.lat);
    // Average the velocity vectors, then return to speed/bearing.
    const double vx = 0.5 * (target.speed * std::sin(target.bearing * kDegToRad) +
                             other.speed * std::sin(other.bearing * kDegToRad));
    const double vy = 0.5 * (target.speed * std::cos(target.bearing * kDegToRad) +
                             other.speed * std::cos(other.bearing * kDegToRad));
    target.speed = std::hypot(vx, vy);
    double bearing = std::atan2(vx, vy) / kDegToRad;
    if (bearing < 0.0) bearing += 360.0;
    target.bearing = target.speed > 0.0 ? bearing : 0.0;
    target.boom = target.boom | other.boom;
}

}  // namespace

ParsedTrack parse_track(std::istream& in, const ParseOptions& options) {
    std::string header_line;
    if (!std::getline(in, header_line))
        throw std::runtime_error("line 1: missing header");
    const std::vector<std::string> header = split_csv_line(header_line);

    auto column_of = [&](const std::string& canonical) {
        const auto renamed = options.columns.find(canonical);
        const std::string& wanted = renamed == options.columns.end() ? canonical : renamed->second;
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == wanted) return static_cast<int>(i);
        return -1;
    };

    const int c_time = column_of("timestamp");
    const int c_lon = column_of("lon");
    const int c_lat = column_of("lat");
    const int c_speed = column_of("speed");
    const int c_bearing = column_of("bearing");
    const int c_boom = column_of("boom");
    for (auto [idx, name] : {std::pair{c_time, "timestamp"}, {c_lon, "lon"}, {c_lat, "lat"},
                             {c_speed, "speed"}, {c_bearing, "bearing"}})
        if (idx < 0)
            throw std::runtime_error(std::string("header is missing column '") + name + "'");

    ParsedTrack track;
    track.has_boom = c_boom >= 0;

    std::string line;
    int line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << "expected " << header.size() << " fields, got " << fields.size();
            parse_error(line_number, msg.str());
        }

        GpsRecord rec;
        rec.timestamp = parse_field(fields[c_time], "timestamp", line_number);
        rec.lon = parse_field(fields[c_lon], "lon", line_number);
        rec.lat = parse_field(fields[c_lat], "lat", line_number);
        rec.speed = parse_field(fields[c_speed], "speed", line_number);
        rec.bearing = parse_field(fields[c_bearing], "bearing", line_number);
        if (track.has_boom) {
            const double boom = parse_field(fields[c_boom], "boom", line_number);
            if (boom != 0.0 && boom != 1.0)
                parse_error(line_number, "boom must be 0 or 1 (got '" + fields[c_boom] + "')");
            rec.boom = static_cast<int>(boom);
        }
        if (rec.lat < -90.0 || rec.lat > 90.0)
            parse_error(line_number, "lat must lie in [-90, 90]");
        if (rec.lon < -180.0 || rec.lon > 180.0)
            parse_error(line_number, "lon must lie in [-180, 180]");
        if (rec.speed < 0.0) parse_error(line_number, "speed must be nonnegative");
        if (rec.bearing < 0.0 || rec.bearing >= 360.0)
            parse_error(line_number, "bearing must lie in [0, 360)");

        if (!track.records.empty()) {
            const double prev = track.records.back().timestamp;
            if (rec.timestamp < prev) parse_error(line_number, "timestamps must be nondecreasing");
            if (rec.timestamp == prev) {
                if (options.dedupe == DedupePolicy::Merge) {
                    merge_into(track.records.back(), rec);
                    continue;
                }
                parse_error(line_number, "duplicate timestamp (rerun with --dedupe merge)");
            }
        }
        track.records.push_back(rec);
    }
    if (track.records.empty()) throw std::runtime_error("no records");
    return track;
}

ParsedTrack parse_track_file(const std::string& path, const ParseOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return parse_track(in, options);
}

PlanarTrack project(const std::vector<GpsRecord>& records,
                    std::optional<std::pair<double, double>> reference, bool has_boom) {
    if (records.size() < 2)
        throw std::invalid_argument("project: requires at least two records");

    const double lon0 = reference ? reference->first : records.front().lon;
    const double lat0 = reference ? reference->second : records.front().lat;
    const double cos_lat0 = std::cos(lat0 * kDegToRad);

    const int n = static_cast<int>(records.size());
    std::vector<double> times(n);
    Eigen::MatrixXd pos(n, 2), vel(n, 2);
    for (int i = 0; i < n; ++i) {
        const GpsRecord& rec = records[i];
        times[i] = rec.timestamp;
        pos(i, 0) = kEarthRadius * (rec.lon - lon0) * kDegToRad * cos_lat0;
        pos(i, 1) = kEarthRadius * (rec.lat - lat0) * kDegToRad;
        vel(i, 0) = rec.speed * std::sin(rec.bearing * kDegToRad);
        vel(i, 1) = rec.speed * std::cos(rec.bearing * kDegToRad);
    }

    PlanarTrack track{ObservationSet(TimeGrid(std::move(times)), std::move(pos), std::move(vel)),
                      {},
                      lon0,
                      lat0,
                      {}};
    if (has_boom) {
        track.boom.resize(n - 1);
        for (int i = 0; i + 1 < n; ++i) track.boom[i] = records[i].boom;
    }

    const double span_x =
        track.obs.positions.col(0).maxCoeff() - track.obs.positions.col(0).minCoeff();
    const double span_y =
        track.obs.positions.col(1).maxCoeff() - track.obs.positions.col(1).minCoeff();
    if (std::hypot(span_x, span_y) > 100e3)
        track.warnings.push_back(
            "track spans more than 100 km; tangent-plane distortion may be significant");
    return track;
}

std::pair<double, double> unproject(double x, double y, double lon0, double lat0) {
    const double lon = lon0 + x / (kEarthRadius * std::cos(lat0 * kDegToRad)) / kDegToRad;
    const double lat = lat0 + y / kEarthRadius / kDegToRad;
    return {lon, lat};
}

ReconstructResult reconstruct_track(const PlanarTrack& track, const SearchSpec& spec) {
    const bool boom_family = spec.family == PenaltySpec::Family::BoomConstant ||
                             spec.family == PenaltySpec::Family::BoomAdaptive;
    const std::vector<int>* boom = nullptr;
    if (boom_family) {
        if (track.boom.empty())
            throw std::invalid_argument("boom penalty families require a boom column");
        boom = &track.boom;
    }
    const SearchResult search = select_parameters(track.obs, spec, boom);
    const auto lambdas = interval_lambdas(search.best, track.obs, boom);
    FittedVSpline spline = fit(track.obs, search.gamma, lambdas);
    return {std::move(spline), lambdas, search};
}

}  // namespace vspline::geo
