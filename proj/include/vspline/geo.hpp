#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vspline/observation_set.hpp"
#include "vspline/selection.hpp"

namespace vspline::geo {

// One GPS fix. Bearing is degrees clockwise from true north (consumer NMEA
// convention); boom is 1 = down, 0 = up.
struct GpsRecord {
    double timestamp = 0.0;  // seconds
    double lon = 0.0, lat = 0.0;  // degrees
    double speed = 0.0;  // m/s
    double bearing = 0.0;  // degrees in [0, 360)
    int boom = 0;
};

enum class DedupePolicy { Reject, Merge };

struct ParseOptions {
    DedupePolicy dedupe = DedupePolicy::Reject;
    // Canonical field -> header name in the file, for nonstandard headers.
    std::map<std::string, std::string> columns;
};

struct ParsedTrack {
    std::vector<GpsRecord> records;
    bool has_boom = false;
};

// CSV with header timestamp,lon,lat,speed,bearing[,boom]. Errors carry line
// numbers. Records with equal timestamps are merged (positions/velocities
// averaged, boom OR-ed) under DedupePolicy::Merge and rejected otherwise;
// decreasing timestamps always fail.
ParsedTrack parse_track(std::istream& in, const ParseOptions& options = {});
ParsedTrack parse_track_file(const std::string& path, const ParseOptions& options = {});

struct PlanarTrack {
    ObservationSet obs;        // d = 2: easting x, northing y (meters)
    std::vector<int> boom;     // per interval, from the left endpoint; empty if absent
    double lon0 = 0.0, lat0 = 0.0;  // projection reference
    std::vector<std::string> warnings;
};

// Local equirectangular tangent plane at the reference point (first record by
// default). Velocities decompose as (speed sin b, speed cos b). Tracks wider
// than 100 km get a distortion warning.
PlanarTrack project(const std::vector<GpsRecord>& records,
                    std::optional<std::pair<double, double>> reference = std::nullopt,
                    bool has_boom = true);

// Inverse of the projection, for exporting fitted tracks.
std::pair<double, double> unproject(double x, double y, double lon0, double lat0);

struct ReconstructResult {
    FittedVSpline spline;
    std::vector<double> lambdas;  // realized per-interval penalties
    SearchResult search;
};

// Parameter search (CV over the requested family) plus the final 2-D fit.
ReconstructResult reconstruct_track(const PlanarTrack& track, const SearchSpec& spec);

}  // namespace vspline::geo
