#pragma once

#include <string>
#include <vector>

namespace vspline {

// Shortest decimal string that round-trips to the same double; keeps CSV and
// JSON outputs byte-stable across runs.
std::string format_double(double value);

std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

}  // namespace vspline
