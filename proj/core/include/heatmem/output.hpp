#pragma once

#include "heatmem/analysis.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace heatmem {

// Shortest decimal string that parses back to the same double; "nan",
// "inf" and "-inf" for non-finite values.
std::string format_double(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const;
};

Table reports_table(const std::vector<EnergyReport>& reports);

std::string sha256_hex(std::string_view data);

void write_file(const std::filesystem::path& path, std::string_view contents);

// One "<sha256>  <name>" line per file, sorted by name.
std::string manifest(const std::filesystem::path& dir, const std::vector<std::string>& files);

}  // namespace heatmem
