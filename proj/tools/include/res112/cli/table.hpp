#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace res112::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

enum class Format { Text, Csv, Json };

// %.17g, "nan"/"inf" spelled out
std::string format_double(double x);

// CSV: header row, LF endings. JSON: one object per line.
void write_table(std::ostream& os, const Table& t, Format f);

}  // namespace res112::cli
