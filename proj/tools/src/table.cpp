#include "res112/cli/table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace res112::cli {

void Table::add(std::vector<Cell> row)
{
    if (row.size() != header.size()) throw std::logic_error("row width does not match header of " + name);
    rows.push_back(std::move(row));
}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c)
{
    if (auto d = std::get_if<double>(&c)) return format_double(*d);
    if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

}  // namespace

void write_table(std::ostream& os, const Table& t, Format f)
{
    if (f == Format::Json) {
        for (const auto& row : t.rows) {
            nlohmann::ordered_json obj;
            for (std::size_t k = 0; k < row.size(); ++k) {
                const auto& c = row[k];
                if (auto d = std::get_if<double>(&c)) {
                    if (std::isfinite(*d))
                        obj[t.header[k]] = *d == 0.0 ? 0.0 : *d;
                    else
                        obj[t.header[k]] = nullptr;
                }
                else if (auto i = std::get_if<std::int64_t>(&c)) {
                    obj[t.header[k]] = *i;
                }
                else {
                    obj[t.header[k]] = std::get<std::string>(c);
                }
            }
            os << obj.dump() << '\n';
        }
        return;
    }
    for (std::size_t k = 0; k < t.header.size(); ++k) os << (k ? "," : "") << csv_field(t.header[k]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_field(cell_text(row[k]));
        os << '\n';
    }
}

}  // namespace res112::cli
