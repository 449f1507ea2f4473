#include "htc/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace htc {

std::string format_number(double x)
{
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

void Table::add_row(std::vector<std::string> row)
{
    if (row.size() != columns.size()) throw std::invalid_argument("Table: row width does not match the columns");
    rows.push_back(std::move(row));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const Table& table,
               const std::vector<std::pair<std::string, std::string>>& header)
{
    std::ofstream out = open_out(path);
    for (const auto& [k, v] : header) out << "# " << k << ": " << v << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json table_to_json(const Table& table)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json o = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const std::string& cell = row[i];
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (!cell.empty() && end == cell.c_str() + cell.size()) o[table.columns[i]] = v;
            else o[table.columns[i]] = cell;
        }
        rows.push_back(std::move(o));
    }
    return rows;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace htc
