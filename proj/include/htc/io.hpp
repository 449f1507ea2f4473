#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace htc {

// Fixed-width scientific notation so reruns are byte identical.
std::string format_number(double x);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

// '#'-prefixed header lines, then the column line and rows.
void write_csv(const std::filesystem::path& path, const Table& table,
               const std::vector<std::pair<std::string, std::string>>& header = {});

// Rows as an array of objects keyed by column; numeric cells are parsed back.
nlohmann::json table_to_json(const Table& table);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace htc
