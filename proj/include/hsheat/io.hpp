#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hsheat/field.hpp"

namespace hsheat {

using CsvCell = std::variant<double, long long, std::string>;

/// RFC-4180 writer: header always present, '.' decimal separator, doubles in
/// round-trip precision.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(std::vector<CsvCell> row);
    [[nodiscard]] std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<CsvCell>> rows_;
};

std::string format_double(double x);

nlohmann::json grid_to_json(const RadialGrid& g);
GridPtr grid_from_json(const nlohmann::json& j);

/// Two-column `r,value` CSV.
void write_field_csv(const std::filesystem::path& path, const RadialField& f);

/// Reads a field written by write_field_csv; the r column must reproduce the
/// nodes of `grid` to 1e-12 relative.
RadialField read_field_csv(const std::filesystem::path& path, const GridPtr& grid);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace hsheat
