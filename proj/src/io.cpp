#include "hsheat/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hsheat/params.hpp"

namespace hsheat {

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + '"';
}

std::string render(const CsvCell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return format_double(*d);
    }
    if (const auto* i = std::get_if<long long>(&c)) {
        return std::to_string(*i);
    }
    return quote(std::get<std::string>(c));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    }
    out << text;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return fmt::format("{:.17g}", x);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<CsvCell> row) {
    if (row.size() != header_.size()) {
        throw std::invalid_argument(
            fmt::format("csv row has {} cells, header has {}", row.size(), header_.size()));
    }
    rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
    std::string out;
    for (std::size_t k = 0; k < header_.size(); ++k) {
        out += (k ? "," : "") + quote(header_[k]);
    }
    out += "\r\n";
    for (const auto& row : rows_) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            out += (k ? "," : "") + render(row[k]);
        }
        out += "\r\n";
    }
    return out;
}

void CsvWriter::write(const std::filesystem::path& path) const { write_text(path, str()); }

nlohmann::json grid_to_json(const RadialGrid& g) {
    return {{"N", g.dim()}, {"R_max", g.R_max()}, {"M", g.M()}, {"grading", g.grading()}};
}

GridPtr grid_from_json(const nlohmann::json& j) {
    try {
        return make_grid(j.at("N").get<int>(), j.at("R_max").get<double>(), j.at("M").get<int>(),
                         j.at("grading").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("grid: {}", e.what()));
    }
}

void write_field_csv(const std::filesystem::path& path, const RadialField& f) {
    CsvWriter w({"r", "value"});
    for (std::size_t i = 0; i < f.size(); ++i) {
        w.add_row({f.grid().r(i), f[i]});
    }
    w.write(path);
}

RadialField read_field_csv(const std::filesystem::path& path, const GridPtr& grid) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("field file {} not readable", path.string()));
    }
    std::string line;
    std::getline(in, line);
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ConfigError(fmt::format("{}: malformed row '{}'", path.string(), line));
        }
        const double r = std::stod(line.substr(0, comma));
        const double v = std::stod(line.substr(comma + 1));
        const std::size_t i = values.size();
        if (i >= grid->size() || std::abs(r - grid->r(i)) > 1e-12 * grid->r(i)) {
            throw ConfigError(fmt::format("{}: node {} does not match the configured grid", path.string(), i));
        }
        values.push_back(v);
    }
    return RadialField(grid, std::move(values));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

}  // namespace hsheat
