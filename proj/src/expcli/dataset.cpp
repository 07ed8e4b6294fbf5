#include "skinlab/expcli/dataset.hpp"

#include "skinlab/errors.hpp"
#include "skinlab/expcli/format.hpp"

#include <chrono>
#include <ctime>
#include <sstream>
#include <stdexcept>

namespace skinlab::expcli {
namespace {

constexpr const char* kConfigBegin = "# config-begin";
constexpr const char* kConfigEnd = "# config-end";

}  // namespace

Dataset::Dataset(std::string name_, std::string schema_, std::vector<std::string> columns_)
    : name(std::move(name_)), schema(std::move(schema_)), columns(std::move(columns_)) {}

void Dataset::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("Dataset " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                                    std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

Provenance make_provenance(const std::string& config_yaml) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return {std::string("skinlab ") + SKINLAB_VERSION, stamp, config_yaml};
}

std::string format_cell(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return format_double(std::get<double>(c));
}

std::string csv_body(const Dataset& d) {
    std::string out;
    for (std::size_t j = 0; j < d.columns.size(); ++j) out += (j ? "," : "") + d.columns[j];
    out += '\n';
    for (const auto& row : d.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_cell(row[j]);
        }
        out += '\n';
    }
    return out;
}

std::string render_csv(const Dataset& d, const Provenance& p) {
    std::ostringstream o;
    o << "# " << p.tool_version << "\n";
    o << "# generated: " << p.generated << "\n";
    o << "# schema: " << d.schema << "\n";
    for (const auto& [k, v] : d.meta) o << "# " << k << ": " << v << "\n";
    o << kConfigBegin << "\n";
    std::istringstream cfg(p.config);
    for (std::string line; std::getline(cfg, line);) o << "# " << line << "\n";
    o << kConfigEnd << "\n";
    o << csv_body(d);
    return o.str();
}

nlohmann::json provenance_json(const Provenance& p) {
    return {{"tool", p.tool_version}, {"generated", p.generated}, {"config", p.config}};
}

nlohmann::json dataset_json(const Dataset& d, const Provenance& p) {
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : d.meta) meta[k] = v;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : d.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) std::visit([&](auto v) { r.push_back(v); }, c);
        rows.push_back(std::move(r));
    }
    return {{"provenance", provenance_json(p)}, {"schema", d.schema}, {"meta", meta}, {"columns", d.columns},
            {"rows", rows}};
}

std::string extract_config(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return nlohmann::json::parse(text).at("provenance").at("config").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("provenance: ") + e.what());
        }
    }
    std::istringstream in(text);
    std::string config;
    bool inside = false;
    for (std::string line; std::getline(in, line);) {
        if (line == kConfigBegin) {
            inside = true;
        } else if (line == kConfigEnd) {
            if (!inside) break;
            return config;
        } else if (inside) {
            if (line.rfind("# ", 0) != 0) break;
            config += line.substr(2) + "\n";
        }
    }
    throw ValidationError("provenance: no config block found");
}

}  // namespace skinlab::expcli
