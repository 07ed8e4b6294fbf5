#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace skinlab::expcli {

using Cell = std::variant<std::int64_t, double>;

inline const std::vector<std::string> kSpectrumColumns = {"N", "kappa", "h", "epsilon", "index", "re_E", "im_E"};
inline const std::vector<std::string> kBifurcationColumns = {"epsilon", "index", "re_E", "im_E"};
inline const std::vector<std::string> kTraceColumns = {"t", "value", "log_norm_1", "log_norm_2"};
inline const std::vector<std::string> kTransportColumns = {"N", "kappa", "h", "threshold", "site",
                                                           "v_measured", "v_g", "t1"};

struct Dataset {
    std::string name;    // file stem
    std::string schema;  // spectrum, bifurcation, trace, transport
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, std::string>> meta;

    Dataset(std::string name, std::string schema, std::vector<std::string> columns);
    /// Throws std::invalid_argument when the row width differs from the column count.
    void add_row(std::vector<Cell> row);
};

/// A JSON side file (EP events of a bifurcation run).
struct SideFile {
    std::string name;  // file name including extension
    nlohmann::json body;
};

struct Provenance {
    std::string tool_version;
    std::string generated;  // wall-clock timestamp, the only nondeterministic line
    std::string config;     // canonical YAML of the resolved config
};

Provenance make_provenance(const std::string& config_yaml);

std::string format_cell(const Cell& c);

/// Column header line followed by the data rows (no provenance).
std::string csv_body(const Dataset& d);
/// '#' provenance and metadata lines, then csv_body.
std::string render_csv(const Dataset& d, const Provenance& p);

nlohmann::json provenance_json(const Provenance& p);
nlohmann::json dataset_json(const Dataset& d, const Provenance& p);

/// Config text stored in a CSV or JSON output file written by render_csv,
/// dataset_json or a side file. Throws ValidationError when absent.
std::string extract_config(const std::string& file_text);

}  // namespace skinlab::expcli
