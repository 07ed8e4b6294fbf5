#pragma once

#include "skinlab/expcli/config.hpp"
#include "skinlab/expcli/dataset.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace skinlab::expcli {

struct RunResult {
    std::vector<Dataset> datasets;
    std::vector<SideFile> side_files;
    std::vector<std::string> warnings;
};

/// Validates the config and runs every sweep point on up to `threads`
/// workers. The result order follows the config (sweep order), never the
/// scheduling.
RunResult run(const ExperimentConfig& config, unsigned threads);

/// Writes each dataset as <name>.csv or <name>.json plus the side files into
/// `dir` (created if missing) and returns the paths written. I/O failures
/// raise ValidationError naming the path.
std::vector<std::filesystem::path> write_outputs(const RunResult& result, const std::filesystem::path& dir,
                                                 OutputFormat format, const Provenance& provenance);

}  // namespace skinlab::expcli
