#include "skinlab/errors.hpp"
#include "skinlab/expcli/config.hpp"
#include "skinlab/expcli/dataset.hpp"
#include "skinlab/expcli/runner.hpp"
#include "skinlab/parallel.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace skinlab;
using namespace skinlab::expcli;

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

unsigned resolve_threads(const std::optional<unsigned>& flag) {
    if (const char* env = std::getenv("SKINLAB_THREADS"); env && *env) {
        unsigned v = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [p, ec] = std::from_chars(env, end, v);
        if (ec != std::errc{} || p != end || v == 0)
            throw ValidationError(std::string("SKINLAB_THREADS: expected a positive integer, got '") + env + "'");
        return v;
    }
    if (flag) {
        if (*flag == 0) throw ValidationError("--threads: must be >= 1");
        return *flag;
    }
    return default_thread_count();
}

// A config file, or an output file of an earlier run (its provenance block).
ExperimentConfig read_config_or_output(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const bool is_output = text.find("# config-begin") != std::string::npos || text.find_first_of('{') == 0;
    return parse_config(is_output ? extract_config(text) : text);
}

int execute(ExperimentConfig config, const std::optional<std::string>& out, const std::optional<std::string>& format,
            const std::optional<unsigned>& threads_flag) {
    if (out) config.output_dir = *out;
    if (format) config.format = parse_output_format(*format);
    const unsigned threads = resolve_threads(threads_flag);
    const RunResult result = run(config, threads);
    const auto provenance = make_provenance(format_config(config));
    const auto paths = write_outputs(result, config.output_dir, config.format, provenance);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& p : paths) std::cout << p.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skinlab: spectra, exceptional points and quench dynamics of non-Hermitian tight-binding chains"};
    app.footer(config_reference());
    app.require_subcommand(1);

    std::optional<unsigned> threads;
    std::optional<std::string> format;
    app.add_option("--threads", threads, "Worker threads (default: hardware threads; SKINLAB_THREADS overrides)");
    app.add_option("--format", format, "Output format, overrides the config")->check(CLI::IsMember({"csv", "json"}));

    std::string config_path;
    std::optional<std::string> run_out;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file (or rerun an output file)");
    run_cmd->add_option("config", config_path, "YAML config, or a CSV/JSON file written by an earlier run")->required();
    run_cmd->add_option("--out", run_out, "Output directory, overrides output.dir");

    std::string preset_name;
    std::optional<std::string> preset_out;
    bool print_config = false;
    auto* preset_cmd = app.add_subcommand("preset", "Run a built-in preset");
    preset_cmd->add_option("name", preset_name, "Preset name (see list-presets)")->required();
    preset_cmd->add_option("--out", preset_out, "Output directory (default: the preset name)");
    preset_cmd->add_flag("--print-config", print_config, "Print the preset's config and exit");

    auto* list_cmd = app.add_subcommand("list-presets", "List built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitValidation;
    }

    try {
        if (*list_cmd) {
            for (const auto& name : preset_names()) {
                const auto c = preset(name);
                std::cout << name << "  " << to_string(c.experiment) << ", N=" << c.model.N << "\n";
            }
            return 0;
        }
        if (*preset_cmd) {
            const auto c = preset(preset_name);
            if (print_config) {
                std::cout << format_config(c);
                return 0;
            }
            return execute(c, preset_out, format, threads);
        }
        if (*run_cmd) return execute(read_config_or_output(config_path), run_out, format, threads);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
