#pragma once

#include "skinlab/dynamics.hpp"
#include "skinlab/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace skinlab::expcli {

enum class ExperimentKind { spectrum_sweep, bifurcation, fidelity, echo_phase, echo_hamiltonian, transport };
enum class OutputFormat { csv, json };

const char* to_string(ExperimentKind k);
const char* to_string(OutputFormat f);
ExperimentKind parse_experiment_kind(const std::string& s);
OutputFormat parse_output_format(const std::string& s);

/// Site or mode index that may be written relative to N ("N", "N-1").
struct SiteRef {
    std::size_t offset = 0;   // value, or amount subtracted from N
    bool from_end = false;

    std::size_t resolve(std::size_t N) const;
    std::string str() const;
    friend bool operator==(const SiteRef&, const SiteRef&) = default;
};

struct StateSpec {
    dynamics::InitialState::Kind kind = dynamics::InitialState::Kind::site;
    SiteRef index;

    dynamics::InitialState resolve(std::size_t N) const;
    std::string str() const;  // "eigenstate(1)", "site(N-1)"
    friend bool operator==(const StateSpec&, const StateSpec&) = default;
};

struct DefectSpec {
    std::vector<SiteRef> n0;
    double phase = 1.5707963267948966;  // pi/2
    friend bool operator==(const DefectSpec&, const DefectSpec&) = default;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::spectrum_sweep;
    std::string name;
    lattice::LatticeParams model;
    std::vector<double> sweep_h;        // empty: model.h only
    std::vector<double> sweep_epsilon;  // empty: model.epsilon only
    std::vector<StateSpec> initial_states;
    dynamics::TimeGrid time;
    std::optional<DefectSpec> defect;
    double front_threshold = 1e-3;
    std::string output_dir = "out";
    OutputFormat format = OutputFormat::csv;

    std::vector<double> h_values() const;
    std::vector<double> epsilon_values() const;

    /// Experiment-specific checks; messages start with the offending key.
    void validate() const;
};

/// count evenly spaced values from start to stop, both included.
std::vector<double> linspace(double start, double stop, std::size_t count);

/// Parses the YAML config text. Unknown keys, wrong types and missing
/// required fields raise ValidationError naming the key path (section.key).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical YAML form; parse_config(format_config(c)) reproduces c.
std::string format_config(const ExperimentConfig& c);

/// Reference text for --help.
const char* config_reference();

std::vector<std::string> preset_names();
/// Throws ValidationError for an unknown name.
ExperimentConfig preset(const std::string& name);

}  // namespace skinlab::expcli
