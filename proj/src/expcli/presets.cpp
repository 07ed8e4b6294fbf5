#include "skinlab/errors.hpp"
#include "skinlab/expcli/config.hpp"

namespace skinlab::expcli {
namespace {

using Kind = dynamics::InitialState::Kind;

ExperimentConfig base(ExperimentKind kind, const std::string& name) {
    ExperimentConfig c;
    c.experiment = kind;
    c.name = name;
    c.model.N = 50;
    c.model.kappa = 1.0;
    c.output_dir = name;
    return c;
}

ExperimentConfig echo_preset(const std::string& name, SiteRef start) {
    auto c = base(ExperimentKind::echo_phase, name);
    c.sweep_h = {0.0, 0.3};
    c.initial_states = {{Kind::site, start}};
    // 3000 steps reach past 3 t1 for both field values
    c.time = {75.0, 0.025, 4};
    c.defect = DefectSpec{{SiteRef{0, true}, SiteRef{1, false}}};
    return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig2d", "fig4", "fig5", "fig6"}; }

ExperimentConfig preset(const std::string& name) {
    if (name == "fig2") {
        auto c = base(ExperimentKind::spectrum_sweep, name);
        c.sweep_h = {0.0, 0.1, 0.2};
        c.sweep_epsilon = {0.0, 0.001, 0.01, 0.1};
        return c;
    }
    if (name == "fig2d") {
        auto c = base(ExperimentKind::bifurcation, name);
        c.model.h = 0.1;
        c.sweep_epsilon = linspace(0.007, 0.0078, 40);
        return c;
    }
    if (name == "fig4") {
        auto c = base(ExperimentKind::fidelity, name);
        c.model.epsilon = 0.3;
        c.sweep_h = {0.0, 0.3};
        c.initial_states = {{Kind::eigenstate, SiteRef{1, false}}, {Kind::site, SiteRef{1, true}}};
        c.time = {40.0, 0.01, 10};
        return c;
    }
    if (name == "fig5") return echo_preset(name, SiteRef{1, false});
    if (name == "fig6") return echo_preset(name, SiteRef{0, true});
    throw ValidationError("preset: unknown name '" + name + "' (expected fig2, fig2d, fig4, fig5 or fig6)");
}

}  // namespace skinlab::expcli
