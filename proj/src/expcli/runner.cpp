#include "skinlab/expcli/runner.hpp"

#include "skinlab/dynamics.hpp"
#include "skinlab/errors.hpp"
#include "skinlab/expcli/format.hpp"
#include "skinlab/lattice.hpp"
#include "skinlab/parallel.hpp"
#include "skinlab/spectral.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <system_error>

namespace skinlab::expcli {
namespace {

using lattice::LatticeParams;
using linalg::Complex;
using linalg::ComplexMatrix;

struct JobOutput {
    std::vector<Dataset> datasets;
    std::vector<SideFile> side_files;
    std::vector<std::string> warnings;
};

using Job = std::function<JobOutput(unsigned inner_threads)>;

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

LatticeParams with(const LatticeParams& base, double h, double eps) {
    LatticeParams p = base;
    p.h = h;
    p.epsilon = eps;
    return p;
}

ComplexMatrix h1_of(const LatticeParams& p) { return lattice::gauge_similar(lattice::build_h0_chain(p), p.h); }

void add_model_meta(Dataset& d, const LatticeParams& p) {
    d.meta.emplace_back("N", std::to_string(p.N));
    d.meta.emplace_back("kappa", format_double(p.kappa));
    d.meta.emplace_back("h", format_double(p.h));
    d.meta.emplace_back("epsilon", format_double(p.epsilon));
}

std::string state_tag(const dynamics::InitialState& s) {
    return (s.kind == dynamics::InitialState::Kind::eigenstate ? "eigenstate" : "site") + std::to_string(s.index);
}

Dataset trace_dataset(const std::string& name, const dynamics::TimeTrace& trace) {
    Dataset d(name, "trace", kTraceColumns);
    for (std::size_t i = 0; i < trace.size(); ++i)
        d.add_row({trace.times[i], trace.values[i], trace.log_norm_1[i], trace.log_norm_2[i]});
    d.meta.emplace_back("observable", trace.observable);
    return d;
}

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

void spectrum_jobs(const ExperimentConfig& c, std::vector<Job>& jobs) {
    for (double h : c.h_values()) {
        for (double eps : c.epsilon_values()) {
            jobs.push_back([&c, h, eps](unsigned) {
                const LatticeParams p = with(c.model, h, eps);
                const spectral::Spectrum s =
                    eps == 0.0 ? spectral::chain_spectrum(p) : spectral::exact_ring_spectrum(p).first;
                Dataset d("spectrum_h" + format_double(h) + "_eps" + format_double(eps), "spectrum", kSpectrumColumns);
                for (std::size_t i = 0; i < s.energies.size(); ++i)
                    d.add_row({as_int(p.N), p.kappa, h, eps, as_int(i + 1), s.energies[i].real(), s.energies[i].imag()});
                add_model_meta(d, p);
                d.meta.emplace_back("source", spectral::to_string(s.source));
                d.meta.emplace_back("all_real", s.reality.all_real ? "true" : "false");
                d.meta.emplace_back("real_count", std::to_string(s.reality.real_count));
                d.meta.emplace_back("pair_count", std::to_string(s.reality.pair_count));
                if (eps > 0.0) d.meta.emplace_back("epsilon_c", format_double(spectral::critical_epsilon(p)));
                return JobOutput{{std::move(d)}, {}, {}};
            });
        }
    }
}

void bifurcation_jobs(const ExperimentConfig& c, std::vector<Job>& jobs) {
    const auto hs = c.h_values();
    for (double h : hs) {
        const std::string suffix = hs.size() > 1 ? "_h" + format_double(h) : "";
        jobs.push_back([&c, h, suffix](unsigned inner) {
            const LatticeParams p = with(c.model, h, c.model.epsilon);
            const auto grid = c.epsilon_values();
            const spectral::BifurcationTrace trace = spectral::trace_bifurcation(p, grid, inner);
            Dataset d("bifurcation" + suffix, "bifurcation", kBifurcationColumns);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const auto& e = trace.loci[k].energies;
                for (std::size_t i = 0; i < e.size(); ++i) d.add_row({grid[k], as_int(i + 1), e[i].real(), e[i].imag()});
            }
            d.meta.emplace_back("N", std::to_string(p.N));
            d.meta.emplace_back("kappa", format_double(p.kappa));
            d.meta.emplace_back("h", format_double(h));
            const double eps_c = spectral::critical_epsilon(p);
            d.meta.emplace_back("epsilon_c", format_double(eps_c));
            d.meta.emplace_back("ep_events", std::to_string(trace.ep_events.size()));

            nlohmann::json events = nlohmann::json::array();
            for (const auto& ev : trace.ep_events) {
                nlohmann::json energies = nlohmann::json::array();
                for (const auto& z : ev.energies) energies.push_back(complex_json(z));
                events.push_back({{"eps_lo", ev.eps_lo},
                                  {"eps_hi", ev.eps_hi},
                                  {"energy", complex_json(ev.energy)},
                                  {"energies", energies},
                                  {"pair_indices", {ev.pair_indices.first, ev.pair_indices.second}},
                                  {"refined_eps_lo", ev.refined_eps_lo},
                                  {"refined_eps_hi", ev.refined_eps_hi}});
            }
            SideFile side{"ep_events" + suffix + ".json",
                          {{"N", p.N},
                           {"kappa", p.kappa},
                           {"h", h},
                           {"epsilon_c", eps_c},
                           {"events", events},
                           {"warnings", trace.warnings}}};
            return JobOutput{{std::move(d)}, {std::move(side)}, trace.warnings};
        });
    }
}

void dynamics_jobs(const ExperimentConfig& c, std::vector<Job>& jobs) {
    std::string prefix = to_string(c.experiment);
    std::replace(prefix.begin(), prefix.end(), '-', '_');
    for (const auto& spec : c.initial_states) {
        for (double h : c.h_values()) {
            for (double eps : c.epsilon_values()) {
                jobs.push_back([&c, spec, h, eps, prefix](unsigned) {
                    const LatticeParams p = with(c.model, h, eps);
                    const auto state = spec.resolve(p.N);
                    const auto psi0 = state.resolve(p);
                    const ComplexMatrix h1 = h1_of(p);
                    const ComplexMatrix h2 = lattice::build_h2(p);
                    const auto trace = c.experiment == ExperimentKind::fidelity
                                           ? dynamics::fidelity_trace(h1, h2, psi0, c.time)
                                           : dynamics::loschmidt_hamiltonian_echo(h1, h2, psi0, c.time);
                    const std::string name = prefix + "_" + state_tag(state) + "_h" + format_double(h) + "_eps" +
                                       format_double(eps);
                    Dataset d = trace_dataset(name, trace);
                    add_model_meta(d, p);
                    d.meta.emplace_back("initial_state", spec.str() + " = " + state.describe());
                    const auto tr = dynamics::transport_diagnostics(p);
                    d.meta.emplace_back("v_g", format_double(tr.v_g));
                    d.meta.emplace_back("t1", format_double(tr.t1));
                    return JobOutput{{std::move(d)}, {}, {}};
                });
            }
        }
    }
}

void echo_phase_jobs(const ExperimentConfig& c, std::vector<Job>& jobs) {
    for (const auto& spec : c.initial_states) {
        for (double h : c.h_values()) {
            for (const auto& n0_ref : c.defect->n0) {
                jobs.push_back([&c, spec, h, n0_ref](unsigned) {
                    const LatticeParams p = with(c.model, h, 0.0);
                    const auto state = spec.resolve(p.N);
                    const std::size_t n0 = n0_ref.resolve(p.N);
                    const auto trace = dynamics::loschmidt_phase_echo(
                        h1_of(p), dynamics::defect_profile(p.N, n0, c.defect->phase), state.resolve(p), c.time);
                    Dataset d = trace_dataset(
                        "echo_phase_" + state_tag(state) + "_h" + format_double(h) + "_n0_" + std::to_string(n0), trace);
                    d.meta.emplace_back("N", std::to_string(p.N));
                    d.meta.emplace_back("kappa", format_double(p.kappa));
                    d.meta.emplace_back("h", format_double(h));
                    d.meta.emplace_back("initial_state", spec.str() + " = " + state.describe());
                    d.meta.emplace_back("n0", n0_ref.str() + " = " + std::to_string(n0));
                    d.meta.emplace_back("defect_phase", format_double(c.defect->phase));
                    const auto tr = dynamics::transport_diagnostics(p);
                    d.meta.emplace_back("v_g", format_double(tr.v_g));
                    d.meta.emplace_back("t1", format_double(tr.t1));
                    return JobOutput{{std::move(d)}, {}, {}};
                });
            }
        }
    }
}

struct TransportRow {
    double h;
    std::size_t site;
    double v_measured;
    dynamics::Transport tr;
};

}  // namespace

RunResult run(const ExperimentConfig& c, unsigned threads) {
    c.validate();
    if (threads == 0) threads = 1;
    RunResult result;

    if (c.experiment == ExperimentKind::transport) {
        struct Point {
            StateSpec spec;
            double h;
        };
        std::vector<Point> points;
        for (const auto& s : c.initial_states)
            for (double h : c.h_values()) points.push_back({s, h});
        const auto rows = parallel_map(points.size(), threads, [&](std::size_t i) {
            const LatticeParams p = with(c.model, points[i].h, 0.0);
            const auto state = points[i].spec.resolve(p.N);
            const double v = dynamics::measure_front_speed(h1_of(p), state.resolve(p), c.time, c.front_threshold);
            return TransportRow{points[i].h, state.index, v, dynamics::transport_diagnostics(p)};
        });
        Dataset d("transport", "transport", kTransportColumns);
        for (const auto& r : rows)
            d.add_row({as_int(c.model.N), c.model.kappa, r.h, c.front_threshold, as_int(r.site), r.v_measured, r.tr.v_g,
                       r.tr.t1});
        d.meta.emplace_back("N", std::to_string(c.model.N));
        d.meta.emplace_back("kappa", format_double(c.model.kappa));
        result.datasets.push_back(std::move(d));
        return result;
    }

    std::vector<Job> jobs;
    switch (c.experiment) {
        case ExperimentKind::spectrum_sweep: spectrum_jobs(c, jobs); break;
        case ExperimentKind::bifurcation: bifurcation_jobs(c, jobs); break;
        case ExperimentKind::fidelity:
        case ExperimentKind::echo_hamiltonian: dynamics_jobs(c, jobs); break;
        case ExperimentKind::echo_phase: echo_phase_jobs(c, jobs); break;
        case ExperimentKind::transport: break;
    }
    // a lone job gets the workers for its own inner loop
    const unsigned inner = jobs.size() == 1 ? threads : 1;
    auto outputs = parallel_map(jobs.size(), threads, [&](std::size_t i) { return jobs[i](inner); });
    for (auto& o : outputs) {
        for (auto& d : o.datasets) result.datasets.push_back(std::move(d));
        for (auto& s : o.side_files) result.side_files.push_back(std::move(s));
        for (auto& w : o.warnings) result.warnings.push_back(std::move(w));
    }
    return result;
}

std::vector<std::filesystem::path> write_outputs(const RunResult& result, const std::filesystem::path& dir,
                                                 OutputFormat format, const Provenance& provenance) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("output.dir: cannot create " + dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    const auto write = [&](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        out.close();
        if (!out) throw ValidationError("output.dir: cannot write " + path.string());
        written.push_back(path);
    };
    for (const auto& d : result.datasets) {
        if (format == OutputFormat::csv)
            write(dir / (d.name + ".csv"), render_csv(d, provenance));
        else
            write(dir / (d.name + ".json"), dataset_json(d, provenance).dump(2) + "\n");
    }
    for (const auto& s : result.side_files) {
        nlohmann::json body = s.body;
        body["provenance"] = provenance_json(provenance);
        write(dir / s.name, body.dump(2) + "\n");
    }
    return written;
}

}  // namespace skinlab::expcli
