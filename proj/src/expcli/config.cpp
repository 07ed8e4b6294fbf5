#include "skinlab/expcli/config.hpp"

#include "skinlab/errors.hpp"
#include "skinlab/expcli/format.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace skinlab::expcli {
namespace {

using Kind = dynamics::InitialState::Kind;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ValidationError(path + ": " + what); }

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node.IsMap()) fail(path, "expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(path.empty() ? key : path + "." + key, "unknown key (expected one of: " + list + ")");
        }
    }
}

double as_double(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(path, "expected a number");
    try {
        const double v = n.as<double>();
        if (!std::isfinite(v)) fail(path, "must be finite");
        return v;
    } catch (const YAML::Exception&) {
        fail(path, "expected a number, got '" + n.Scalar() + "'");
    }
}

std::size_t as_size(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(path, "expected a non-negative integer");
    const std::string& s = n.Scalar();
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail(path, "expected a non-negative integer, got '" + s + "'");
    return v;
}

std::string as_string(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) fail(path, "expected a string");
    return n.Scalar();
}

std::vector<double> as_double_list(const YAML::Node& n, const std::string& path) {
    std::vector<double> out;
    if (n.IsScalar()) {
        out.push_back(as_double(n, path));
    } else if (n.IsSequence()) {
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], path + "[" + std::to_string(i) + "]"));
    } else {
        fail(path, "expected a number or a list of numbers");
    }
    if (out.empty()) fail(path, "list must not be empty");
    return out;
}

std::vector<std::string> as_string_list(const YAML::Node& n, const std::string& path) {
    std::vector<std::string> out;
    if (n.IsScalar()) {
        out.push_back(n.Scalar());
    } else if (n.IsSequence()) {
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_string(n[i], path + "[" + std::to_string(i) + "]"));
    } else {
        fail(path, "expected a string or a list of strings");
    }
    if (out.empty()) fail(path, "list must not be empty");
    return out;
}

SiteRef parse_site_ref(std::string s, const std::string& path) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    SiteRef r;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && s[0] == 'N') {
        r.from_end = true;
        if (s.size() == 1) return r;
        if (s[1] != '-') fail(path, "expected an index, N or N-k, got '" + s + "'");
        first += 2;
    }
    const auto [p, ec] = std::from_chars(first, last, r.offset);
    if (ec != std::errc{} || p != last) fail(path, "expected an index, N or N-k, got '" + s + "'");
    return r;
}

StateSpec parse_state(const std::string& text, const std::string& path) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close != text.size() - 1 || close < open)
        fail(path, "expected eigenstate(n) or site(l), got '" + text + "'");
    const std::string head = text.substr(0, open);
    StateSpec spec;
    if (head == "eigenstate")
        spec.kind = Kind::eigenstate;
    else if (head == "site")
        spec.kind = Kind::site;
    else
        fail(path, "unknown state kind '" + head + "' (expected eigenstate or site)");
    spec.index = parse_site_ref(text.substr(open + 1, close - open - 1), path);
    return spec;
}

std::string quoted(const std::string& s) {
    YAML::Emitter e;
    e << YAML::DoubleQuoted << s;
    return e.c_str();
}

template <class T, class F>
std::string flow_list(const std::vector<T>& v, F fmt) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out + "]";
}

}  // namespace

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::spectrum_sweep: return "spectrum-sweep";
        case ExperimentKind::bifurcation: return "bifurcation";
        case ExperimentKind::fidelity: return "fidelity";
        case ExperimentKind::echo_phase: return "echo-phase";
        case ExperimentKind::echo_hamiltonian: return "echo-hamiltonian";
        case ExperimentKind::transport: return "transport";
    }
    return "unknown";
}

const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

ExperimentKind parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::spectrum_sweep, ExperimentKind::bifurcation, ExperimentKind::fidelity,
                   ExperimentKind::echo_phase, ExperimentKind::echo_hamiltonian, ExperimentKind::transport})
        if (s == to_string(k)) return k;
    fail("experiment", "unknown experiment '" + s +
                           "' (expected spectrum-sweep, bifurcation, fidelity, echo-phase, echo-hamiltonian or transport)");
}

OutputFormat parse_output_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    fail("output.format", "expected csv or json, got '" + s + "'");
}

std::size_t SiteRef::resolve(std::size_t N) const {
    if (!from_end) return offset;
    return offset >= N ? 0 : N - offset;
}

std::string SiteRef::str() const {
    if (!from_end) return std::to_string(offset);
    return offset == 0 ? "N" : "N-" + std::to_string(offset);
}

dynamics::InitialState StateSpec::resolve(std::size_t N) const {
    const std::size_t i = index.resolve(N);
    return kind == Kind::eigenstate ? dynamics::InitialState::eigenstate(i) : dynamics::InitialState::site(i);
}

std::string StateSpec::str() const {
    return std::string(kind == Kind::eigenstate ? "eigenstate(" : "site(") + index.str() + ")";
}

std::vector<double> ExperimentConfig::h_values() const {
    return sweep_h.empty() ? std::vector<double>{model.h} : sweep_h;
}

std::vector<double> ExperimentConfig::epsilon_values() const {
    return sweep_epsilon.empty() ? std::vector<double>{model.epsilon} : sweep_epsilon;
}

void ExperimentConfig::validate() const {
    try {
        model.validate();
    } catch (const ValidationError& e) {
        fail("model", e.what());
    }
    for (double h : h_values())
        if (!(h >= 0.0)) fail("sweep.h", "values must be >= 0");
    for (double e : epsilon_values())
        if (!(e >= 0.0)) fail("sweep.epsilon", "values must be >= 0");

    const bool dynamic = experiment == ExperimentKind::fidelity || experiment == ExperimentKind::echo_phase ||
                         experiment == ExperimentKind::echo_hamiltonian || experiment == ExperimentKind::transport;
    if (dynamic) {
        if (initial_states.empty()) fail("initial_state", std::string("required for experiment ") + to_string(experiment));
        for (const auto& s : initial_states) {
            const std::size_t i = s.index.resolve(model.N);
            if (i < 1 || i > model.N)
                fail("initial_state.states", s.str() + " resolves outside 1.." + std::to_string(model.N));
        }
        try {
            time.validate(model.kappa);
        } catch (const ValidationError& e) {
            throw ValidationError(e.what());
        }
    }
    if ((experiment == ExperimentKind::fidelity || experiment == ExperimentKind::echo_hamiltonian) && model.N < 3)
        fail("model.N", "the ring perturbation needs N >= 3");

    switch (experiment) {
        case ExperimentKind::bifurcation: {
            const auto eps = epsilon_values();
            if (eps.size() < 3) fail("sweep.epsilon", "bifurcation needs at least 3 epsilon values");
            for (std::size_t k = 1; k < eps.size(); ++k)
                if (!(eps[k] > eps[k - 1])) fail("sweep.epsilon", "bifurcation grid must be strictly ascending");
            break;
        }
        case ExperimentKind::echo_phase:
            if (!defect) fail("defect", "required for experiment echo-phase");
            if (defect->n0.empty()) fail("defect.n0", "list must not be empty");
            for (const auto& r : defect->n0) {
                const std::size_t i = r.resolve(model.N);
                if (i < 1 || i > model.N) fail("defect.n0", r.str() + " resolves outside 1.." + std::to_string(model.N));
            }
            if (!std::isfinite(defect->phase)) fail("defect.phase", "must be finite");
            break;
        case ExperimentKind::transport:
            if (!(front_threshold > 0.0 && front_threshold < 1.0)) fail("transport.threshold", "must lie in (0, 1)");
            for (const auto& s : initial_states)
                if (s.kind != Kind::site) fail("initial_state.states", "transport needs localized site(l) states");
            break;
        default:
            break;
    }
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
    if (count < 2) throw ValidationError("linspace: count must be >= 2");
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k)
        v[k] = k + 1 == count ? stop : start + static_cast<double>(k) * (stop - start) / static_cast<double>(count - 1);
    return v;
}

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ValidationError(std::string("config: YAML syntax error: ") + e.what());
    }
    if (!root || root.IsNull()) throw ValidationError("config: empty document");
    check_keys(root, "", {"experiment", "name", "model", "sweep", "initial_state", "time", "defect", "transport", "output"});

    ExperimentConfig c;
    if (!root["experiment"]) fail("experiment", "required");
    c.experiment = parse_experiment_kind(as_string(root["experiment"], "experiment"));
    if (root["name"]) c.name = as_string(root["name"], "name");

    if (!root["model"]) fail("model", "required");
    const auto model = root["model"];
    check_keys(model, "model", {"N", "kappa", "h", "epsilon", "L"});
    if (!model["N"]) fail("model.N", "required");
    c.model.N = as_size(model["N"], "model.N");
    if (model["kappa"]) c.model.kappa = as_double(model["kappa"], "model.kappa");
    if (model["h"]) c.model.h = as_double(model["h"], "model.h");
    if (model["epsilon"]) c.model.epsilon = as_double(model["epsilon"], "model.epsilon");
    if (model["L"]) c.model.L = as_size(model["L"], "model.L");

    if (const auto sweep = root["sweep"]) {
        check_keys(sweep, "sweep", {"h", "epsilon", "epsilon_linspace"});
        if (sweep["h"]) c.sweep_h = as_double_list(sweep["h"], "sweep.h");
        if (sweep["epsilon"] && sweep["epsilon_linspace"])
            fail("sweep.epsilon_linspace", "give either epsilon or epsilon_linspace, not both");
        if (sweep["epsilon"]) c.sweep_epsilon = as_double_list(sweep["epsilon"], "sweep.epsilon");
        if (const auto lin = sweep["epsilon_linspace"]) {
            if (!lin.IsSequence() || lin.size() != 3) fail("sweep.epsilon_linspace", "expected [start, stop, count]");
            const double a = as_double(lin[0], "sweep.epsilon_linspace[0]");
            const double b = as_double(lin[1], "sweep.epsilon_linspace[1]");
            const std::size_t n = as_size(lin[2], "sweep.epsilon_linspace[2]");
            if (n < 2) fail("sweep.epsilon_linspace", "count must be >= 2");
            c.sweep_epsilon = linspace(a, b, n);
        }
    }

    if (const auto st = root["initial_state"]) {
        check_keys(st, "initial_state", {"states"});
        if (!st["states"]) fail("initial_state.states", "required");
        const auto list = as_string_list(st["states"], "initial_state.states");
        for (std::size_t i = 0; i < list.size(); ++i)
            c.initial_states.push_back(parse_state(list[i], "initial_state.states[" + std::to_string(i) + "]"));
    }

    if (const auto t = root["time"]) {
        check_keys(t, "time", {"t_max", "dt", "stride"});
        if (t["t_max"]) c.time.t_max = as_double(t["t_max"], "time.t_max");
        if (t["dt"]) c.time.dt = as_double(t["dt"], "time.dt");
        if (t["stride"]) c.time.stride = as_size(t["stride"], "time.stride");
    }

    if (const auto d = root["defect"]) {
        check_keys(d, "defect", {"n0", "phase"});
        DefectSpec spec;
        if (!d["n0"]) fail("defect.n0", "required");
        const auto list = as_string_list(d["n0"], "defect.n0");
        for (std::size_t i = 0; i < list.size(); ++i)
            spec.n0.push_back(parse_site_ref(list[i], "defect.n0[" + std::to_string(i) + "]"));
        if (d["phase"]) spec.phase = as_double(d["phase"], "defect.phase");
        c.defect = std::move(spec);
    }

    if (const auto tr = root["transport"]) {
        check_keys(tr, "transport", {"threshold"});
        if (tr["threshold"]) c.front_threshold = as_double(tr["threshold"], "transport.threshold");
    }

    if (const auto out = root["output"]) {
        check_keys(out, "output", {"dir", "format"});
        if (out["dir"]) c.output_dir = as_string(out["dir"], "output.dir");
        if (out["format"]) c.format = parse_output_format(as_string(out["format"], "output.format"));
    }

    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string format_config(const ExperimentConfig& c) {
    const auto num = [](double v) { return format_double(v); };
    std::ostringstream o;
    o << "experiment: " << to_string(c.experiment) << "\n";
    if (!c.name.empty()) o << "name: " << quoted(c.name) << "\n";
    o << "model:\n"
      << "  N: " << c.model.N << "\n"
      << "  kappa: " << num(c.model.kappa) << "\n"
      << "  h: " << num(c.model.h) << "\n"
      << "  epsilon: " << num(c.model.epsilon) << "\n"
      << "  L: " << c.model.L << "\n";
    if (!c.sweep_h.empty() || !c.sweep_epsilon.empty()) {
        o << "sweep:\n";
        if (!c.sweep_h.empty()) o << "  h: " << flow_list(c.sweep_h, num) << "\n";
        if (!c.sweep_epsilon.empty()) o << "  epsilon: " << flow_list(c.sweep_epsilon, num) << "\n";
    }
    if (!c.initial_states.empty())
        o << "initial_state:\n  states: " << flow_list(c.initial_states, [](const StateSpec& s) { return s.str(); }) << "\n";
    o << "time:\n"
      << "  t_max: " << num(c.time.t_max) << "\n"
      << "  dt: " << num(c.time.dt) << "\n"
      << "  stride: " << c.time.stride << "\n";
    if (c.defect) {
        o << "defect:\n"
          << "  n0: " << flow_list(c.defect->n0, [](const SiteRef& r) { return r.str(); }) << "\n"
          << "  phase: " << num(c.defect->phase) << "\n";
    }
    o << "transport:\n  threshold: " << num(c.front_threshold) << "\n";
    o << "output:\n  dir: " << quoted(c.output_dir) << "\n  format: " << to_string(c.format) << "\n";
    return o.str();
}

const char* config_reference() {
    return R"(Config file (YAML). Unknown keys are rejected.

  experiment: spectrum-sweep | bifurcation | fidelity | echo-phase | echo-hamiltonian | transport
  name: free-form label
  model:
    N: site count (>= 2; >= 3 wherever the edge coupling enters)
    kappa: hopping rate, the energy unit (default 1)
    h: imaginary gauge field (default 0)
    epsilon: edge-coupling strength (default 0)
    L: hopping range (default 1)
  sweep:
    h: number or list, replaces model.h
    epsilon: number or list, replaces model.epsilon
    epsilon_linspace: [start, stop, count], alternative to epsilon
  initial_state:
    states: list of eigenstate(n) or site(l); n and l may be written N or N-k
  time:
    t_max: final time in 1/kappa (default 40)
    dt: step in 1/kappa, at most 0.05/kappa (default 0.01)
    stride: steps between output rows (default 10)
  defect:                  required for echo-phase
    n0: site or list of sites carrying the defect phase
    phase: defect phase in radians (default pi/2; every other site gets pi)
  transport:
    threshold: probability share marking the front (default 0.001)
  output:
    dir: output directory (default out)
    format: csv | json

Open-chain modes are E_n = 2 kappa cos(pi n/(N+1)); eigenstate(1) is the
n = 1 mode at the top of the band.)";
}

}  // namespace skinlab::expcli
