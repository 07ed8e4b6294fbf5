#include "skinlab/errors.hpp"
#include "skinlab/expcli/config.hpp"
#include "skinlab/expcli/dataset.hpp"
#include "skinlab/expcli/format.hpp"
#include "skinlab/expcli/runner.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace skinlab;
using namespace skinlab::expcli;
using Kind = dynamics::InitialState::Kind;

namespace {

std::string error_of(const std::string& yaml) {
    try {
        parse_config(yaml);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

std::string without_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string out;
    for (std::string line; std::getline(in, line);)
        if (line.rfind("# generated:", 0) != 0) out += line + "\n";
    return out;
}

std::string data_body(const std::string& text) {
    const auto pos = text.find("# config-end\n");
    return pos == std::string::npos ? text : text.substr(pos);
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("skinlab_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" SKINLAB_CLI_PATH "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kFidelityYaml = R"(experiment: fidelity
model:
  N: 20
  epsilon: 0.3
sweep:
  h: [0, 0.3]
initial_state:
  states: [site(N-1), eigenstate(1)]
time:
  t_max: 5
  dt: 0.01
  stride: 50
)";

}  // namespace

TEST_CASE("format_double gives the shortest text that reads back exactly") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(0.007) == "0.007");
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
        CHECK(s.size() <= 24);
    }
}

TEST_CASE("config parsing fills defaults and resolves N-relative indices") {
    const auto c = parse_config(kFidelityYaml);
    CHECK(c.experiment == ExperimentKind::fidelity);
    CHECK(c.model.N == 20);
    CHECK(c.model.kappa == 1.0);
    CHECK(c.h_values() == std::vector<double>{0.0, 0.3});
    CHECK(c.epsilon_values() == std::vector<double>{0.3});
    REQUIRE(c.initial_states.size() == 2);
    CHECK(c.initial_states[0].kind == Kind::site);
    CHECK(c.initial_states[0].index.resolve(20) == 19);
    CHECK(c.initial_states[0].str() == "site(N-1)");
    CHECK(c.initial_states[1].kind == Kind::eigenstate);
    CHECK(c.initial_states[1].index.resolve(20) == 1);
    CHECK(c.time.stride == 50);
    CHECK(c.format == OutputFormat::csv);
}

TEST_CASE("config errors name the offending key") {
    CHECK(error_of("experiment: echo-phase\nmodel: {N: 10}\ninitial_state: {states: [site(1)]}\n").find("defect") == 0);
    CHECK(error_of("experiment: fidelity\nmodel: {N: 10, hh: 0.1}\n").find("model.hh") == 0);
    CHECK(error_of("experiment: fidelity\nmodle: {N: 10}\n").find("modle") == 0);
    CHECK(error_of("experiment: spectrum-sweep\nmodel: {N: 10, h: abc}\n").find("model.h") == 0);
    CHECK(error_of("experiment: spectrum-sweep\nmodel: {N: -3}\n").find("model.N") == 0);
    CHECK(error_of("experiment: spectrum-sweep\nmodel: {N: 10}\nsweep: {h: []}\n").find("sweep.h") == 0);
    CHECK(error_of("experiment: warp\nmodel: {N: 10}\n").find("experiment") == 0);
    CHECK(error_of("experiment: fidelity\nmodel: {N: 10}\n").find("initial_state") == 0);
    CHECK(error_of("experiment: fidelity\nmodel: {N: 10}\ninitial_state: {states: [orbit(2)]}\n")
              .find("initial_state.states[0]") == 0);
    CHECK(error_of("experiment: fidelity\nmodel: {N: 10}\ninitial_state: {states: [site(11)]}\n")
              .find("initial_state.states") == 0);
    CHECK(error_of("experiment: fidelity\nmodel: {N: 10}\ninitial_state: {states: [site(1)]}\ntime: {dt: 0.2}\n")
              .find("dt") != std::string::npos);
    CHECK(error_of("experiment: bifurcation\nmodel: {N: 10}\nsweep: {epsilon: [0.1, 0.05, 0.2]}\n")
              .find("sweep.epsilon") == 0);
    CHECK(error_of("experiment: bifurcation\nmodel: {N: 10}\nsweep: {epsilon: [0.1], epsilon_linspace: [0, 1, 3]}\n")
              .find("sweep.epsilon_linspace") == 0);
    CHECK(error_of("experiment: spectrum-sweep\nmodel: {N: 10}\noutput: {format: xml}\n").find("output.format") == 0);
    CHECK(error_of("experiment: [unclosed\n").find("config") == 0);
    CHECK(error_of("").find("config") == 0);
}

TEST_CASE("epsilon_linspace expands to an inclusive uniform grid") {
    const auto c = parse_config("experiment: bifurcation\nmodel: {N: 10}\nsweep: {epsilon_linspace: [0.1, 0.2, 5]}\n");
    REQUIRE(c.sweep_epsilon.size() == 5);
    CHECK(c.sweep_epsilon.front() == 0.1);
    CHECK(c.sweep_epsilon.back() == 0.2);
    CHECK(c.sweep_epsilon[2] == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("format_config round-trips every preset and a hand-written config") {
    std::vector<ExperimentConfig> configs;
    for (const auto& name : preset_names()) configs.push_back(preset(name));
    configs.push_back(parse_config(kFidelityYaml));
    for (const auto& c : configs) {
        const std::string text = format_config(c);
        const auto back = parse_config(text);
        CHECK(format_config(back) == text);
        CHECK(back.experiment == c.experiment);
        CHECK(back.sweep_h == c.sweep_h);
        CHECK(back.sweep_epsilon == c.sweep_epsilon);
        CHECK(back.initial_states == c.initial_states);
        CHECK(back.defect == c.defect);
        CHECK(back.time.t_max == c.time.t_max);
        CHECK(back.time.dt == c.time.dt);
        CHECK(back.model.h == c.model.h);
        CHECK(back.model.epsilon == c.model.epsilon);
    }
}

TEST_CASE("presets carry the documented parameters") {
    const auto fig2 = preset("fig2");
    CHECK(fig2.experiment == ExperimentKind::spectrum_sweep);
    CHECK(fig2.model.N == 50);
    CHECK(fig2.sweep_h == std::vector<double>{0.0, 0.1, 0.2});
    CHECK(fig2.sweep_epsilon == std::vector<double>{0.0, 0.001, 0.01, 0.1});

    const auto fig2d = preset("fig2d");
    CHECK(fig2d.experiment == ExperimentKind::bifurcation);
    CHECK(fig2d.model.h == 0.1);
    REQUIRE(fig2d.sweep_epsilon.size() == 40);
    CHECK(fig2d.sweep_epsilon.front() == 0.007);
    CHECK(fig2d.sweep_epsilon.back() == 0.0078);
    for (std::size_t k = 1; k < 40; ++k)
        CHECK(fig2d.sweep_epsilon[k] - fig2d.sweep_epsilon[k - 1] == doctest::Approx(0.0008 / 39).epsilon(1e-9));

    const auto fig4 = preset("fig4");
    CHECK(fig4.experiment == ExperimentKind::fidelity);
    CHECK(fig4.model.epsilon == 0.3);
    CHECK(fig4.sweep_h == std::vector<double>{0.0, 0.3});
    REQUIRE(fig4.initial_states.size() == 2);
    CHECK(fig4.initial_states[0].str() == "eigenstate(1)");
    CHECK(fig4.initial_states[1].str() == "site(N-1)");
    CHECK(fig4.time.t_max == 40.0);
    CHECK(fig4.time.dt == 0.01);

    for (const char* name : {"fig5", "fig6"}) {
        const auto c = preset(name);
        CHECK(c.experiment == ExperimentKind::echo_phase);
        CHECK(c.sweep_h == std::vector<double>{0.0, 0.3});
        REQUIRE(c.defect.has_value());
        REQUIRE(c.defect->n0.size() == 2);
        CHECK(c.defect->n0[0].resolve(50) == 50);
        CHECK(c.defect->n0[1].resolve(50) == 1);
        CHECK(c.defect->phase == doctest::Approx(std::acos(0.0)));
        CHECK(c.time.steps() <= 4000);
        CHECK(c.time.t_max >= 3.0 * 25.0);
    }
    CHECK(preset("fig5").initial_states[0].index.resolve(50) == 1);
    CHECK(preset("fig6").initial_states[0].index.resolve(50) == 50);
    CHECK_THROWS_AS(preset("fig3"), ValidationError);
}

TEST_CASE("fig2 preset yields 12 spectrum datasets with the exact header") {
    const auto r = run(preset("fig2"), 2);
    REQUIRE(r.datasets.size() == 12);
    for (const auto& d : r.datasets) {
        CHECK(d.schema == "spectrum");
        CHECK(d.rows.size() == 50);
        CHECK(csv_body(d).rfind("N,kappa,h,epsilon,index,re_E,im_E\n", 0) == 0);
    }
    // h-major, epsilon-minor order; epsilon = 0 served by the closed form
    CHECK(r.datasets[0].name == "spectrum_h0_eps0");
    CHECK(r.datasets[1].name == "spectrum_h0_eps0.001");
    CHECK(r.datasets[11].name == "spectrum_h0.2_eps0.1");
    const auto meta = [](const Dataset& d, const std::string& key) {
        for (const auto& [k, v] : d.meta)
            if (k == key) return v;
        return std::string();
    };
    CHECK(meta(r.datasets[0], "source") == "closed-form");
    CHECK(meta(r.datasets[1], "source") == "polynomial");
    for (int i = 0; i < 4; ++i) CHECK(meta(r.datasets[i], "all_real") == "true");
    CHECK(meta(r.datasets[9], "all_real") == "false");
}

TEST_CASE("bifurcation run writes the events side file") {
    auto c = preset("fig2d");
    const auto r = run(c, 1);
    REQUIRE(r.datasets.size() == 1);
    CHECK(csv_body(r.datasets[0]).rfind("epsilon,index,re_E,im_E\n", 0) == 0);
    CHECK(r.datasets[0].rows.size() == 40 * 50);
    REQUIRE(r.side_files.size() == 1);
    CHECK(r.side_files[0].name == "ep_events.json");
    const auto& events = r.side_files[0].body.at("events");
    REQUIRE(events.size() >= 1);
    for (const auto& e : events) {
        CHECK(e.at("eps_lo").get<double>() < e.at("eps_hi").get<double>());
        CHECK(e.at("energy").size() == 2);
    }
}

TEST_CASE("dataset rows must match the column count") {
    Dataset d("x", "trace", kTraceColumns);
    CHECK_NOTHROW(d.add_row({0.0, 1.0, 0.0, 0.0}));
    CHECK_THROWS_AS(d.add_row({0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("runs are deterministic and independent of the worker count") {
    const auto c = parse_config(kFidelityYaml);
    const auto a = run(c, 1);
    const auto b = run(c, 4);
    const auto again = run(c, 1);
    REQUIRE(a.datasets.size() == 4);
    REQUIRE(b.datasets.size() == 4);
    for (std::size_t i = 0; i < a.datasets.size(); ++i) {
        CHECK(a.datasets[i].name == b.datasets[i].name);
        CHECK(csv_body(a.datasets[i]) == csv_body(b.datasets[i]));
        CHECK(csv_body(a.datasets[i]) == csv_body(again.datasets[i]));
        CHECK(csv_body(a.datasets[i]).rfind("t,value,log_norm_1,log_norm_2\n", 0) == 0);
    }
    const auto p1 = make_provenance(format_config(c));
    auto p2 = p1;
    p2.generated = "1970-01-01T00:00:00Z";
    CHECK(without_timestamp(render_csv(a.datasets[0], p1)) == without_timestamp(render_csv(b.datasets[0], p2)));

    const auto s1 = run(preset("fig2"), 1);
    const auto s4 = run(preset("fig2"), 4);
    for (std::size_t i = 0; i < s1.datasets.size(); ++i) CHECK(csv_body(s1.datasets[i]) == csv_body(s4.datasets[i]));
}

TEST_CASE("provenance block reproduces the data when rerun") {
    const auto c = parse_config(kFidelityYaml);
    const auto first = run(c, 2);
    const auto prov = make_provenance(format_config(c));
    for (const bool json : {false, true}) {
        const std::string file = json ? dataset_json(first.datasets[1], prov).dump(2) : render_csv(first.datasets[1], prov);
        const auto recovered = parse_config(extract_config(file));
        const auto second = run(recovered, 1);
        REQUIRE(second.datasets.size() == first.datasets.size());
        for (std::size_t i = 0; i < first.datasets.size(); ++i)
            CHECK(csv_body(second.datasets[i]) == csv_body(first.datasets[i]));
    }
    CHECK_THROWS_AS(extract_config("t,value\n0,1\n"), ValidationError);
}

TEST_CASE("write_outputs writes csv or json and reports unwritable directories") {
    const auto dir = scratch_dir("write");
    auto c = parse_config(kFidelityYaml);
    const auto r = run(c, 1);
    const auto prov = make_provenance(format_config(c));
    const auto csv = write_outputs(r, dir / "csv", OutputFormat::csv, prov);
    REQUIRE(csv.size() == 4);
    CHECK(csv[0].extension() == ".csv");
    CHECK(extract_config(slurp(csv[0])) == format_config(c));
    const auto json = write_outputs(r, dir / "json", OutputFormat::json, prov);
    REQUIRE(json.size() == 4);
    const auto doc = nlohmann::json::parse(slurp(json[0]));
    CHECK(doc.at("columns") == nlohmann::json(kTraceColumns));
    CHECK(doc.at("rows").size() == r.datasets[0].rows.size());

    std::ofstream(dir / "plain_file") << "x";
    CHECK_THROWS_AS(write_outputs(r, dir / "plain_file" / "sub", OutputFormat::csv, prov), ValidationError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch_dir("cli");
    std::filesystem::create_directories(dir);
    const std::string d = dir.string();

    CHECK(cli("list-presets") == 0);
    CHECK(cli("--help") == 0);
    CHECK(cli("") == 1);
    CHECK(cli("preset nosuch") == 1);
    CHECK(cli("--format xml preset fig2") == 1);
    CHECK(cli("preset fig2 --out \"" + d + "/fig2\"") == 0);
    CHECK(std::filesystem::exists(dir / "fig2" / "spectrum_h0.1_eps0.01.csv"));
    CHECK(cli("--threads 2 --format json preset fig2d --out \"" + d + "/fig2d\"") == 0);
    CHECK(std::filesystem::exists(dir / "fig2d" / "bifurcation.json"));
    CHECK(std::filesystem::exists(dir / "fig2d" / "ep_events.json"));
    CHECK(cli("preset fig2 --out \"" + d + "/x\"", "SKINLAB_THREADS=zero") == 1);
    CHECK(cli("preset fig2 --out \"" + d + "/y\"", "SKINLAB_THREADS=3") == 0);

    std::ofstream(dir / "bad.yaml") << "experiment: echo-phase\nmodel: {N: 10}\ninitial_state: {states: [site(1)]}\n";
    CHECK(cli("run \"" + d + "/bad.yaml\"") == 1);
    CHECK(cli("run \"" + d + "/missing.yaml\"") == 1);

    // cosh((N-1) h) overflows in the polynomial coefficients
    std::ofstream(dir / "overflow.yaml") << "experiment: spectrum-sweep\nmodel: {N: 50, h: 20, epsilon: 0.1}\n"
                                         << "output: {dir: \"" << d << "/overflow\"}\n";
    CHECK(cli("run \"" + d + "/overflow.yaml\"") == 2);

    // rerun from an output file's provenance; data must match byte for byte
    const auto out1 = dir / "fig2" / "spectrum_h0.2_eps0.001.csv";
    CHECK(cli("run \"" + out1.string() + "\" --out \"" + d + "/rerun\"") == 0);
    const std::string rerun = slurp(dir / "rerun" / "spectrum_h0.2_eps0.001.csv");
    CHECK(data_body(slurp(out1)) == data_body(rerun));
    CHECK(data_body(rerun).size() > 1000);
    std::filesystem::remove_all(dir);
}
