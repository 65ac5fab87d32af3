#include "cli.hpp"

#include "ddweaver/dd_pass.hpp"
#include "ddweaver/error.hpp"
#include "ddweaver/experiments.hpp"
#include "ddweaver/idle_analysis.hpp"
#include "ddweaver/report.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace ddweaver::cli {

namespace {

namespace fs = std::filesystem;

/// Bad flag value: reported as a usage error.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(fmt::format("cannot read '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out || !(out << text))
        throw Error(fmt::format("cannot write '{}'", path.string()));
}

template <class F>
auto as_usage(std::string_view flag, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw UsageError(fmt::format("{}: {}", flag, e.what()));
    }
}

struct SimFlags {
    std::string device = "lagos";
    std::string ks;
    std::size_t samples = 1000;
    std::size_t shots = 0;
    std::uint64_t seed = 1;
    std::string toggles = "all";
    std::size_t threads = 0;

    SimConfig config() const {
        SimConfig c;
        c.samples = samples;
        c.seed = seed;
        c.threads = threads;
        c.toggles = as_usage("--toggles", [&] { return parse_toggles(toggles); });
        if (shots > 0)
            c.shots = shots;
        return c;
    }
};

struct ExperimentFlags {
    SimFlags sim;
    std::string name;
    std::string map = "0,1,2";
    std::size_t main = 6;
    std::string spectators = "5,4";
    std::string strategies;
    std::string spacing = "symmetric";
    std::size_t reps = 1;
    std::string out_dir;
    bool plot = false;
};

struct CircuitFlags {
    std::string in;
    std::string device = "lagos";
    std::string map;
    std::optional<std::size_t> main;
};

struct Loaded {
    Circuit circuit;
    DeviceModel device;
    Mapping mapping;
};

Loaded load_inputs(const CircuitFlags& f) {
    Loaded l;
    l.circuit = parse_circuit(read_file(f.in));
    l.device = device_from_spec(f.device);
    l.mapping = f.map.empty() ? Mapping::identity(l.circuit.n_qubits)
                              : as_usage("--map", [&] { return Mapping::parse(f.map); });
    if (f.main) {
        if (*f.main >= l.circuit.n_qubits)
            throw UsageError(fmt::format("--main: q{} is not in a {}-qubit circuit", *f.main, l.circuit.n_qubits));
        l.circuit.main_qubit = *f.main;
    }
    return l;
}

void add_circuit_flags(CLI::App* cmd, CircuitFlags& f) {
    cmd->add_option("--in", f.in, "Circuit file")->required();
    cmd->add_option("--device", f.device, "Preset name (lagos) or device file");
    cmd->add_option("--map", f.map, "Physical qubit of each logical qubit, e.g. 0,1,2 (default identity)");
    cmd->add_option("--main", f.main, "Logical main qubit; DD targets only this qubit");
}

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
    cmd->add_option("--device", f.device, "Preset name (lagos) or device file");
    cmd->add_option("--ks", f.ks, "Repetition counts start:stop:step");
    cmd->add_option("--samples", f.samples, "Quasi-static noise samples")->check(CLI::PositiveNumber);
    cmd->add_option("--shots", f.shots, "Also draw this many readout shots");
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--toggles", f.toggles, "Noise toggles: all, none, name, -name (comma separated)");
    cmd->add_option("--threads", f.threads, "Worker threads (default DD_WEAVER_THREADS or all cores)");
}

int cmd_experiment(const ExperimentFlags& f, std::ostream& out) {
    const auto exp = *parse_experiment(f.name);
    auto config = f.sim.config();
    const auto device = device_from_spec(f.sim.device);

    fs::path dir;
    if (!f.out_dir.empty()) {
        dir = f.out_dir;
        fs::create_directories(dir);
    }
    const std::string stem(experiment_name(exp));

    if (exp == Experiment::Ramsey) {
        RamseySetup setup;
        setup.device = device;
        setup.main = f.main;
        const auto spec = as_usage("--spectators", [&] { return Mapping::parse(f.spectators); });
        if (spec.size() != 2)
            throw UsageError("--spectators: expected two qubits, e.g. 5,4");
        setup.spectators = {spec(0), spec(1)};
        if (!f.sim.ks.empty())
            setup.ks = as_usage("--ks", [&] { return parse_ks(f.sim.ks); });
        setup.config = config;
        const auto report = ramsey_suite(setup);
        out << ramsey_summary(report);
        if (!dir.empty()) {
            std::vector<SweepResult> series(report.series.begin(), report.series.end());
            write_file(dir / (stem + ".csv"), sweep_csv(series));
            write_file(dir / (stem + ".json"), ramsey_json(report));
            if (f.plot)
                write_file(dir / (stem + ".svg"), svg_plot("Ramsey", series));
        }
        return 0;
    }

    ExperimentSetup setup;
    setup.device = device;
    setup.mapping = as_usage("--map", [&] { return Mapping::parse(f.map); });
    if (!f.sim.ks.empty())
        setup.ks = as_usage("--ks", [&] { return parse_ks(f.sim.ks); });
    setup.config = config;
    setup.dd.repetitions = f.reps;
    setup.dd.spacing = f.spacing == "edge" ? PulseSpacing::EdgeAligned : PulseSpacing::Symmetric;

    std::vector<Strategy> strategies = default_strategies(exp);
    if (!f.strategies.empty()) {
        strategies.clear();
        std::stringstream ss(f.strategies);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto s = parse_strategy(item);
            if (!s)
                throw UsageError(fmt::format("--strategy: unknown strategy '{}'", item));
            strategies.push_back(*s);
        }
    }

    const auto results = run_sweep(exp, setup, strategies);
    out << summary_table(results);
    if (!dir.empty()) {
        write_file(dir / (stem + ".csv"), sweep_csv(results));
        write_file(dir / (stem + ".json"), sweep_json(results));
        if (f.plot)
            write_file(dir / (stem + ".svg"), svg_plot(stem, results));
    }
    return 0;
}

struct TranspileFlags {
    CircuitFlags circuit;
    std::string policy;
    std::string strategy;
    std::string out;
    std::string report;
};

int cmd_transpile(const TranspileFlags& f, std::ostream& out) {
    auto in = load_inputs(f.circuit);
    const auto sched = schedule_asap(in.circuit, in.device, in.mapping);

    PassResult pass;
    if (!f.strategy.empty()) {
        auto s = parse_strategy(f.strategy);
        if (!s)
            throw UsageError(fmt::format("--strategy: unknown strategy '{}'", f.strategy));
        pass = apply_strategy(sched, *s, false);
    } else {
        const auto policy = f.policy.empty() ? Policy::guidelines() : parse_policy(read_file(f.policy));
        pass = apply_policy(sched, policy);
    }

    const auto text = render_circuit(to_circuit(pass.schedule, in.circuit));
    const auto report = decisions_csv(pass.decisions);
    if (f.out.empty())
        out << text;
    else
        write_file(f.out, text);
    if (!f.report.empty())
        write_file(f.report, report);
    else if (!f.out.empty())
        out << report;
    return 0;
}

int cmd_classify(const CircuitFlags& f, std::ostream& out) {
    auto in = load_inputs(f);
    const auto sched = schedule_asap(in.circuit, in.device, in.mapping);
    out << crosstalk_csv(crosstalk_report(sched, dd_targets(sched)));
    return 0;
}

int cmd_devices(const std::string& which, std::ostream& out) {
    if (which.empty()) {
        const auto d = preset_lagos();
        out << fmt::format("lagos  {} qubits, {} edges\n", d.n_qubits, d.edges.size());
        return 0;
    }
    out << render_device(device_from_spec(which));
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Idle-window analysis and dynamical-decoupling insertion for timed quantum circuits", "dd-weaver"};
    app.require_subcommand(1);

    ExperimentFlags ef;
    auto* experiment = app.add_subcommand("experiment", "Run a simulated experiment sweep");
    std::vector<std::string> names;
    for (auto e : kAllExperiments)
        names.emplace_back(experiment_name(e));
    experiment->add_option("name", ef.name, "Experiment")->required()->check(CLI::IsMember(names));
    add_sim_flags(experiment, ef.sim);
    experiment->add_option("--map", ef.map, "Physical qubits for q0,q1,q2");
    experiment->add_option("--main", ef.main, "Ramsey: physical main qubit");
    experiment->add_option("--spectators", ef.spectators, "Ramsey: physical spectator pair A,B");
    experiment->add_option("--strategy", ef.strategies, "Comma-separated strategies to compare");
    experiment->add_option("--spacing", ef.spacing, "Pulse spacing")->check(CLI::IsMember({"symmetric", "edge"}));
    experiment->add_option("--reps", ef.reps, "X-X cycles per fill")->check(CLI::PositiveNumber);
    experiment->add_option("--out", ef.out_dir, "Directory for CSV/JSON/SVG output");
    experiment->add_flag("--plot", ef.plot, "Write an SVG plot");

    TranspileFlags tf;
    auto* transpile = app.add_subcommand("transpile", "Insert DD into a circuit file");
    add_circuit_flags(transpile, tf.circuit);
    transpile->add_option("--policy", tf.policy, "Policy file (default: built-in guidelines)");
    transpile->add_option("--strategy", tf.strategy, "Apply one strategy everywhere instead of a policy");
    transpile->add_option("--out", tf.out, "Output circuit file (default stdout)");
    transpile->add_option("--report", tf.report, "Window report CSV file");

    CircuitFlags cf;
    auto* classify = app.add_subcommand("classify", "Print the idle-window crosstalk report");
    add_circuit_flags(classify, cf);

    std::string which;
    auto* devices = app.add_subcommand("devices", "List presets or print a device");
    devices->add_option("device", which, "Preset or device file to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (*experiment)
            return cmd_experiment(ef, out);
        if (*transpile)
            return cmd_transpile(tf, out);
        if (*classify)
            return cmd_classify(cf, out);
        if (*devices)
            return cmd_devices(which, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace ddweaver::cli
