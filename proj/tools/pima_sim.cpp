// pima_sim: command-line front end for the PIMA / TDMA / SALOHA simulator.
//
//   pima_sim run --protocol pima --lambda-total 0.3 --pe-target 0.1
//   pima_sim figures --out results/
//   pima_sim tables --users 20

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "pima/config_file.hpp"
#include "pima/estimator.hpp"
#include "pima/harness.hpp"
#include "pima/protocols.hpp"
#include "pima/scheduler.hpp"
#include "pima/traffic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Simulation flags, each mapped onto the config key of the same name.
struct SimFlags {
    std::optional<std::string> config_path;
    std::map<std::string, std::string> values;  // key -> raw text
    std::optional<std::string> out;

    void add_to(CLI::App& app)
    {
        app.add_option("--config", config_path, "Flat key = value config file; flags override it");
        add(app, "protocol", "pima | tdma | saloha");
        add(app, "users", "Number of users K");
        add(app, "lambda-total", "Total packet generation rate [pkt/slot]");
        add(app, "buffer", "Buffer capacity per user [packets]");
        add(app, "slot-us", "Slot duration [us]");
        add(app, "bandwidth-hz", "System bandwidth W [Hz]");
        add(app, "noise-db", "Noise power [dB relative to unit user power]");
        add(app, "noise-power", "Noise power [linear]");
        add(app, "pe-target", "Target worst-case estimation error; sets M1");
        add(app, "m1", "Explicit number of sensing samples M1");
        add(app, "seed", "64-bit seed");
        add(app, "horizon-slots", "Measured horizon [slots]");
        add(app, "warmup-slots", "Warmup excluded from metrics [slots]");
        add(app, "saloha-rule", "rivest | merged backlog update");
        add(app, "perfect-estimation", "true: PIMA uses the true active count");
        add(app, "skip-empty-dt", "true: no DT sub-frame when zero users are estimated");
    }

    void add(CLI::App& app, const std::string& flag, const std::string& help)
    {
        std::string key = flag;
        std::replace(key.begin(), key.end(), '-', '_');
        app.add_option_function<std::string>(
            "--" + flag, [this, key](const std::string& v) { values[key] = v; }, help);
        order.push_back(key);
    }

    /// Defaults, then the config file, then explicit flags.
    pima::SimConfig resolve(pima::SimConfig config)
    {
        if (config_path) {
            std::vector<pima::ConfigEntry> entries;
            try {
                entries = pima::read_config_file(*config_path);
            } catch (const std::system_error& e) {
                throw IoError(e.what());
            }
            std::vector<pima::ConfigEntry> settings;
            for (auto& e : entries) {
                if (e.key == "out") {
                    if (!out) {
                        out = e.value;
                    }
                } else {
                    settings.push_back(std::move(e));
                }
            }
            try {
                pima::apply_entries(config, settings);
            } catch (const pima::ConfigFileError& e) {
                throw pima::ConfigError(*config_path, e.what());
            }
        }
        if (values.contains("pe_target") && values.contains("m1")) {
            throw pima::ConfigError("m1", "--pe-target and --m1 are mutually exclusive");
        }
        for (const auto& key : order) {
            if (auto it = values.find(key); it != values.end()) {
                pima::apply_setting(config, key, it->second);
            }
        }
        config.validate();
        return config;
    }

    std::vector<std::string> order;
};

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

void log_config(const pima::SimConfig& c)
{
    fmt::print(stderr, "config: {}\n", pima::describe(c));
}

int cmd_run(SimFlags& flags, const std::optional<std::string>& trace_path)
{
    const pima::SimConfig config = flags.resolve(pima::SimConfig{});
    log_config(config);
    if (config.protocol == pima::Protocol::pima) {
        fmt::print(stderr, "sensing: M1 = {}, L1 = {:.1f} us ({:.4f} slots)\n", config.resolved_m1(),
                   config.pia_duration_s() * 1e6, config.pia_slots());
    }

    std::ofstream trace_file;
    if (trace_path) {
        trace_file = open_output(*trace_path);
    }
    const pima::Metrics m = pima::run_protocol(config, trace_path ? &trace_file : nullptr);

    const std::string row = pima::cell_csv_row(config, m);
    if (flags.out) {
        auto out = open_output(*flags.out);
        out << pima::kCellCsvHeader << '\n' << row << '\n';
        if (!out) {
            throw IoError("write failed for " + *flags.out);
        }
    } else {
        fmt::print("{}\n{}\n", pima::kCellCsvHeader, row);
    }

    const auto latency = m.mean_latency_s();
    fmt::print(stderr, "{}: generated {} delivered {} dropped {} residual {}; drop probability {:.4g}; ",
               pima::to_string(config.protocol), m.generated, m.delivered, m.dropped, m.residual,
               m.drop_probability());
    if (latency) {
        fmt::print(stderr, "mean latency {:.4g} s\n", *latency);
    } else {
        fmt::print(stderr, "mean latency n/a\n");
    }
    if (auto e = m.mean_estimate_error()) {
        fmt::print(stderr, "pima: frames {}, mean |nu - nu_hat| {:.4f}, mean L2 {:.3f}\n", m.frames, *e,
                   m.mean_dt_slots().value_or(0.0));
    }
    if (auto g = m.mean_backlog_estimate()) {
        fmt::print(stderr, "saloha: mean backlog estimate {:.4f}\n", *g);
    }
    return kExitOk;
}

int cmd_figures(SimFlags& flags, std::size_t seeds, std::size_t points, unsigned threads)
{
    const std::filesystem::path dir = flags.out.value_or("figures");
    pima::SimConfig base = flags.resolve(pima::SimConfig{});
    if (seeds == 0 || points == 0) {
        throw pima::ConfigError("seeds", "seeds and points must be positive");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }

    const auto curves = pima::reference_curves(base);
    const auto loads = pima::linear_grid(0.01, 0.7, points);
    std::vector<std::uint64_t> seed_list;
    for (std::size_t i = 0; i < seeds; ++i) {
        seed_list.push_back(base.seed + i);
    }
    for (const auto& c : curves) {
        fmt::print(stderr, "curve {}: ", c.name);
        log_config(c.base);
    }
    fmt::print(stderr, "running {} cells ({} curves x {} loads x {} seeds)\n",
               curves.size() * loads.size() * seed_list.size(), curves.size(), loads.size(), seed_list.size());

    const pima::SweepResult result = pima::sweep(curves, loads, seed_list, threads);

    auto write = [&](const std::string& name, auto&& fn) {
        auto out = open_output(dir / name);
        fn(out);
        if (!out) {
            throw IoError("write failed for " + (dir / name).string());
        }
        fmt::print(stderr, "wrote {}\n", (dir / name).string());
    };
    write("fig2_drop.csv", [&](std::ostream& o) { pima::write_point_csv(o, result.points, pima::PointMetric::drop); });
    write("fig3_latency.csv",
          [&](std::ostream& o) { pima::write_point_csv(o, result.points, pima::PointMetric::latency); });
    write("cells.csv", [&](std::ostream& o) { pima::write_cell_csv(o, result.cells); });
    return kExitOk;
}

int cmd_tables(int users, double noise_power, double bandwidth_hz, const std::vector<double>& pe_grid)
{
    if (users < 1) {
        throw pima::ConfigError("users", "must be at least 1");
    }
    const pima::ScheduleTable table(users);
    fmt::print("# schedule table, K = {}\nnu,L2_opt,efficiency\n", users);
    for (int nu = 0; nu <= users; ++nu) {
        fmt::print("{},{},{:.6f}\n", nu, table.slots(nu), table.efficiency(nu));
    }

    const auto regions = pima::practical_thresholds(users, noise_power);
    fmt::print("\n# decision boundaries (practical thresholds), noise power = {}\nb,eps\n", noise_power);
    for (int b = 0; b < users; ++b) {
        fmt::print("{},{}\n", b, regions.boundary(b));
    }

    fmt::print("\n# sensing samples, W = {} Hz\npe_target,M1,L1_us,pe_worst_case\n", bandwidth_hz);
    for (double pe : pe_grid) {
        const auto m1 = pima::required_samples(users, noise_power, pe);
        fmt::print("{},{},{:.3f},{:.6f}\n", pe, m1, static_cast<double>(m1) / bandwidth_hz * 1e6,
                   pima::conditional_error_prob(users, regions, m1, noise_power));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Slot-level simulator for PIMA, TDMA and stabilized slotted ALOHA"};
    app.require_subcommand(1);

    SimFlags run_flags;
    std::optional<std::string> trace_path;
    auto* run = app.add_subcommand("run", "Simulate one configuration and print a CSV row");
    run_flags.add_to(*run);
    run->add_option("--out", run_flags.out, "Write the CSV row to this file instead of stdout");
    run->add_option("--trace", trace_path, "Write one JSON line per PIMA frame to this file");

    SimFlags fig_flags;
    std::size_t seeds = 10;
    std::size_t points = 10;
    unsigned threads = 0;
    auto* figures = app.add_subcommand("figures", "Sweep the reference curves and write figure CSVs");
    fig_flags.add_to(*figures);
    figures->add_option("--out", fig_flags.out, "Output directory (default: figures)");
    figures->add_option("--seeds", seeds, "Seeds per point, counting up from --seed")->capture_default_str();
    figures->add_option("--points", points, "Load points from 0.01 to 0.7")->capture_default_str();
    figures->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

    int users = 20;
    double noise_db = -10.0;
    double bandwidth_hz = 1e8;
    std::vector<double> pe_grid{0.01, 0.05, 0.1, 0.2, 0.3, 0.5};
    auto* tables = app.add_subcommand("tables", "Print the schedule table, decision boundaries and M1 sizing");
    tables->add_option("--users", users, "Number of users K")->capture_default_str();
    tables->add_option("--noise-db", noise_db, "Noise power [dB]")->capture_default_str();
    tables->add_option("--bandwidth-hz", bandwidth_hz, "System bandwidth [Hz]")->capture_default_str();
    tables->add_option("--pe-grid", pe_grid, "Target error probabilities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_flags, trace_path);
        }
        if (figures->parsed()) {
            return cmd_figures(fig_flags, seeds, points, threads);
        }
        return cmd_tables(users, std::pow(10.0, noise_db / 10.0), bandwidth_hz, pe_grid);
    } catch (const IoError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitIo;
    } catch (const pima::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const pima::ConfigFileError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
