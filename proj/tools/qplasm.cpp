// qplasm - batch front end: scenario execution, validation, parameter
// sweeps, CSV/JSON emission.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "qplasm/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qplasm;
using namespace qplasm::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json table_to_json(const Table& t) {
    json rows = json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        json row = json::object();
        if (t.labeled()) row[t.label_header] = t.row_labels[r];
        for (std::size_t c = 0; c < t.header.size(); ++c)
            row[t.header[c]] = t.rows[r][c];
        rows.push_back(row);
    }
    return rows;
}

struct OutputOptions {
    std::string out_dir = ".";
    std::string format = "csv";
    bool quiet = false;
};

void write_result(const ScenarioResult& res, const Config& cfg,
                  const OutputOptions& opt, const Table& table,
                  const std::string& stem) {
    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    std::vector<std::string> outputs;

    fs::path main_path;
    if (opt.format == "csv") {
        main_path = dir / (stem + ".csv");
        atomic_write(main_path, to_csv(table));
    } else {
        main_path = dir / (stem + ".json");
        json j;
        j["scenario"] = res.scenario;
        j["table"] = table_to_json(table);
        atomic_write(main_path, j.dump(2) + "\n");
    }
    outputs.push_back(main_path.filename().string());

    json meta;
    meta["toolkit"] = "qplasm";
    meta["version"] = toolkit_version;
    meta["scenario"] = res.scenario;
    meta["config_hash"] = hash_hex(cfg.content_hash());
    meta["format"] = opt.format;
    if (res.seeded) meta["seed"] = res.seed;
    meta["outputs"] = outputs;
    atomic_write(dir / "metadata.json", meta.dump(2) + "\n");

    if (!opt.quiet)
        std::cout << res.scenario << ": wrote " << main_path.string() << " ("
                  << table.rows.size() << " rows)\n";
}

int dispatch(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const catalog_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qplasm::error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qplasm - plasmonic sensor simulation and estimation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    OutputOptions opt;
    long seed_override = -1;

    auto add_common = [&](CLI::App* sub, bool with_output) {
        sub->add_option("--config", config_path, "scenario config file")->required();
        if (with_output) {
            sub->add_option("--out", opt.out_dir, "output directory");
            sub->add_option("--format", opt.format, "csv or json")
                ->check(CLI::IsMember({"csv", "json"}));
            sub->add_option("--seed", seed_override, "override the config seed");
            sub->add_flag("--quiet", opt.quiet, "suppress progress output");
        }
    };

    auto* run_cmd = app.add_subcommand("run", "execute a scenario config");
    add_common(run_cmd, true);

    auto* validate_cmd =
        app.add_subcommand("validate", "schema + physics checks, no execution");
    add_common(validate_cmd, false);

    auto* sweep_cmd = app.add_subcommand("sweep", "linear parameter sweep over a scenario");
    add_common(sweep_cmd, true);
    std::string sweep_param;
    double sweep_from = 0.0, sweep_to = 0.0;
    long sweep_points = 0;
    sweep_cmd->add_option("--param", sweep_param, "config key to sweep")->required();
    sweep_cmd->add_option("--from", sweep_from, "first value")->required();
    sweep_cmd->add_option("--to", sweep_to, "last value")->required();
    sweep_cmd->add_option("--points", sweep_points, "number of points (>= 2)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    auto load_config = [&]() {
        Config cfg = Config::load(config_path);
        if (seed_override >= 0)
            cfg.set("experiment.seed", std::to_string(seed_override));
        return cfg;
    };

    // Errors raised while parsing/validating a config are configuration
    // errors (exit 2) even when they surface as physics-domain checks.
    auto validate_phase = [](const Config& cfg) {
        try {
            run_scenario(cfg, /*validate_only=*/true);
        } catch (const config_error&) {
            throw;
        } catch (const qplasm::error& e) {
            throw config_error(e.what());
        }
    };

    if (validate_cmd->parsed()) {
        return dispatch([&] {
            const Config cfg = load_config();
            validate_phase(cfg);
            std::cout << "ok: " << config_path << "\n";
            return kExitOk;
        });
    }

    if (run_cmd->parsed()) {
        return dispatch([&] {
            const Config cfg = load_config();
            validate_phase(cfg);
            const ScenarioResult res = run_scenario(cfg);
            write_result(res, cfg, opt, res.table, res.scenario);
            return kExitOk;
        });
    }

    // sweep
    return dispatch([&] {
        Config cfg = load_config();
        validate_phase(cfg);
        if (!cfg.has(sweep_param))
            throw config_error(config_path + ": swept parameter '" + sweep_param +
                               "' not present in the config");
        if (sweep_points < 2)
            throw config_error("sweep: --points must be >= 2");

        Table combined;
        ScenarioResult last;
        for (long k = 0; k < sweep_points; ++k) {
            const double value =
                sweep_from + (sweep_to - sweep_from) * k / (sweep_points - 1);
            Config point = cfg;
            point.set(sweep_param, format_double(value));
            // deterministic per-point substreams
            const ScenarioResult res =
                run_scenario(point, false, static_cast<std::uint64_t>(k) << 32);
            if (k == 0) {
                combined.label_header = res.summary.label_header;
                combined.header.push_back(sweep_param);
                for (const auto& h : res.summary.header) combined.header.push_back(h);
            }
            for (std::size_t r = 0; r < res.summary.rows.size(); ++r) {
                if (res.summary.labeled())
                    combined.row_labels.push_back(res.summary.row_labels[r]);
                std::vector<double> row{value};
                for (double v : res.summary.rows[r]) row.push_back(v);
                combined.rows.push_back(row);
            }
            last = res;
        }
        last.scenario = last.scenario + "-sweep";
        write_result(last, cfg, opt, combined, "sweep");
        return kExitOk;
    });
}
