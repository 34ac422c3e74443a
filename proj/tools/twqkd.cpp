// Copyright 2026 The twqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// twqkd command line:
//   twqkd run <config> [--out DIR] [--seed N] [--n-rounds N]
//   twqkd curves <fig2a|fig2b|fig2c> --out DIR [--points N] [--d-pd-cm X]
//   twqkd sweep --protocol X --attack Y --p-grid a:b:n --seed N [--out DIR] ...
//   twqkd selftest

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "acceptance_suite.hpp"
#include "twqkd/config.hpp"
#include "twqkd/harness.hpp"

namespace {

using namespace twqkd;
using harness::kExitAborted;
using harness::kExitOk;
using harness::kExitUsage;

struct SessionFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> n_rounds;
    std::optional<double> cm_fraction;
    std::optional<double> flip_prob;
    std::optional<double> transmittance;
    std::optional<double> d_pd_cm;
    bool threshold = false;
    std::optional<std::string> out;
};

void add_session_flags(CLI::App* cmd, SessionFlags& f) {
    cmd->add_option("--seed", f.seed, "Base seed (overrides config)");
    cmd->add_option("--n-rounds", f.n_rounds, "Rounds per session")->check(CLI::PositiveNumber);
    cmd->add_option("--cm-fraction", f.cm_fraction, "Control-mode probability")->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--flip-prob", f.flip_prob, "Per-leg flip probability")->check(CLI::Range(0.0, 0.5));
    cmd->add_option("--transmittance", f.transmittance, "Per-leg transmittance")->check(CLI::Range(1e-300, 1.0));
    cmd->add_option("--d-pd-cm", f.d_pd_cm, "Control-mode abort threshold")->check(CLI::Range(1e-9, 0.499999999));
    cmd->add_flag("--threshold", f.threshold, "Apply the control-mode threshold to two-way protocols");
    cmd->add_option("--out", f.out, "Output directory");
}

void apply(const SessionFlags& f, harness::Scenario& sc) {
    if (f.seed) sc.session.seed = *f.seed;
    if (f.n_rounds) sc.session.n_rounds = *f.n_rounds;
    if (f.cm_fraction) sc.session.cm_fraction = *f.cm_fraction;
    if (f.flip_prob) sc.session.channel.flip_prob = *f.flip_prob;
    if (f.transmittance) sc.session.channel.transmittance_per_leg = *f.transmittance;
    if (f.d_pd_cm) sc.session.d_pd_cm = *f.d_pd_cm;
    if (f.threshold) sc.session.two_way_threshold = true;
    if (f.out) sc.out_dir = *f.out;
}

int report(const harness::ScenarioReport& rep) {
    std::cout << rep.summary << '\n';
    for (const auto& p : rep.files) std::cout << "  wrote " << p.string() << '\n';
    return rep.exit_code;
}

int run_selftest() {
    namespace fs = std::filesystem;
    const fs::path scratch = fs::temp_directory_path() / "twqkd_selftest";
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    const auto results = acceptance::run_acceptance(scratch);
    int failed = 0;
    for (const auto& r : results) {
        std::cout << acceptance::format_line(r) << '\n';
        failed += r.passed ? 0 : 1;
    }
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    fs::remove_all(scratch);
    return failed == 0 ? kExitOk : kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-way QKD MITM simulator"};
    app.require_subcommand(1);

    std::string config_path;
    SessionFlags run_flags;
    auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
    run->add_option("config", config_path, "Config file")->required();
    add_session_flags(run, run_flags);

    std::string curve_label;
    std::string curve_out;
    std::size_t curve_points = kDefaultCurvePoints;
    double curve_threshold = kDefaultThresholdCM;
    auto* curves = app.add_subcommand("curves", "Write a mutual-information curve (CSV + SVG)");
    curves->add_option("label", curve_label, "fig2a, fig2b or fig2c")->required();
    curves->add_option("--out", curve_out, "Output directory")->required();
    curves->add_option("--points", curve_points, "Grid points")->check(CLI::Range(2, 1000000));
    curves->add_option("--d-pd-cm", curve_threshold, "Threshold for fig2c")->check(CLI::Range(1e-9, 0.499999999));

    std::string sweep_protocol, sweep_attack, sweep_grid;
    std::optional<std::string> sweep_config;
    SessionFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Sweep Eve's presence p");
    sweep->add_option("--protocol", sweep_protocol, "bb84, mcasbb84, pp or lm05");
    sweep->add_option("--attack", sweep_attack, "Attack kind, or 'mitm' for the protocol's MITM");
    sweep->add_option("--p-grid", sweep_grid, "Presence grid a:b:n");
    sweep->add_option("--config", sweep_config, "Base config file");
    add_session_flags(sweep, sweep_flags);

    auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*selftest) return run_selftest();

        if (*curves) {
            const auto label = parse_curve_label(curve_label);
            if (!label) {
                std::cerr << "error: unknown curve '" << curve_label << "'\n";
                return kExitUsage;
            }
            return report(harness::write_curves(*label, curve_points, curve_threshold, curve_out));
        }

        if (*run) {
            auto sc = harness::parse_config(config_path);
            apply(run_flags, sc);
            sc.session.validate();
            return report(harness::run_scenario(sc, sc.out_dir.value_or(".")));
        }

        if (*sweep) {
            harness::Scenario sc;
            bool have_seed = false;
            if (sweep_config) {
                sc = harness::parse_config(*sweep_config);
                have_seed = true;
            }
            sc.name = harness::ScenarioName::Sweep;
            if (!sweep_protocol.empty()) {
                const auto p = parse_protocol(sweep_protocol);
                if (!p) throw harness::ConfigError(0, "unknown protocol '" + sweep_protocol + "'");
                sc.session.protocol = *p;
            }
            if (!sweep_attack.empty()) {
                const auto k = sweep_attack == "mitm" ? std::optional(mitm_for(sc.session.protocol))
                                                      : parse_attack(sweep_attack);
                if (!k || (sweep_attack == "mitm" && *k == AttackKind::None)) {
                    throw harness::ConfigError(0, "unknown attack '" + sweep_attack + "'");
                }
                sc.session.attack.kind = *k;
                sc.attack_set = true;
            }
            if (!sweep_grid.empty()) sc.p_grid = harness::parse_p_grid(sweep_grid);
            have_seed = have_seed || sweep_flags.seed.has_value();
            if (!have_seed) throw harness::ConfigError(0, "sweep needs --seed (or a config with a seed)");
            apply(sweep_flags, sc);
            sc.session.validate();
            if (sc.attack_set && !sc.session.attack.supports(sc.session.protocol)) {
                throw harness::ConfigError(0, "attack cannot run against this protocol");
            }
            return report(harness::run_scenario(sc, sc.out_dir.value_or(".")));
        }
    } catch (const harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
