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

// Scenario runner: curve, table, sweep and single-session reports.
//
// Exit codes: 0 success, 1 usage or config error, 2 protocol aborted.

#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twqkd/config.hpp"
#include "twqkd/csv.hpp"
#include "twqkd/infotheory.hpp"
#include "twqkd/postproc.hpp"
#include "twqkd/protocol.hpp"
#include "twqkd/svg.hpp"

namespace twqkd::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAborted = 2;

struct ScenarioReport {
    std::vector<std::filesystem::path> files;
    int exit_code = kExitOk;
    std::string summary;
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write output file '" + p.string() + "'");
    return out;
}

inline void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
    }
}

inline std::string flag(bool b) { return b ? "true" : "false"; }

} // namespace detail

// --- curves -------------------------------------------------------------------

inline void write_curve_csv(std::ostream& os, const MutualInfoCurve& c) {
    csv::write_row(os, {"d", "i_ab", "i_ae"});
    for (std::size_t i = 0; i < c.d_grid.size(); ++i) {
        csv::write_row(os, {csv::number(c.d_grid[i]), csv::number(c.i_ab[i]), csv::number(c.i_ae[i])});
    }
}

inline ScenarioReport write_curves(CurveLabel label, std::size_t points, double d_pd_cm,
                                   const std::filesystem::path& dir) {
    detail::prepare_dir(dir);
    const auto curve = build_curve(label, points, d_pd_cm);
    ScenarioReport rep;
    const auto csv_path = dir / (std::string(to_string(label)) + ".csv");
    const auto svg_path = dir / (std::string(to_string(label)) + ".svg");
    {
        auto out = detail::open_output(csv_path);
        write_curve_csv(out, curve);
    }
    {
        auto out = detail::open_output(svg_path);
        svg::write_curve(out, curve);
    }
    rep.files = {csv_path, svg_path};
    rep.summary = std::string(to_string(label)) + ": " + std::to_string(curve.d_grid.size()) + " points";
    return rep;
}

// --- sweep --------------------------------------------------------------------

struct SweepRow {
    double p = 0.0;
    DisturbanceEstimate disturbance;
    EveAccuracy eve;
    bool aborted = false;
    std::string abort_reason;
};

/// Attack used by sweeps and table rows when none is named: the protocol's
/// MITM, or random-basis intercept-resend for BB84.
inline AttackKind default_attack(ProtocolKind k) {
    const auto m = mitm_for(k);
    return m == AttackKind::None ? AttackKind::InterceptResend : m;
}

inline SweepRow run_sweep_point(SessionConfig cfg, double p) {
    cfg.attack.presence = p;
    const auto t = run_session(cfg);
    return {p, t.disturbance, eve_accuracy(t), t.aborted, t.abort_reason};
}

/// Points run concurrently; point i uses seed derive_seed(seed, 1000 + i).
inline std::vector<SweepRow> run_sweep(const Scenario& sc) {
    SessionConfig base = sc.session;
    if (!sc.attack_set) base.attack.kind = default_attack(base.protocol);
    const auto ps = sc.p_grid.values();
    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        SessionConfig cfg = base;
        cfg.seed = derive_seed(sc.session.seed, 1000 + i);
        cfg.attack.presence = ps[i];
        cfg.validate();
        jobs.push_back(std::async(std::launch::async, run_sweep_point, cfg, ps[i]));
    }
    std::vector<SweepRow> rows;
    rows.reserve(jobs.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    csv::write_row(os, {"p", "d_mm", "d_cm", "eve_coverage", "eve_accuracy", "abort"});
    for (const auto& r : rows) {
        csv::write_row(os, {csv::number(r.p), csv::number(r.disturbance.d_mm), csv::number(r.disturbance.d_cm),
                            csv::number(r.eve.coverage), csv::number(r.eve.accuracy), detail::flag(r.aborted)});
    }
}

// --- table 1 ------------------------------------------------------------------

struct TableRow {
    ProtocolKind protocol;
    std::string modes;
    std::optional<double> d_mm;
    std::optional<double> d_cm;
    std::string max_disturbance;
    std::string secure;
    double i_ab = 0.0;
    double i_ae = 0.0;
    bool aborted = false;
    double distance_km = 0.0;
    double transmittance = 0.0;
};

inline const std::vector<std::string>& table_columns() {
    static const std::vector<std::string> cols{"protocol", "modes",   "d_mm",    "d_cm",        "max_disturbance",
                                               "secure",   "i_ab",    "i_ae",    "aborted",     "distance_km",
                                               "transmittance"};
    return cols;
}

inline std::vector<TableRow> build_table(const Scenario& sc) {
    const std::array<ProtocolKind, 4> order{ProtocolKind::BB84, ProtocolKind::PingPong, ProtocolKind::LM05,
                                            ProtocolKind::McasBB84};
    const double t_leg = leg_transmittance(sc.link);
    std::vector<TableRow> rows;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto k = order[i];
        SessionConfig cfg = sc.session;
        cfg.protocol = k;
        cfg.attack = AttackSpec{};
        cfg.attack.kind = default_attack(k);
        cfg.attack.policy = BasisPolicy::Random;
        cfg.attack.presence = sc.presence_set ? sc.session.attack.presence : 1.0;
        cfg.seed = derive_seed(sc.session.seed, 100 + i);
        const auto t = run_session(cfg);
        const auto& d = t.disturbance;

        TableRow r;
        r.protocol = k;
        r.modes = k == ProtocolKind::BB84 ? "MM" : "MM+CM";
        r.d_mm = d.d_mm;
        r.d_cm = d.d_cm;
        r.aborted = t.aborted;
        const double dmm = std::min(d.d_mm.value_or(0.0), 0.5);
        const double dcm = std::min(d.d_cm.value_or(0.0), 0.5);
        const bool threshold_on = k == ProtocolKind::McasBB84 || (is_two_way(k) && cfg.two_way_threshold);
        if (k == ProtocolKind::BB84) {
            r.max_disturbance = csv::number(kCriticalDisturbanceBB84);
            r.secure = dmm < kCriticalDisturbanceBB84 ? "yes" : "no";
            r.i_ab = mutual_info_ab(dmm);
            r.i_ae = mutual_info_ae(dmm);
        } else {
            r.max_disturbance = threshold_on ? csv::number(cfg.d_pd_cm) : "undefined";
            r.secure = threshold_on ? (dcm < cfg.d_pd_cm ? "yes" : "no") : "undefined";
            r.i_ab = mutual_info_ab(dmm);
            r.i_ae = eve_info_mitm(dcm);
        }
        r.distance_km = photon_distance(sc.link.distance_km, k);
        r.transmittance = path_transmittance(t_leg, k);
        rows.push_back(r);
    }
    return rows;
}

inline void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows) {
    csv::write_row(os, table_columns());
    for (const auto& r : rows) {
        csv::write_row(os, {std::string(to_string(r.protocol)), r.modes, csv::number(r.d_mm), csv::number(r.d_cm),
                            r.max_disturbance, r.secure, csv::number(r.i_ab), csv::number(r.i_ae),
                            detail::flag(r.aborted), csv::number(r.distance_km), csv::number(r.transmittance)});
    }
}

// --- session ------------------------------------------------------------------

inline void write_session_summary(std::ostream& os, const Transcript& t) {
    const auto& d = t.disturbance;
    const auto eve = eve_accuracy(t);
    csv::write_row(os, {"key", "value"});
    auto row = [&](const std::string& k, const std::string& v) { csv::write_row(os, {k, v}); };
    row("protocol", std::string(to_string(t.config.protocol)));
    row("attack", std::string(to_string(t.config.attack.kind)));
    row("presence", csv::number(t.config.attack.presence));
    row("seed", std::to_string(t.config.seed));
    row("n_rounds", std::to_string(t.config.n_rounds));
    row("key_length", std::to_string(t.alice_key.size()));
    row("d_mm", csv::number(d.d_mm));
    row("n_mm", std::to_string(d.n_mm));
    row("half_width_mm", csv::number(d.half_width_mm));
    row("d_cm", csv::number(d.d_cm));
    row("n_cm", std::to_string(d.n_cm));
    row("half_width_cm", csv::number(d.half_width_cm));
    row("eve_coverage", csv::number(eve.coverage));
    row("eve_accuracy", csv::number(eve.accuracy));
    row("aborted", detail::flag(t.aborted));
    row("abort_reason", t.abort_reason);
    row("alice_key", to_hex(t.alice_key));
    row("bob_key", to_hex(t.bob_key));
    row("eve_key", to_hex(t.eve_key.bits));
    row("eve_known", to_hex(t.eve_key.known));
}

// --- dispatch -----------------------------------------------------------------

inline ScenarioReport run_scenario(const Scenario& sc, const std::filesystem::path& dir) {
    switch (sc.name) {
    case ScenarioName::Fig2a: return write_curves(CurveLabel::Fig2a, sc.curve_points, sc.session.d_pd_cm, dir);
    case ScenarioName::Fig2b: return write_curves(CurveLabel::Fig2b, sc.curve_points, sc.session.d_pd_cm, dir);
    case ScenarioName::Fig2c: return write_curves(CurveLabel::Fig2c, sc.curve_points, sc.session.d_pd_cm, dir);

    case ScenarioName::Table1: {
        detail::prepare_dir(dir);
        const auto rows = build_table(sc);
        const auto path = dir / "table1.csv";
        auto out = detail::open_output(path);
        write_table_csv(out, rows);
        return {{path}, kExitOk, "table1: 4 protocols"};
    }

    case ScenarioName::Sweep: {
        detail::prepare_dir(dir);
        const auto rows = run_sweep(sc);
        const auto path = dir / "sweep.csv";
        auto out = detail::open_output(path);
        write_sweep_csv(out, rows);
        bool any_abort = false;
        for (const auto& r : rows) any_abort = any_abort || r.aborted;
        return {{path}, any_abort ? kExitAborted : kExitOk,
                "sweep: " + std::to_string(rows.size()) + " points" + (any_abort ? ", some aborted" : "")};
    }

    case ScenarioName::Session: {
        detail::prepare_dir(dir);
        const auto t = run_session(sc.session);
        const auto tpath = dir / "transcript.csv";
        const auto spath = dir / "summary.csv";
        {
            auto out = detail::open_output(tpath);
            write_transcript_csv(out, t);
        }
        {
            auto out = detail::open_output(spath);
            write_session_summary(out, t);
        }
        std::string s = "session: key " + std::to_string(t.alice_key.size()) + " bits";
        if (t.aborted) s += ", aborted (" + t.abort_reason + ")";
        return {{tpath, spath}, t.aborted ? kExitAborted : kExitOk, s};
    }
    }
    throw std::invalid_argument("unknown scenario");
}

} // namespace twqkd::harness
