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

// Acceptance criteria, shared by the acceptance test binary and the
// `twqkd selftest` command. Each criterion yields one pass/fail line.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "twqkd/harness.hpp"
#include "twqkd/infotheory.hpp"
#include "twqkd/postproc.hpp"
#include "twqkd/protocol.hpp"

namespace twqkd::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::string num(double v, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

/// Count of delivered message-mode rounds where Bob's bit differs from
/// Alice's, over the whole transcript (not only the disclosed sample).
inline std::size_t flipped_message_bits(const Transcript& t) {
    std::size_t n = 0;
    for (const auto& r : t.rounds) {
        if (r.mode == RoundMode::MessageMode && !r.lost && r.result && is_sifted(t.config.protocol, r) &&
            *r.result != intended_bit(r)) {
            ++n;
        }
    }
    return n;
}

inline SessionConfig mitm_config(ProtocolKind k, double p, std::uint64_t seed) {
    SessionConfig c;
    c.protocol = k;
    c.n_rounds = 20000;
    c.cm_fraction = 0.2;
    c.seed = seed;
    c.attack.kind = mitm_for(k);
    c.attack.presence = p;
    return c;
}

struct TimedTranscript {
    Transcript t;
    double seconds;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace detail

inline std::vector<CriterionResult> run_acceptance(const std::filesystem::path& scratch) {
    using namespace detail;
    std::vector<CriterionResult> out;
    auto add = [&](int id, std::string name, bool ok, std::string detail) {
        out.push_back({id, std::move(name), ok, std::move(detail)});
    };

    // 1. critical disturbance
    {
        const auto t0 = Clock::now();
        const double d = critical_disturbance(1e-6);
        const double dt = seconds_since(t0);
        const double h = binary_entropy(d);
        const bool ok = std::abs(d - 0.11) <= 1e-3 && std::abs(h - 0.5) <= 1e-6 && dt < 1e-3;
        add(1, "critical disturbance", ok,
            "D*=" + num(d, 9) + " |h(D*)-1/2|=" + num(std::abs(h - 0.5), 3) + " t=" + num(dt * 1e6, 3) + "us");
    }

    // 2. I_AB + I_AE = 1 on 201 points; fig2a crossing within one grid step
    {
        const auto c = build_curve(CurveLabel::Fig2a, 201);
        double worst = 0.0;
        for (std::size_t i = 0; i < c.d_grid.size(); ++i) {
            worst = std::max(worst, std::abs(c.i_ab[i] + c.i_ae[i] - 1.0));
        }
        const double step = c.d_grid[1] - c.d_grid[0];
        const auto idx = first_crossing(c);
        const double dstar = critical_disturbance(1e-9);
        const bool cross_ok = idx && std::abs(c.d_grid[*idx] - dstar) <= step;
        add(2, "mutual-information identity", worst <= 1e-12 && cross_ok && c.d_grid.size() == 201,
            "max|I_AB+I_AE-1|=" + num(worst, 3) +
                (idx ? " crossing at D=" + num(c.d_grid[*idx]) : std::string(" no crossing")) +
                " D*=" + num(dstar));
    }

    // 3-5 share the two-way MITM sessions.
    std::map<std::pair<int, int>, TimedTranscript> sessions;
    const std::array<ProtocolKind, 2> two_way{ProtocolKind::PingPong, ProtocolKind::LM05};
    const std::array<double, 3> ps{0.25, 0.5, 1.0};
    for (std::size_t a = 0; a < two_way.size(); ++a) {
        for (std::size_t b = 0; b < ps.size(); ++b) {
            const auto t0 = Clock::now();
            auto t = run_session(mitm_config(two_way[a], ps[b], 0xACCE55 + 10 * a + b));
            sessions.emplace(std::pair<int, int>(a, b), TimedTranscript{std::move(t), seconds_since(t0)});
        }
    }

    {
        bool ok = true;
        std::string d;
        for (const auto& [key, tt] : sessions) {
            const auto flips = flipped_message_bits(tt.t);
            const bool this_ok = flips == 0 && tt.t.disturbance.d_mm && *tt.t.disturbance.d_mm == 0.0 &&
                                 tt.seconds < 30.0;
            ok = ok && this_ok;
            d += std::string(to_string(two_way[key.first])) + "@p=" + num(ps[key.second]) +
                 ": flips=" + std::to_string(flips) + " t=" + num(tt.seconds, 3) + "s; ";
        }
        add(3, "MITM undetectable in message mode", ok, d);
    }

    {
        bool ok = true;
        std::string d;
        for (const auto& [key, tt] : sessions) {
            const double p = ps[key.second];
            const auto& est = tt.t.disturbance;
            const double expect = p / 2;
            const double tol = 4.0 * oracle::binomial_sigma(expect, est.n_cm);
            bool this_ok = est.d_cm && std::abs(*est.d_cm - expect) <= tol;
            if (p == 1.0) this_ok = this_ok && *est.d_cm >= 0.47 && *est.d_cm <= 0.53;
            ok = ok && this_ok;
            d += std::string(to_string(two_way[key.first])) + "@p=" + num(p) + ": d_cm=" +
                 num(est.d_cm.value_or(-1)) + " (n=" + std::to_string(est.n_cm) + ", 4s=" + num(tol, 3) + "); ";
        }
        add(4, "control-mode detection statistic d_cm = p/2", ok, d);
    }

    {
        bool ok = true;
        std::string d;
        for (std::size_t a = 0; a < two_way.size(); ++a) {
            const auto& full = sessions.at({static_cast<int>(a), 2}).t;
            const auto e1 = eve_accuracy(full);
            const bool copy = full.eve_key.bits == full.alice_key;
            const bool full_ok = e1.coverage == 1.0 && e1.accuracy == 1.0 && copy;

            const auto& half = sessions.at({static_cast<int>(a), 1}).t;
            const auto e2 = eve_accuracy(half);
            const double n = static_cast<double>(half.alice_key.size());
            const double cov = e2.coverage.value_or(-1);
            const bool half_ok = std::abs(cov - 0.5) <= 4.0 * std::sqrt(0.25 / n) && e2.accuracy == 1.0;

            // analytic eve_info_mitm(d_cm) against simulated coverage
            const double dcm = std::min(half.disturbance.d_cm.value_or(0.0), 0.5);
            const double sigma_model = 2.0 * oracle::binomial_sigma(0.25, half.disturbance.n_cm);
            const double sigma_cov = std::sqrt(0.25 / n);
            const double gap = std::abs(eve_info_mitm(dcm) - cov);
            const bool model_ok = gap <= 4.0 * std::hypot(sigma_model, sigma_cov);

            ok = ok && full_ok && half_ok && model_ok;
            d += std::string(to_string(two_way[a])) + ": p=1 cov=" + num(e1.coverage.value_or(-1)) +
                 " acc=" + num(e1.accuracy.value_or(-1)) + (copy ? " key copied" : " key differs") +
                 "; p=0.5 cov=" + num(cov) + " acc=" + num(e2.accuracy.value_or(-1)) +
                 " |eve_info_mitm-cov|=" + num(gap, 3) + "; ";
        }
        add(5, "Eve copies the key", ok, d);
    }

    // 6. key-rate special cases, exact
    {
        const double r1 = key_rate_rpa(xi_from_fidelities(1.0, 1.0));
        const double r2 = key_rate_rpa(xi_from_fidelities(1.0, 0.5));
        const double r3 = key_rate_rpa(xi_from_fidelities(0.5, 1.0));
        add(6, "key-rate special cases", r1 == 1.0 && r2 == 0.0 && r3 == 0.0,
            "r(1,1)=" + num(r1, 17) + " r(1,1/2)=" + num(r2, 17) + " r(1/2,1)=" + num(r3, 17));
    }

    // 7. BB84 intercept-resend baseline
    {
        SessionConfig c;
        c.protocol = ProtocolKind::BB84;
        c.n_rounds = 240000;
        c.seed = 0xBB84;
        c.attack.kind = AttackKind::InterceptResend;
        c.attack.policy = BasisPolicy::Random;
        c.attack.presence = 1.0;
        const auto t = run_session(c);
        const double expect = oracle::bb84_intercept_resend_error();
        const auto& est = t.disturbance;
        const double tol = 4.0 * oracle::binomial_sigma(expect, est.n_mm);
        const bool ok = est.n_mm >= 10000 && est.d_mm && std::abs(*est.d_mm - expect) <= tol;
        add(7, "intercept-resend baseline", ok,
            "d_mm=" + num(est.d_mm.value_or(-1)) + " oracle=" + num(expect) + " n=" + std::to_string(est.n_mm) +
                " 4s=" + num(tol, 3));
    }

    // 8. mcasBB84 threshold
    {
        auto cfg = [](double p, std::uint64_t seed) {
            SessionConfig c;
            c.protocol = ProtocolKind::McasBB84;
            c.n_rounds = 20000;
            c.seed = seed;
            c.d_pd_cm = 0.05;
            c.attack.kind = AttackKind::MitmMcasX;
            c.attack.presence = p;
            return c;
        };
        const auto high = run_session(cfg(0.5, 0x3CA5));
        const auto low = run_session(cfg(0.04, 0x3CA6));
        const bool high_ok = high.aborted && high.disturbance.d_cm && *high.disturbance.d_cm > 0.05;
        const bool low_ok = !low.aborted && low.disturbance.d_cm && *low.disturbance.d_cm < 0.05 &&
                            low.disturbance.d_mm == 0.0 && flipped_message_bits(low) == 0 &&
                            flipped_message_bits(high) == 0;
        add(8, "mcasBB84 threshold abort", high_ok && low_ok,
            "p=0.5: d_cm=" + num(high.disturbance.d_cm.value_or(-1)) + " aborted=" + (high.aborted ? "yes" : "no") +
                "; p=0.04: d_cm=" + num(low.disturbance.d_cm.value_or(-1)) +
                " aborted=" + (low.aborted ? "yes" : "no") + " d_mm=" + num(low.disturbance.d_mm.value_or(-1)));
    }

    // 9. table 1 distance / transmittance columns
    {
        harness::Scenario sc;
        sc.name = harness::ScenarioName::Table1;
        sc.session.seed = 9;
        sc.session.n_rounds = 4000;
        sc.link = {0.2, 50.0};
        const auto dir = scratch / "c9";
        harness::run_scenario(sc, dir);
        std::ifstream in(dir / "table1.csv");
        std::string line;
        std::getline(in, line);
        const auto header = csv::split_row(line);
        const auto col = [&](const std::string& name) {
            return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
        };
        const double t = leg_transmittance(sc.link);
        const double L = sc.link.distance_km;
        const std::vector<std::pair<std::string, std::pair<double, double>>> want{
            {"bb84", {L, t}}, {"pp", {4 * L, t * t * t * t}}, {"lm05", {2 * L, t * t}}, {"mcasbb84", {L, t}}};
        bool ok = header.size() == harness::table_columns().size();
        std::string d;
        for (const auto& [proto, dv] : want) {
            if (!std::getline(in, line)) {
                ok = false;
                break;
            }
            const auto f = csv::split_row(line);
            const double dist = std::stod(f.at(col("distance_km")));
            const double tr = std::stod(f.at(col("transmittance")));
            ok = ok && f.at(0) == proto && dist == dv.first && tr == dv.second;
            d += proto + ": " + f.at(col("distance_km")) + "km T=" + f.at(col("transmittance")) + "; ";
        }
        add(9, "Table 1 distance and transmittance", ok, d);
    }

    // 10. PA cannot remove what Eve copied
    {
        const auto& t = sessions.at({1, 2}).t; // LM05, p = 1
        Rng rng(0x9A);
        const auto pa = privacy_amplify(t.alice_key, 0.0, kDefaultSafetyBits, rng);
        const auto eve_secret = universal_hash(t.eve_key.bits, pa.spec);
        const auto bob_secret = universal_hash(t.bob_key, pa.spec);
        const bool hashed_equal = !pa.secret_key.empty() && eve_secret == pa.secret_key && bob_secret == pa.secret_key;
        const auto k_full = choose_output_length(t.alice_key.size(), 1.0, kDefaultSafetyBits);
        Rng rng2(0x9B);
        const auto pa_full = privacy_amplify(t.alice_key, 1.0, kDefaultSafetyBits, rng2);
        const bool zero_ok = k_full == 0 && pa_full.secret_key.empty() &&
                             pa_full.abort_reason == std::optional<std::string>("no-extractable-privacy");
        add(10, "privacy amplification futile under full MITM", hashed_equal && zero_ok,
            "k=" + std::to_string(pa.secret_key.size()) + (hashed_equal ? " Eve's hash equals Alice's" : " mismatch") +
                "; k(eve_info=1)=" + std::to_string(k_full));
    }

    // 11. universal hash properties
    {
        Rng rng(0x11);
        bool det = true, lin = true;
        for (int i = 0; i < 10000; ++i) {
            const std::size_t m = 64, k = 32;
            const auto spec = random_hash_spec(m, k, rng);
            Bits x(m), y(m), xy(m);
            for (std::size_t j = 0; j < m; ++j) {
                x[j] = rng.bit();
                y[j] = rng.bit();
                xy[j] = x[j] ^ y[j];
            }
            const auto hx = universal_hash(x, spec);
            const auto hy = universal_hash(y, spec);
            det = det && hx == universal_hash(x, spec);
            const auto hxy = universal_hash(xy, spec);
            for (std::size_t j = 0; j < k; ++j) lin = lin && hxy[j] == (hx[j] ^ hy[j]);
        }
        std::size_t collisions = 0;
        for (int i = 0; i < 100000; ++i) {
            const std::size_t m = 64, k = 32;
            const auto spec = random_hash_spec(m, k, rng);
            Bits x(m), y(m);
            for (std::size_t j = 0; j < m; ++j) {
                x[j] = rng.bit();
                y[j] = rng.bit();
            }
            if (x == y) y[0] ^= 1;
            if (verify(universal_hash(x, spec), universal_hash(y, spec))) ++collisions;
        }
        add(11, "universal hash properties", det && lin && collisions == 0,
            std::string("deterministic=") + (det ? "yes" : "no") + " linear=" + (lin ? "yes" : "no") +
                " collisions=" + std::to_string(collisions) + "/100000");
    }

    // 12. byte-identical reruns
    {
        bool ok = true;
        std::string d;
        for (auto name : {harness::ScenarioName::Fig2a, harness::ScenarioName::Fig2b, harness::ScenarioName::Fig2c,
                          harness::ScenarioName::Table1, harness::ScenarioName::Sweep,
                          harness::ScenarioName::Session}) {
            harness::Scenario sc;
            sc.name = name;
            sc.session.seed = 1234;
            sc.session.n_rounds = 5000;
            sc.session.protocol = ProtocolKind::LM05;
            sc.session.attack.kind = AttackKind::MitmLM05;
            sc.session.attack.presence = 0.5;
            const auto base = scratch / ("c12_" + std::string(harness::to_string(name)));
            const auto r1 = harness::run_scenario(sc, base / "a");
            const auto r2 = harness::run_scenario(sc, base / "b");
            bool same = r1.files.size() == r2.files.size();
            for (std::size_t i = 0; same && i < r1.files.size(); ++i) {
                same = read_file(r1.files[i]) == read_file(r2.files[i]) && !read_file(r1.files[i]).empty();
            }
            ok = ok && same;
            d += std::string(harness::to_string(name)) + (same ? "=same " : "=DIFFERS ");
        }
        add(12, "deterministic outputs", ok, d);
    }

    return out;
}

inline std::string format_line(const CriterionResult& r) {
    std::string detail = r.detail;
    while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
    return std::string(r.passed ? "[PASS]" : "[FAIL]") + " C" + std::to_string(r.id) + " " + r.name + ": " + detail;
}

} // namespace twqkd::acceptance
