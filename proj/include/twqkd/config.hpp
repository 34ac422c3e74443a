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

// Scenario description and its `key = value` config file format.
//
//   # comment
//   [scenario]
//   name = sweep
//   seed = 42
//   [session]
//   protocol = lm05
//   [attack]
//   kind = mitm
//   [sweep]
//   p_grid = 0:1:5
//
// Every key is optional except `name` and `seed`.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twqkd/adversary.hpp"
#include "twqkd/channel.hpp"
#include "twqkd/infotheory.hpp"
#include "twqkd/protocol.hpp"

namespace twqkd::harness {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

enum class ScenarioName { Fig2a, Fig2b, Fig2c, Table1, Sweep, Session };

constexpr std::string_view to_string(ScenarioName n) noexcept {
    switch (n) {
    case ScenarioName::Fig2a: return "fig2a";
    case ScenarioName::Fig2b: return "fig2b";
    case ScenarioName::Fig2c: return "fig2c";
    case ScenarioName::Table1: return "table1";
    case ScenarioName::Sweep: return "sweep";
    case ScenarioName::Session: return "session";
    }
    return "?";
}

inline std::optional<ScenarioName> parse_scenario_name(std::string_view s) {
    for (auto n : {ScenarioName::Fig2a, ScenarioName::Fig2b, ScenarioName::Fig2c, ScenarioName::Table1,
                   ScenarioName::Sweep, ScenarioName::Session}) {
        if (s == to_string(n)) return n;
    }
    return std::nullopt;
}

/// Evenly spaced presence values a, ..., b (n points; n == 1 gives {a}).
struct PGrid {
    double first = 0.0;
    double last = 1.0;
    std::size_t points = 5;

    std::vector<double> values() const {
        std::vector<double> v;
        for (std::size_t i = 0; i < points; ++i) {
            if (points == 1) v.push_back(first);
            else if (i + 1 == points) v.push_back(last);
            else v.push_back(first + (last - first) * static_cast<double>(i) / (points - 1));
        }
        return v;
    }
};

inline PGrid parse_p_grid(std::string_view s) {
    const auto c1 = s.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : s.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw std::invalid_argument("p-grid must look like a:b:n");
    PGrid g;
    auto num = [](std::string_view v, double& out) {
        const std::string tmp(v);
        std::size_t used = 0;
        out = std::stod(tmp, &used);
        if (used != tmp.size()) throw std::invalid_argument("bad number");
    };
    num(s.substr(0, c1), g.first);
    num(s.substr(c1 + 1, c2 - c1 - 1), g.last);
    const auto n = s.substr(c2 + 1);
    auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), g.points);
    if (ec != std::errc{} || ptr != n.data() + n.size() || g.points == 0) {
        throw std::invalid_argument("p-grid point count must be a positive integer");
    }
    for (double p : {g.first, g.last}) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-grid values must lie in [0, 1]");
    }
    return g;
}

struct Scenario {
    ScenarioName name = ScenarioName::Session;
    SessionConfig session;
    LinkBudget link;
    PGrid p_grid;
    std::size_t curve_points = kDefaultCurvePoints;
    /// Output directory from the file; the CLI may override it.
    std::optional<std::string> out_dir;
    /// Whether an attack kind / presence was named explicitly.
    bool attack_set = false;
    bool presence_set = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double to_double(std::string_view v, std::size_t line, std::string_view key) {
    const std::string tmp(v);
    try {
        std::size_t used = 0;
        const double d = std::stod(tmp, &used);
        if (used == tmp.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError(line, "'" + std::string(key) + "' expects a number, got '" + tmp + "'");
}

inline std::uint64_t to_u64(std::string_view v, std::size_t line, std::string_view key) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(line, "'" + std::string(key) + "' expects a non-negative integer, got '" +
                                    std::string(v) + "'");
    }
    return out;
}

inline bool to_bool(std::string_view v, std::size_t line, std::string_view key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(line, "'" + std::string(key) + "' expects true or false");
}

inline void check_range(bool ok, std::size_t line, std::string_view key, std::string_view range) {
    if (!ok) throw ConfigError(line, "'" + std::string(key) + "' out of range, expected " + std::string(range));
}

} // namespace detail

/// Parses a config from text. Unknown sections or keys, malformed values and
/// out-of-range values are reported with their line number.
inline Scenario parse_config_text(std::string_view text) {
    using detail::check_range;
    Scenario sc;
    std::optional<ScenarioName> name;
    std::optional<std::uint64_t> seed;
    std::string attack_name;
    std::size_t attack_line = 0;
    std::string section = "scenario";

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto hash = raw.find_first_of("#;");
        const auto line = detail::trim(raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            static const char* kSections[] = {"scenario", "session", "channel", "attack", "sweep", "curves"};
            bool known = false;
            for (auto s : kSections) known = known || section == s;
            if (!known) throw ConfigError(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "missing key");
        const auto n = line_no;
        auto unknown = [&] { throw ConfigError(n, "unknown key '" + std::string(key) + "' in [" + section + "]"); };

        auto& cfg = sc.session;
        if (section == "scenario") {
            if (key == "name") {
                name = parse_scenario_name(value);
                if (!name) throw ConfigError(n, "unknown scenario '" + std::string(value) + "'");
            } else if (key == "seed") {
                seed = detail::to_u64(value, n, key);
            } else if (key == "out") {
                sc.out_dir = std::string(value);
            } else {
                unknown();
            }
        } else if (section == "session") {
            if (key == "protocol") {
                auto p = parse_protocol(value);
                if (!p) throw ConfigError(n, "unknown protocol '" + std::string(value) + "'");
                cfg.protocol = *p;
            } else if (key == "n_rounds") {
                cfg.n_rounds = detail::to_u64(value, n, key);
                check_range(cfg.n_rounds > 0, n, key, "a positive integer");
            } else if (key == "cm_fraction") {
                cfg.cm_fraction = detail::to_double(value, n, key);
                check_range(cfg.cm_fraction >= 0.0 && cfg.cm_fraction < 1.0, n, key, "[0, 1)");
            } else if (key == "d_pd_cm") {
                cfg.d_pd_cm = detail::to_double(value, n, key);
                check_range(cfg.d_pd_cm > 0.0 && cfg.d_pd_cm < 0.5, n, key, "(0, 0.5)");
            } else if (key == "two_way_threshold") {
                cfg.two_way_threshold = detail::to_bool(value, n, key);
            } else if (key == "disclose_fraction") {
                cfg.disclose_fraction = detail::to_double(value, n, key);
                check_range(cfg.disclose_fraction >= 0.0 && cfg.disclose_fraction < 1.0, n, key, "[0, 1)");
            } else {
                unknown();
            }
        } else if (section == "channel") {
            if (key == "transmittance") {
                cfg.channel.transmittance_per_leg = detail::to_double(value, n, key);
                const double t = cfg.channel.transmittance_per_leg;
                check_range(t > 0.0 && t <= 1.0, n, key, "(0, 1]");
            } else if (key == "flip_prob") {
                cfg.channel.flip_prob = detail::to_double(value, n, key);
                check_range(cfg.channel.flip_prob >= 0.0 && cfg.channel.flip_prob <= 0.5, n, key, "[0, 0.5]");
            } else if (key == "legs") {
                const auto legs = detail::to_u64(value, n, key);
                check_range(legs >= 1 && legs <= 1000, n, key, "[1, 1000]");
                cfg.channel.legs = static_cast<int>(legs);
            } else if (key == "alpha_db_per_km") {
                sc.link.alpha_db_per_km = detail::to_double(value, n, key);
                check_range(sc.link.alpha_db_per_km >= 0.0, n, key, ">= 0");
            } else if (key == "distance_km") {
                sc.link.distance_km = detail::to_double(value, n, key);
                check_range(sc.link.distance_km >= 0.0, n, key, ">= 0");
            } else {
                unknown();
            }
        } else if (section == "attack") {
            if (key == "kind") {
                attack_name = std::string(value);
                attack_line = n;
            } else if (key == "presence") {
                cfg.attack.presence = detail::to_double(value, n, key);
                check_range(cfg.attack.presence >= 0.0 && cfg.attack.presence <= 1.0, n, key, "[0, 1]");
                sc.presence_set = true;
            } else if (key == "basis") {
                auto b = parse_basis_policy(value);
                if (!b) throw ConfigError(n, "basis must be z, x or random");
                cfg.attack.policy = *b;
            } else if (key == "f0") {
                cfg.attack.f0 = detail::to_double(value, n, key);
                check_range(cfg.attack.f0 >= 0.5 && cfg.attack.f0 <= 1.0, n, key, "[0.5, 1]");
            } else if (key == "f_plus") {
                cfg.attack.f_plus = detail::to_double(value, n, key);
                check_range(cfg.attack.f_plus >= 0.5 && cfg.attack.f_plus <= 1.0, n, key, "[0.5, 1]");
            } else {
                unknown();
            }
        } else if (section == "sweep") {
            if (key == "p_grid") {
                try {
                    sc.p_grid = parse_p_grid(value);
                } catch (const std::exception& e) {
                    throw ConfigError(n, std::string("p_grid: ") + e.what());
                }
            } else {
                unknown();
            }
        } else if (section == "curves") {
            if (key == "points") {
                sc.curve_points = detail::to_u64(value, n, key);
                check_range(sc.curve_points >= 2 && sc.curve_points <= 1000000, n, key, "[2, 1000000]");
            } else {
                unknown();
            }
        }
    }

    if (!name) throw ConfigError(0, "missing required key 'name' in [scenario]");
    if (!seed) throw ConfigError(0, "missing required key 'seed' in [scenario]");
    sc.name = *name;
    sc.session.seed = *seed;

    if (!attack_name.empty()) {
        if (attack_name == "mitm") {
            sc.session.attack.kind = mitm_for(sc.session.protocol);
            if (sc.session.attack.kind == AttackKind::None) {
                throw ConfigError(attack_line, "no man-in-the-middle attack defined for bb84");
            }
        } else {
            auto k = parse_attack(attack_name);
            if (!k) throw ConfigError(attack_line, "unknown attack '" + attack_name + "'");
            sc.session.attack.kind = *k;
        }
        sc.attack_set = true;
        if (!sc.session.attack.supports(sc.session.protocol)) {
            throw ConfigError(attack_line, "attack '" + attack_name + "' cannot run against " +
                                               std::string(to_string(sc.session.protocol)));
        }
    }
    return sc;
}

inline Scenario parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace twqkd::harness
