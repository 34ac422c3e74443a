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

// Per-leg loss and bit-flip noise, and fiber link accounting.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "twqkd/protocol_kind.hpp"
#include "twqkd/qstate.hpp"
#include "twqkd/rng.hpp"

namespace twqkd {

struct ChannelSpec {
    double transmittance_per_leg = 1.0;
    double flip_prob = 0.0;
    /// Fiber segments per leg; loss and flip are drawn once per segment.
    int legs = 1;

    void validate() const {
        if (!(transmittance_per_leg >= 0.0 && transmittance_per_leg <= 1.0)) {
            throw std::invalid_argument("ChannelSpec: transmittance must lie in [0, 1]");
        }
        if (!(flip_prob >= 0.0 && flip_prob <= 0.5)) {
            throw std::invalid_argument("ChannelSpec: flip_prob must lie in [0, 0.5]");
        }
        if (legs < 1) throw std::invalid_argument("ChannelSpec: legs must be positive");
    }

    bool noiseless() const noexcept { return transmittance_per_leg == 1.0 && flip_prob == 0.0; }
};

struct LinkBudget {
    double alpha_db_per_km = 0.2;
    double distance_km = 50.0;

    void validate() const {
        if (!(alpha_db_per_km >= 0.0)) throw std::invalid_argument("LinkBudget: alpha must be >= 0");
        if (!(distance_km >= 0.0)) throw std::invalid_argument("LinkBudget: distance must be >= 0");
    }
};

inline double leg_transmittance(const LinkBudget& lb) {
    lb.validate();
    return std::pow(10.0, -lb.alpha_db_per_km * lb.distance_km / 10.0);
}

/// One leg for one-way protocols, t^2 for LM05, t^4 for ping-pong.
inline double path_transmittance(double t_leg, ProtocolKind protocol) {
    if (!(t_leg > 0.0 && t_leg <= 1.0)) {
        throw std::invalid_argument("path_transmittance: t_leg must lie in (0, 1]");
    }
    const int n = link_multiple(protocol);
    double t = t_leg;
    for (int i = 1; i < n; ++i) t *= t_leg;
    return t;
}

inline double photon_distance(double distance_km, ProtocolKind protocol) {
    return distance_km * link_multiple(protocol);
}

namespace detail {

// One segment: returns false if lost, sets `flipped` otherwise.
inline bool traverse_segment(const ChannelSpec& cs, Rng& rng, bool& flipped) {
    if (!rng.bernoulli(cs.transmittance_per_leg)) return false;
    flipped = rng.bernoulli(cs.flip_prob);
    return true;
}

} // namespace detail

inline std::optional<PureState> transmit(const PureState& s, Basis prep_basis,
                                         const ChannelSpec& cs, Rng& rng) {
    PureState out = s;
    for (int i = 0; i < cs.legs; ++i) {
        bool flipped = false;
        if (!detail::traverse_segment(cs, rng, flipped)) return std::nullopt;
        if (flipped) out = flip_in_basis(out, prep_basis);
    }
    return out;
}

inline std::optional<Photon> transmit(const Photon& p, const ChannelSpec& cs, Rng& rng) {
    auto s = transmit(p.state, p.frame, cs, rng);
    if (!s) return std::nullopt;
    return Photon{*s, p.frame};
}

inline std::optional<BellLabel> transmit_bell(BellLabel b, const ChannelSpec& cs, Rng& rng) {
    for (int i = 0; i < cs.legs; ++i) {
        bool flipped = false;
        if (!detail::traverse_segment(cs, rng, flipped)) return std::nullopt;
        if (flipped) b = toggle(b);
    }
    return b;
}

inline std::optional<PairHalf> transmit(const PairHalf& h, const ChannelSpec& cs, Rng& rng) {
    auto b = transmit_bell(h.label, cs, rng);
    if (!b) return std::nullopt;
    return PairHalf{*b, h.source};
}

inline std::optional<Carrier> transmit(const Carrier& c, const ChannelSpec& cs, Rng& rng) {
    return std::visit(
        [&](const auto& x) -> std::optional<Carrier> {
            auto r = transmit(x, cs, rng);
            if (!r) return std::nullopt;
            return Carrier{*r};
        },
        c);
}

} // namespace twqkd
