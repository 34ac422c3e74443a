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

// Round-by-round simulation of BB84, mcasBB84, ping-pong and LM05 sessions,
// followed by sifting, disturbance estimation and the abort rule.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "twqkd/adversary.hpp"
#include "twqkd/channel.hpp"
#include "twqkd/csv.hpp"
#include "twqkd/protocol_kind.hpp"
#include "twqkd/qstate.hpp"
#include "twqkd/rng.hpp"

namespace twqkd {

/// BB84 abort point: above this D_MM Eve can know more than Bob.
inline constexpr double kCriticalDisturbanceBB84 = 0.11;
inline constexpr double kDefaultCMFraction = 0.2;
inline constexpr double kDefaultDiscloseFraction = 0.1;

enum class RoundMode : std::uint8_t { MessageMode, ControlMode };

constexpr std::string_view to_string(RoundMode m) noexcept {
    return m == RoundMode::MessageMode ? "MM" : "CM";
}

struct SessionConfig {
    ProtocolKind protocol = ProtocolKind::LM05;
    std::uint64_t n_rounds = 20000;
    /// Probability that a round is a control-mode round. Ignored by BB84.
    double cm_fraction = kDefaultCMFraction;
    ChannelSpec channel;
    AttackSpec attack;
    std::uint64_t seed = 0;
    /// Control-mode abort threshold. Always applied by mcasBB84; applied by
    /// ping-pong and LM05 only when `two_way_threshold` is set.
    double d_pd_cm = 0.05;
    bool two_way_threshold = false;
    /// Fraction of message-mode key rounds disclosed to estimate D_MM.
    double disclose_fraction = kDefaultDiscloseFraction;

    void validate() const {
        if (n_rounds == 0) throw std::invalid_argument("SessionConfig: n_rounds must be positive");
        if (!(cm_fraction >= 0.0 && cm_fraction < 1.0)) {
            throw std::invalid_argument("SessionConfig: cm_fraction must lie in [0, 1)");
        }
        if (!(d_pd_cm > 0.0 && d_pd_cm < 0.5)) {
            throw std::invalid_argument("SessionConfig: d_pd_cm must lie in (0, 0.5)");
        }
        if (!(disclose_fraction >= 0.0 && disclose_fraction < 1.0)) {
            throw std::invalid_argument("SessionConfig: disclose_fraction must lie in [0, 1)");
        }
        channel.validate();
        attack.validate();
        if (!attack.supports(protocol)) {
            throw std::invalid_argument(std::string("SessionConfig: attack ") +
                                        std::string(to_string(attack.kind)) + " cannot run against " +
                                        std::string(to_string(protocol)));
        }
    }
};

/// Alice's public control-mode announcement.
struct Announcement {
    Basis basis;
    Bit outcome;
};

/// Receiver's measurement basis in one-way protocols.
struct Detection {
    Basis basis;
};

using Preparation = std::variant<CanonState, BellLabel>;
using Action = std::variant<Encoding, Announcement, Detection>;

struct RoundRecord {
    std::uint64_t index = 0;
    RoundMode mode = RoundMode::MessageMode;
    /// Bob's state (two-way) or Alice's state (one-way).
    Preparation prep = CanonState::Zero;
    Action action = Encoding::Identity;
    /// Two-way MM: Bob's decoded bit. Two-way CM: Bob's raw outcome.
    /// One-way: Bob's outcome in his detection basis. Absent when lost.
    std::optional<Bit> result;
    bool lost = false;
    /// Set when the round was part of the D_MM disclosure sample.
    bool disclosed = false;
    // Ground truth for test oracles; never read by the Alice/Bob logic.
    bool eve_touched = false;
    std::optional<Bit> eve_bit;
};

struct DisturbanceEstimate {
    std::optional<double> d_mm;
    std::optional<double> d_cm;
    std::size_t n_mm = 0;
    std::size_t n_cm = 0;
    std::size_t mm_errors = 0;
    std::size_t cm_failures = 0;
    double half_width_mm = 0.0;
    double half_width_cm = 0.0;
};

/// 95% normal-approximation half-width of a binomial proportion.
inline double binomial_half_width_95(double p, std::size_t n) {
    if (n == 0) return 0.0;
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

struct SiftResult {
    Bits alice_key;
    Bits bob_key;
    EveKey eve_key;
    /// Index into the round list for each key bit.
    std::vector<std::size_t> key_rounds;
};

struct AbortDecision {
    bool abort = false;
    std::string reason;
};

struct Transcript {
    SessionConfig config;
    std::vector<RoundRecord> rounds;
    Bits alice_key;
    Bits bob_key;
    EveKey eve_key;
    std::vector<std::size_t> key_rounds;
    /// Eve's raw copied stream over all engaged message-mode rounds.
    Bits eve_copied;
    DisturbanceEstimate disturbance;
    bool aborted = false;
    std::string abort_reason;
};

// --- round classification ----------------------------------------------------

/// The bit Alice meant Bob to receive on a message-mode round.
inline Bit intended_bit(const RoundRecord& r) {
    if (const auto* e = std::get_if<Encoding>(&r.action)) return bit_of(*e);
    if (const auto* s = std::get_if<CanonState>(&r.prep)) return bit_of(*s);
    throw std::logic_error("intended_bit: round carries no message");
}

/// Message-mode round that survives sifting (before disclosure).
inline bool is_sifted(ProtocolKind protocol, const RoundRecord& r) {
    if (r.mode != RoundMode::MessageMode || r.lost || !r.result) return false;
    switch (protocol) {
    case ProtocolKind::PingPong:
    case ProtocolKind::LM05: return true;
    case ProtocolKind::BB84: {
        const auto& d = std::get<Detection>(r.action);
        return d.basis == basis_of(std::get<CanonState>(r.prep));
    }
    case ProtocolKind::McasBB84: {
        const auto& d = std::get<Detection>(r.action);
        return d.basis == Basis::Z && basis_of(std::get<CanonState>(r.prep)) == Basis::Z;
    }
    }
    return false;
}

/// Control round usable for the consistency check.
inline bool is_valid_control(ProtocolKind protocol, const RoundRecord& r) {
    if (r.mode != RoundMode::ControlMode || r.lost || !r.result) return false;
    switch (protocol) {
    case ProtocolKind::BB84: return false;
    case ProtocolKind::McasBB84: return std::get<Detection>(r.action).basis == Basis::X;
    case ProtocolKind::LM05:
        return std::get<Announcement>(r.action).basis == basis_of(std::get<CanonState>(r.prep));
    case ProtocolKind::PingPong: return true;
    }
    return false;
}

/// Consistency check failure on a valid control round.
///   LM05: announced outcome differs from Bob's prepared state.
///   pp:   Alice's and Bob's Z outcomes are not anticorrelated.
///   mcasBB84: Bob's X outcome differs from Alice's X state.
inline bool control_failed(ProtocolKind protocol, const RoundRecord& r) {
    switch (protocol) {
    case ProtocolKind::LM05:
        return std::get<Announcement>(r.action).outcome != bit_of(std::get<CanonState>(r.prep));
    case ProtocolKind::PingPong: return std::get<Announcement>(r.action).outcome == *r.result;
    case ProtocolKind::McasBB84: return *r.result != bit_of(std::get<CanonState>(r.prep));
    case ProtocolKind::BB84: return false;
    }
    return false;
}

// --- post-session steps -------------------------------------------------------

/// Keys from sifted, undisclosed message-mode rounds.
inline SiftResult sift(ProtocolKind protocol, const std::vector<RoundRecord>& rounds) {
    SiftResult s;
    for (std::size_t i = 0; i < rounds.size(); ++i) {
        const auto& r = rounds[i];
        if (!is_sifted(protocol, r) || r.disclosed) continue;
        s.alice_key.push_back(intended_bit(r));
        s.bob_key.push_back(*r.result);
        s.eve_key.bits.push_back(r.eve_bit.value_or(0));
        s.eve_key.known.push_back(r.eve_bit ? 1 : 0);
        s.key_rounds.push_back(i);
    }
    return s;
}

inline DisturbanceEstimate estimate_disturbance(ProtocolKind protocol, const std::vector<RoundRecord>& rounds) {
    DisturbanceEstimate d;
    for (const auto& r : rounds) {
        if (is_sifted(protocol, r) && r.disclosed) {
            ++d.n_mm;
            if (*r.result != intended_bit(r)) ++d.mm_errors;
        } else if (is_valid_control(protocol, r)) {
            ++d.n_cm;
            if (control_failed(protocol, r)) ++d.cm_failures;
        }
    }
    if (d.n_mm > 0) {
        d.d_mm = static_cast<double>(d.mm_errors) / d.n_mm;
        d.half_width_mm = binomial_half_width_95(*d.d_mm, d.n_mm);
    }
    if (d.n_cm > 0) {
        d.d_cm = static_cast<double>(d.cm_failures) / d.n_cm;
        d.half_width_cm = binomial_half_width_95(*d.d_cm, d.n_cm);
    }
    return d;
}

inline AbortDecision abort_decision(const DisturbanceEstimate& d, const SessionConfig& cfg) {
    if (cfg.protocol == ProtocolKind::BB84) {
        if (!d.d_mm) return {true, "no-error-sample"};
        if (*d.d_mm > kCriticalDisturbanceBB84) return {true, "disturbance-above-critical"};
        return {};
    }
    const bool threshold_on = cfg.protocol == ProtocolKind::McasBB84 || cfg.two_way_threshold;
    if (!threshold_on) return {};
    if (!d.d_cm) return {true, "no-control-sample"};
    if (*d.d_cm > cfg.d_pd_cm) return {true, "control-disturbance-above-threshold"};
    return {};
}

// --- the session loop ---------------------------------------------------------

namespace detail {

// Independent streams so that the parties' choices do not shift when the
// attack or channel configuration changes.
struct SessionStreams {
    Rng party;   // Alice and Bob choices
    Rng channel; // loss and flips
    Rng eve;     // engagement, decoys, Eve's measurements
    Rng nature;  // Born-rule sampling for Alice and Bob

    explicit SessionStreams(std::uint64_t seed)
        : party(derive_seed(seed, 0)), channel(derive_seed(seed, 1)), eve(derive_seed(seed, 2)),
          nature(derive_seed(seed, 3)) {}
};

// Per-round party choices, drawn in a fixed order whatever the protocol.
struct RoundChoices {
    bool control;
    std::uint64_t state_index;
    Bit alice_bit;  // encoding in MM, measurement basis in CM
    Bit bob_basis;  // one-way detection basis
    bool disclose;
};

inline RoundChoices draw_choices(const SessionConfig& cfg, Rng& party) {
    RoundChoices c{};
    c.control = party.bernoulli(cfg.cm_fraction);
    c.state_index = party.below(4);
    c.alice_bit = party.bit();
    c.bob_basis = party.bit();
    c.disclose = party.bernoulli(cfg.disclose_fraction);
    return c;
}

inline void run_lm05_round(const SessionConfig& cfg, const RoundChoices& ch, SessionStreams& rs, EveState& eve,
                           RoundRecord& rec) {
    const CanonState s = kAllCanonStates[ch.state_index];
    rec.prep = s;
    const Encoding enc = encoding_for(ch.alice_bit);
    const Basis alice_basis = ch.alice_bit ? Basis::X : Basis::Z;
    rec.action = rec.mode == RoundMode::MessageMode ? Action{enc} : Action{Announcement{alice_basis, 0}};

    const Carrier out = intervene_forward(cfg.attack, eve, make_photon(s), rs.eve);
    const auto at_alice = transmit(out, cfg.channel, rs.channel);
    if (!at_alice) {
        rec.lost = true;
        return;
    }
    const Photon& p = std::get<Photon>(*at_alice);
    Photon back;
    if (rec.mode == RoundMode::MessageMode) {
        back = Photon{apply_encoding(p.state, enc), p.frame};
    } else {
        const auto m = measure(p.state, alice_basis, rs.nature);
        rec.action = Announcement{alice_basis, m.bit};
        back = Photon{m.post, alice_basis};
    }
    const auto returned = transmit(Carrier{back}, cfg.channel, rs.channel);
    if (!returned) {
        rec.lost = true;
        return;
    }
    const Photon at_bob = std::get<Photon>(intervene_backward(cfg.attack, eve, *returned, rs.eve));
    const auto m = measure(at_bob.state, basis_of(s), rs.nature);
    rec.result = rec.mode == RoundMode::MessageMode ? static_cast<Bit>(m.bit ^ bit_of(s)) : m.bit;
}

inline void run_pp_round(const SessionConfig& cfg, const RoundChoices& ch, SessionStreams& rs, EveState& eve,
                         RoundRecord& rec) {
    rec.prep = BellLabel::PsiMinus;
    const Encoding enc = encoding_for(ch.alice_bit);
    rec.action = rec.mode == RoundMode::MessageMode ? Action{enc} : Action{Announcement{Basis::Z, 0}};

    const Carrier out = intervene_forward(cfg.attack, eve, PairHalf{BellLabel::PsiMinus, PairSource::Bob}, rs.eve);
    const auto at_alice = transmit(out, cfg.channel, rs.channel);
    if (!at_alice) {
        rec.lost = true;
        return;
    }
    const PairHalf& h = std::get<PairHalf>(*at_alice);
    if (rec.mode == RoundMode::ControlMode) {
        // Alice measures the travelling photon in Z; Bob measures his home
        // photon in Z. Both Psi states are HV/VH anticorrelated, but only if
        // the photon Alice holds is the partner of Bob's.
        const Bit a = rs.nature.bit();
        const Bit b = h.source == PairSource::Bob ? static_cast<Bit>(1 - a) : rs.nature.bit();
        rec.action = Announcement{Basis::Z, a};
        rec.result = b;
        return;
    }
    const auto returned = transmit(Carrier{PairHalf{pp_encode(h.label, enc), h.source}}, cfg.channel, rs.channel);
    if (!returned) {
        rec.lost = true;
        return;
    }
    const PairHalf at_bob = std::get<PairHalf>(intervene_backward(cfg.attack, eve, *returned, rs.eve));
    rec.result = bit_of(bell_measure(at_bob.label));
}

inline void run_one_way_round(const SessionConfig& cfg, const RoundChoices& ch, SessionStreams& rs, EveState& eve,
                              RoundRecord& rec) {
    CanonState s;
    if (cfg.protocol == ProtocolKind::BB84) {
        s = kAllCanonStates[ch.state_index];
    } else {
        // mcasBB84: Z states carry the message, X states are the control sample.
        s = canon_state(rec.mode == RoundMode::MessageMode ? Basis::Z : Basis::X, ch.alice_bit);
    }
    rec.prep = s;
    const Basis bob_basis = ch.bob_basis ? Basis::X : Basis::Z;
    rec.action = Detection{bob_basis};

    const Carrier out = intervene_forward(cfg.attack, eve, make_photon(s), rs.eve);
    const auto at_bob = transmit(out, cfg.channel, rs.channel);
    if (!at_bob) {
        rec.lost = true;
        return;
    }
    rec.result = measure(std::get<Photon>(*at_bob).state, bob_basis, rs.nature).bit;
}

} // namespace detail

/// Runs `cfg.n_rounds` rounds and the post-session steps. Deterministic in
/// `cfg` (including its seed).
inline Transcript run_session(const SessionConfig& cfg) {
    cfg.validate();
    Transcript t;
    t.config = cfg;
    t.rounds.reserve(cfg.n_rounds);

    detail::SessionStreams rs(cfg.seed);
    EveState eve;
    std::size_t delivered = 0;

    for (std::uint64_t i = 0; i < cfg.n_rounds; ++i) {
        const auto ch = detail::draw_choices(cfg, rs.party);
        RoundRecord rec;
        rec.index = i;
        const bool has_control = cfg.protocol != ProtocolKind::BB84;
        rec.mode = has_control && ch.control ? RoundMode::ControlMode : RoundMode::MessageMode;
        rec.disclosed = rec.mode == RoundMode::MessageMode && ch.disclose;

        begin_round(cfg.attack, eve, rs.eve);
        switch (cfg.protocol) {
        case ProtocolKind::LM05: detail::run_lm05_round(cfg, ch, rs, eve, rec); break;
        case ProtocolKind::PingPong: detail::run_pp_round(cfg, ch, rs, eve, rec); break;
        case ProtocolKind::BB84:
        case ProtocolKind::McasBB84: detail::run_one_way_round(cfg, ch, rs, eve, rec); break;
        }

        rec.eve_touched = eve.engaged;
        if (!rec.lost) ++delivered;
        if (!rec.lost && rec.mode == RoundMode::MessageMode) {
            rec.eve_bit = eve.engaged ? eve.pending_bit : std::nullopt;
            commit_message_round(eve);
        } else {
            abandon_round(eve);
        }
        t.rounds.push_back(rec);
    }

    auto s = sift(cfg.protocol, t.rounds);
    t.alice_key = std::move(s.alice_key);
    t.bob_key = std::move(s.bob_key);
    t.eve_key = std::move(s.eve_key);
    t.key_rounds = std::move(s.key_rounds);
    t.eve_copied = std::move(eve.copied_bits);
    t.disturbance = estimate_disturbance(cfg.protocol, t.rounds);

    if (delivered == 0) {
        t.alice_key.clear();
        t.bob_key.clear();
        t.eve_key = {};
        t.key_rounds.clear();
        t.aborted = true;
        t.abort_reason = "no-yield";
        return t;
    }
    const auto decision = abort_decision(t.disturbance, cfg);
    t.aborted = decision.abort;
    t.abort_reason = decision.reason;
    return t;
}

inline EveAccuracy eve_accuracy(const Transcript& t) { return eve_accuracy(t.alice_key, t.eve_key); }

// --- serialization --------------------------------------------------------

inline std::string format_prep(const Preparation& p) {
    return std::visit([](auto v) { return std::string(to_string(v)); }, p);
}

inline std::string format_action(const Action& a) {
    struct {
        std::string operator()(Encoding e) const { return std::string(to_string(e)); }
        std::string operator()(const Announcement& an) const {
            return "announce:" + std::string(to_string(an.basis)) + ":" + std::to_string(an.outcome);
        }
        std::string operator()(const Detection& d) const { return "measure:" + std::string(to_string(d.basis)); }
    } v;
    return std::visit(v, a);
}

inline const std::vector<std::string>& transcript_columns() {
    static const std::vector<std::string> cols{"index", "mode", "prep", "action", "result", "lost", "eve_touched"};
    return cols;
}

/// One line per round; `result` is empty for lost rounds.
inline void write_transcript_csv(std::ostream& os, const Transcript& t) {
    csv::write_row(os, transcript_columns());
    for (const auto& r : t.rounds) {
        csv::write_row(os, {std::to_string(r.index), std::string(to_string(r.mode)), format_prep(r.prep),
                            format_action(r.action), r.result ? std::to_string(*r.result) : std::string{},
                            r.lost ? "1" : "0", r.eve_touched ? "1" : "0"});
    }
}

} // namespace twqkd
