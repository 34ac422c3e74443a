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

// Eavesdropper strategies, expressed as hooks on the two channel legs.
//
// Topology per round (Eve sits next to the sender of the first leg):
//   one-way:  Alice -> [Eve fwd] -> channel -> Bob
//   two-way:  Bob -> [Eve fwd] -> channel -> Alice -> channel -> [Eve bwd] -> Bob
// Eve's presence is drawn per round with probability `presence`.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "twqkd/protocol_kind.hpp"
#include "twqkd/qstate.hpp"
#include "twqkd/rng.hpp"

namespace twqkd {

using Bits = std::vector<Bit>;

/// Raised when a hook is called out of protocol order.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class AttackKind : std::uint8_t {
    None,
    InterceptResend,
    MitmPingPong,
    MitmLM05,
    MitmMcasX,
    AncillaUBE,
};

enum class BasisPolicy : std::uint8_t { FixedZ, FixedX, Random };

struct AttackSpec {
    AttackKind kind = AttackKind::None;
    double presence = 0.0;
    BasisPolicy policy = BasisPolicy::Random; // InterceptResend only
    double f0 = 1.0;                          // AncillaUBE only; f0 == f1
    double f_plus = 1.0;                      // AncillaUBE only; f+ == f-

    void validate() const {
        if (!(presence >= 0.0 && presence <= 1.0)) {
            throw std::invalid_argument("AttackSpec: presence must lie in [0, 1]");
        }
        if (kind == AttackKind::AncillaUBE) {
            if (!(f0 >= 0.5 && f0 <= 1.0) || !(f_plus >= 0.5 && f_plus <= 1.0)) {
                throw std::invalid_argument("AttackSpec: fidelities must lie in [1/2, 1]");
            }
        }
    }

    /// Whether this attack can run against `protocol`.
    bool supports(ProtocolKind protocol) const noexcept {
        switch (kind) {
        case AttackKind::None: return true;
        case AttackKind::MitmPingPong: return protocol == ProtocolKind::PingPong;
        case AttackKind::MitmLM05: return protocol == ProtocolKind::LM05;
        case AttackKind::MitmMcasX: return !is_two_way(protocol);
        case AttackKind::InterceptResend:
        case AttackKind::AncillaUBE: return protocol != ProtocolKind::PingPong;
        }
        return false;
    }
};

constexpr std::string_view to_string(AttackKind k) noexcept {
    switch (k) {
    case AttackKind::None: return "none";
    case AttackKind::InterceptResend: return "intercept-resend";
    case AttackKind::MitmPingPong: return "mitm-pp";
    case AttackKind::MitmLM05: return "mitm-lm05";
    case AttackKind::MitmMcasX: return "mitm-mcas-x";
    case AttackKind::AncillaUBE: return "ancilla";
    }
    return "?";
}

inline std::optional<AttackKind> parse_attack(std::string_view s) {
    for (auto k : {AttackKind::None, AttackKind::InterceptResend, AttackKind::MitmPingPong,
                   AttackKind::MitmLM05, AttackKind::MitmMcasX, AttackKind::AncillaUBE}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

constexpr std::string_view to_string(BasisPolicy p) noexcept {
    switch (p) {
    case BasisPolicy::FixedZ: return "z";
    case BasisPolicy::FixedX: return "x";
    case BasisPolicy::Random: return "random";
    }
    return "?";
}

inline std::optional<BasisPolicy> parse_basis_policy(std::string_view s) {
    if (s == "z" || s == "Z") return BasisPolicy::FixedZ;
    if (s == "x" || s == "X") return BasisPolicy::FixedX;
    if (s == "random") return BasisPolicy::Random;
    return std::nullopt;
}

/// The MITM variant matching a protocol, or None for BB84.
inline AttackKind mitm_for(ProtocolKind protocol) noexcept {
    switch (protocol) {
    case ProtocolKind::PingPong: return AttackKind::MitmPingPong;
    case ProtocolKind::LM05: return AttackKind::MitmLM05;
    case ProtocolKind::McasBB84: return AttackKind::MitmMcasX;
    case ProtocolKind::BB84: return AttackKind::None;
    }
    return AttackKind::None;
}

// --- ancilla interaction ----------------------------------------------------

/// Carrier-ancilla coupling parametrized by the Z fidelity f0 (= f1) and the
/// X fidelity f+ (= f-), with a four-dimensional probe initially in |E>.
///
///   U|0>|E> = |0>|a0> + |1>|b0>,   U|1>|E> = |0>|b1> + |1>|a1>
///
/// with |a_i|^2 = f0 and |b_i|^2 = 1 - f0. The a-vectors span ancilla levels
/// {0, 1} and the b-vectors levels {2, 3}, so Eve's "kept" and "flipped"
/// branches are perfectly distinguishable; within each pair the overlap is
/// 2 f+ - 1, which fixes the X-basis fidelity.
class AncillaInteraction {
public:
    static constexpr std::size_t kAncillaDim = 4;
    using Joint = std::array<Complex, 2 * kAncillaDim>; // index = carrier * 4 + ancilla

    AncillaInteraction(double f0, double f_plus) : f0_(f0), f_plus_(f_plus) {
        if (!(f0 >= 0.5 && f0 <= 1.0) || !(f_plus >= 0.5 && f_plus <= 1.0)) {
            throw std::invalid_argument("AncillaInteraction: fidelities must lie in [1/2, 1]");
        }
        const double c = 2.0 * f_plus - 1.0;
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double ka = std::sqrt(f0);
        const double kb = std::sqrt(1.0 - f0);
        // |0>|E>
        col0_.fill(0.0);
        col0_[0 * kAncillaDim + 0] = ka;     // |0>|a0>, a0 = ka e0
        col0_[1 * kAncillaDim + 2] = kb;     // |1>|b0>, b0 = kb e2
        // |1>|E>
        col1_.fill(0.0);
        col1_[0 * kAncillaDim + 2] = kb * c; // |0>|b1>, b1 = kb (c e2 + s e3)
        col1_[0 * kAncillaDim + 3] = kb * s;
        col1_[1 * kAncillaDim + 0] = ka * c; // |1>|a1>, a1 = ka (c e0 + s e1)
        col1_[1 * kAncillaDim + 1] = ka * s;

        if (unitarity_defect() > 1e-12) {
            throw std::invalid_argument("AncillaInteraction: coefficients violate unitarity");
        }
        if (std::abs(fidelity(CanonState::Zero) - f0) > 1e-12 ||
            std::abs(fidelity(CanonState::Plus) - f_plus) > 1e-12) {
            throw std::invalid_argument("AncillaInteraction: fidelities not realized");
        }
    }

    double f0() const noexcept { return f0_; }
    double f_plus() const noexcept { return f_plus_; }

    Joint couple(const PureState& s) const {
        Joint out{};
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = s.amp0() * col0_[i] + s.amp1() * col1_[i];
        }
        return out;
    }

    /// Max deviation of the isometry columns from orthonormality.
    double unitarity_defect() const {
        Complex n00 = 0.0, n11 = 0.0, n01 = 0.0;
        for (std::size_t i = 0; i < col0_.size(); ++i) {
            n00 += std::conj(col0_[i]) * col0_[i];
            n11 += std::conj(col1_[i]) * col1_[i];
            n01 += std::conj(col0_[i]) * col1_[i];
        }
        return std::max({std::abs(n00 - 1.0), std::abs(n11 - 1.0), std::abs(n01)});
    }

    /// Probability that the carrier survives unflipped in its own basis.
    double fidelity(CanonState s) const {
        const Joint j = couple(prepare(s));
        double p = 0.0;
        for (std::size_t k = 0; k < kAncillaDim; ++k) {
            const Complex a0 = j[k];
            const Complex a1 = j[kAncillaDim + k];
            const Complex along = basis_of(s) == Basis::Z
                                      ? (bit_of(s) ? a1 : a0)
                                      : (bit_of(s) ? (a0 - a1) * kInvSqrt2 : (a0 + a1) * kInvSqrt2);
            p += std::norm(along);
        }
        return p;
    }

    struct Outcome {
        PureState carrier;
        std::size_t ancilla_level;
    };

    /// Couples `s` to a fresh probe and reads the probe in its level basis.
    /// The forwarded carrier is the conditional state, so its statistics are
    /// the reduced state's regardless of when Eve reads her probe.
    Outcome apply(const PureState& s, Rng& rng) const {
        const Joint j = couple(s);
        std::array<double, kAncillaDim> p{};
        for (std::size_t k = 0; k < kAncillaDim; ++k) {
            p[k] = std::norm(j[k]) + std::norm(j[kAncillaDim + k]);
        }
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t level = kAncillaDim - 1;
        for (std::size_t k = 0; k < kAncillaDim; ++k) {
            acc += p[k];
            if (u < acc) {
                level = k;
                break;
            }
        }
        while (p[level] == 0.0 && level > 0) --level;
        const double n = std::sqrt(p[level]);
        return {PureState(j[level] / n, j[kAncillaDim + level] / n), level};
    }

private:
    double f0_;
    double f_plus_;
    Joint col0_{};
    Joint col1_{};
};

/// xi = c_{++}^2 - c_1^2 with c_{++}^2 = f+ and c_1^2 = 1 - f0.
inline double xi_from_fidelities(double f0, double f_plus) {
    if (!(f0 >= 0.5 && f0 <= 1.0) || !(f_plus >= 0.5 && f_plus <= 1.0)) {
        throw std::invalid_argument("xi_from_fidelities: fidelities must lie in [1/2, 1]");
    }
    return f_plus - (1.0 - f0);
}

// --- Eve --------------------------------------------------------------------

using DecoyRecord = std::variant<CanonState, BellLabel>;

struct EveState {
    bool engaged = false;
    std::optional<Carrier> delayed_carrier;
    std::optional<DecoyRecord> decoy_record;
    /// Intercept-resend bookkeeping: basis used and bit re-emitted.
    std::optional<Basis> resend_basis;
    std::optional<Bit> resent_bit;
    std::optional<std::size_t> ancilla_level;
    /// Eve's guess of this round's key bit, if she has one.
    std::optional<Bit> pending_bit;
    /// Raw key: one entry per engaged message-mode round with a guess.
    Bits copied_bits;
};

/// Draws engagement for a new round and clears per-round state.
inline void begin_round(const AttackSpec& a, EveState& st, Rng& rng) {
    st.delayed_carrier.reset();
    st.decoy_record.reset();
    st.resend_basis.reset();
    st.resent_bit.reset();
    st.ancilla_level.reset();
    st.pending_bit.reset();
    st.engaged = a.kind != AttackKind::None && rng.bernoulli(a.presence);
}

/// Eve learns the round was control mode (or lost) and drops what she held.
inline void abandon_round(EveState& st) {
    st.delayed_carrier.reset();
    st.pending_bit.reset();
}

/// Called once the round is known to be a message-mode round.
inline void commit_message_round(EveState& st) {
    if (st.engaged && st.pending_bit) st.copied_bits.push_back(*st.pending_bit);
}

namespace detail {

inline const Photon& expect_photon(const Carrier& c, const char* who) {
    if (const auto* p = std::get_if<Photon>(&c)) return *p;
    throw std::invalid_argument(std::string(who) + ": attack requires a single-photon carrier");
}

inline const PairHalf& expect_pair(const Carrier& c, const char* who) {
    if (const auto* p = std::get_if<PairHalf>(&c)) return *p;
    throw std::invalid_argument(std::string(who) + ": attack requires a ping-pong pair carrier");
}

inline Basis policy_basis(BasisPolicy p, Rng& rng) {
    switch (p) {
    case BasisPolicy::FixedZ: return Basis::Z;
    case BasisPolicy::FixedX: return Basis::X;
    case BasisPolicy::Random: return rng.bit() ? Basis::X : Basis::Z;
    }
    return Basis::Z;
}

} // namespace detail

/// First-leg hook: Bob->Alice for two-way, Alice->Bob for one-way.
inline Carrier intervene_forward(const AttackSpec& a, EveState& st, const Carrier& carrier, Rng& rng) {
    if (!st.engaged) return carrier;
    switch (a.kind) {
    case AttackKind::None: return carrier;

    case AttackKind::MitmLM05: {
        detail::expect_photon(carrier, "MitmLM05");
        st.delayed_carrier = carrier;
        const auto decoy = kAllCanonStates[rng.below(4)];
        st.decoy_record = decoy;
        return make_photon(decoy);
    }

    case AttackKind::MitmPingPong: {
        detail::expect_pair(carrier, "MitmPingPong");
        st.delayed_carrier = carrier;
        st.decoy_record = BellLabel::PsiMinus;
        return PairHalf{BellLabel::PsiMinus, PairSource::Eve};
    }

    case AttackKind::InterceptResend:
    case AttackKind::MitmMcasX: {
        const Photon& p = detail::expect_photon(carrier, to_string(a.kind).data());
        // The mcasBB84 MITM reads the message basis (Z) and leaves it untouched.
        const Basis b = a.kind == AttackKind::MitmMcasX ? Basis::Z : detail::policy_basis(a.policy, rng);
        const auto m = measure(p.state, b, rng);
        st.resend_basis = b;
        st.resent_bit = m.bit;
        st.pending_bit = m.bit;
        return Photon{m.post, b};
    }

    case AttackKind::AncillaUBE: {
        const Photon& p = detail::expect_photon(carrier, "AncillaUBE");
        const AncillaInteraction u(a.f0, a.f_plus);
        const auto out = u.apply(p.state, rng);
        st.ancilla_level = out.ancilla_level;
        return Photon{out.carrier, p.frame};
    }
    }
    return carrier;
}

/// Second-leg hook for two-way protocols: Alice->Bob.
inline Carrier intervene_backward(const AttackSpec& a, EveState& st, const Carrier& carrier, Rng& rng) {
    if (!st.engaged) return carrier;
    switch (a.kind) {
    case AttackKind::MitmLM05: {
        if (!st.delayed_carrier || !st.decoy_record) {
            throw ContractViolation("intervene_backward: no delayed carrier held");
        }
        const Photon& back = detail::expect_photon(carrier, "MitmLM05");
        const auto decoy = std::get<CanonState>(*st.decoy_record);
        const auto m = measure(back.state, basis_of(decoy), rng);
        const Encoding inferred = m.bit == bit_of(decoy) ? Encoding::Identity : Encoding::IY;
        st.pending_bit = bit_of(inferred);
        Photon genuine = std::get<Photon>(*st.delayed_carrier);
        st.delayed_carrier.reset();
        genuine.state = apply_encoding(genuine.state, inferred);
        return genuine;
    }

    case AttackKind::MitmPingPong: {
        if (!st.delayed_carrier || !st.decoy_record) {
            throw ContractViolation("intervene_backward: no delayed carrier held");
        }
        const PairHalf& back = detail::expect_pair(carrier, "MitmPingPong");
        const auto sent = std::get<BellLabel>(*st.decoy_record);
        const Encoding inferred = bell_measure(back.label) == sent ? Encoding::Identity : Encoding::IY;
        st.pending_bit = bit_of(inferred);
        PairHalf genuine = std::get<PairHalf>(*st.delayed_carrier);
        st.delayed_carrier.reset();
        genuine.label = pp_encode(genuine.label, inferred);
        return genuine;
    }

    case AttackKind::InterceptResend: {
        // Double intercept-resend: read the returned photon in the same basis,
        // infer a flip relative to what was sent, and forward the eigenstate.
        if (!st.resend_basis || !st.resent_bit) {
            throw ContractViolation("intervene_backward: intercept-resend forward leg not run");
        }
        const Photon& back = detail::expect_photon(carrier, "InterceptResend");
        const auto m = measure(back.state, *st.resend_basis, rng);
        st.pending_bit = static_cast<Bit>(m.bit ^ *st.resent_bit);
        return Photon{m.post, *st.resend_basis};
    }

    case AttackKind::None:
    case AttackKind::MitmMcasX:
    case AttackKind::AncillaUBE: return carrier;
    }
    return carrier;
}

// --- scoring ----------------------------------------------------------------

/// Eve's view of the final key: a guess per bit where she has one.
struct EveKey {
    Bits bits;
    Bits known; // 1 where `bits` holds a guess
};

struct EveAccuracy {
    std::size_t key_length = 0;
    std::size_t covered = 0;
    std::size_t correct = 0;
    /// Fraction of key bits Eve holds a guess for. Absent for an empty key.
    std::optional<double> coverage;
    /// Fraction of covered bits guessed right. Absent when nothing is covered.
    std::optional<double> accuracy;
};

inline EveAccuracy eve_accuracy(std::span<const Bit> alice_key, const EveKey& eve) {
    if (eve.bits.size() != alice_key.size() || eve.known.size() != alice_key.size()) {
        throw std::invalid_argument("eve_accuracy: key length mismatch");
    }
    EveAccuracy r;
    r.key_length = alice_key.size();
    for (std::size_t i = 0; i < alice_key.size(); ++i) {
        if (!eve.known[i]) continue;
        ++r.covered;
        if (eve.bits[i] == alice_key[i]) ++r.correct;
    }
    if (r.key_length > 0) r.coverage = static_cast<double>(r.covered) / r.key_length;
    if (r.covered > 0) r.accuracy = static_cast<double>(r.correct) / r.covered;
    return r;
}

} // namespace twqkd
