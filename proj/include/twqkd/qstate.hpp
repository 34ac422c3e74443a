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

// Two-level pure states and the four BB84/LM05 carrier states.
//
// Conventions: |H> == |0>, |V> == |1>. The Z basis is {|0>, |1>} and the X
// basis is {|+>, |->}. Zero and Plus carry bit 0, One and Minus carry bit 1.
// Ping-pong Bell pairs are tracked symbolically as Psi-/Psi+ labels.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "twqkd/rng.hpp"

namespace twqkd {

using Complex = std::complex<double>;
using Bit = std::uint8_t;

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kNormTolerance = 1e-12;

class PureState {
public:
    PureState() : amp0_(1.0), amp1_(0.0) {}

    /// Amplitudes must already be normalized to within 1e-10; they are then
    /// rescaled so the stored norm is exact to rounding.
    PureState(Complex amp0, Complex amp1) : amp0_(amp0), amp1_(amp1) {
        const double n = std::norm(amp0_) + std::norm(amp1_);
        if (!std::isfinite(n) || std::abs(n - 1.0) > 1e-10) {
            throw std::invalid_argument("PureState: amplitudes not normalized");
        }
        const double s = 1.0 / std::sqrt(n);
        amp0_ *= s;
        amp1_ *= s;
    }

    Complex amp0() const noexcept { return amp0_; }
    Complex amp1() const noexcept { return amp1_; }
    double norm() const noexcept { return std::norm(amp0_) + std::norm(amp1_); }

    friend PureState operator-(const PureState& s) {
        PureState r;
        r.amp0_ = -s.amp0_;
        r.amp1_ = -s.amp1_;
        return r;
    }

private:
    Complex amp0_;
    Complex amp1_;
};

enum class Basis : std::uint8_t { Z, X };
enum class CanonState : std::uint8_t { Zero, One, Plus, Minus };
enum class Encoding : std::uint8_t { Identity, IY };
enum class BellLabel : std::uint8_t { PsiMinus, PsiPlus };

inline constexpr std::array<CanonState, 4> kAllCanonStates{
    CanonState::Zero, CanonState::One, CanonState::Plus, CanonState::Minus};

constexpr Basis basis_of(CanonState s) noexcept {
    return (s == CanonState::Zero || s == CanonState::One) ? Basis::Z : Basis::X;
}

constexpr Bit bit_of(CanonState s) noexcept {
    return (s == CanonState::One || s == CanonState::Minus) ? 1 : 0;
}

constexpr CanonState canon_state(Basis b, Bit bit) noexcept {
    if (b == Basis::Z) return bit ? CanonState::One : CanonState::Zero;
    return bit ? CanonState::Minus : CanonState::Plus;
}

constexpr Bit bit_of(Encoding e) noexcept { return e == Encoding::IY ? 1 : 0; }
constexpr Encoding encoding_for(Bit b) noexcept { return b ? Encoding::IY : Encoding::Identity; }

constexpr Bit bit_of(BellLabel b) noexcept { return b == BellLabel::PsiPlus ? 1 : 0; }

constexpr Basis other(Basis b) noexcept { return b == Basis::Z ? Basis::X : Basis::Z; }

inline PureState prepare(CanonState s) {
    switch (s) {
    case CanonState::Zero: return PureState(1.0, 0.0);
    case CanonState::One: return PureState(0.0, 1.0);
    case CanonState::Plus: return PureState(kInvSqrt2, kInvSqrt2);
    case CanonState::Minus: return PureState(kInvSqrt2, -kInvSqrt2);
    }
    throw std::invalid_argument("prepare: unknown state");
}

/// Born probability of outcome `bit` when measuring `s` in `b`.
inline double outcome_probability(const PureState& s, Basis b, Bit bit) {
    if (b == Basis::Z) return bit ? std::norm(s.amp1()) : std::norm(s.amp0());
    const Complex along = bit ? (s.amp0() - s.amp1()) : (s.amp0() + s.amp1());
    return 0.5 * std::norm(along);
}

struct Measurement {
    Bit bit;
    PureState post;
};

/// Projective measurement. Always consumes exactly one uniform draw.
inline Measurement measure(const PureState& s, Basis b, Rng& rng) {
    const double p0 = outcome_probability(s, b, 0);
    const Bit bit = rng.uniform() < p0 ? 0 : 1;
    return {bit, prepare(canon_state(b, bit))};
}

/// I leaves the state alone; iY = ZX maps (a0, a1) to (a1, -a0).
inline PureState apply_encoding(const PureState& s, Encoding e) {
    if (e == Encoding::Identity) return s;
    return PureState(s.amp1(), -s.amp0());
}

/// HWP(0deg) on the travelling photon toggles Psi- <-> Psi+.
constexpr BellLabel pp_encode(BellLabel b, Encoding e) noexcept {
    if (e == Encoding::Identity) return b;
    return b == BellLabel::PsiMinus ? BellLabel::PsiPlus : BellLabel::PsiMinus;
}

constexpr BellLabel toggle(BellLabel b) noexcept { return pp_encode(b, Encoding::IY); }

/// Ideal beam-splitter discrimination: Psi- photons split, Psi+ photons bunch.
constexpr BellLabel bell_measure(BellLabel b) noexcept { return b; }

/// Bit flip within basis `b`: X for the Z basis, Z for the X basis.
inline PureState flip_in_basis(const PureState& s, Basis b) {
    if (b == Basis::Z) return PureState(s.amp1(), s.amp0());
    return PureState(s.amp0(), -s.amp1());
}

// --- carriers -------------------------------------------------------------

/// A single photon in flight. `frame` is the basis it was last prepared in;
/// channel flips act in that basis.
struct Photon {
    PureState state;
    Basis frame;
};

inline Photon make_photon(CanonState s) { return {prepare(s), basis_of(s)}; }

enum class PairSource : std::uint8_t { Bob, Eve };

/// The travelling half of a ping-pong pair. `label` is the joint state with
/// the home photon kept by `source`.
struct PairHalf {
    BellLabel label;
    PairSource source;
};

using Carrier = std::variant<Photon, PairHalf>;

// --- names ----------------------------------------------------------------

constexpr std::string_view to_string(Basis b) noexcept { return b == Basis::Z ? "Z" : "X"; }

constexpr std::string_view to_string(CanonState s) noexcept {
    switch (s) {
    case CanonState::Zero: return "Zero";
    case CanonState::One: return "One";
    case CanonState::Plus: return "Plus";
    case CanonState::Minus: return "Minus";
    }
    return "?";
}

constexpr std::string_view to_string(Encoding e) noexcept {
    return e == Encoding::Identity ? "I" : "iY";
}

constexpr std::string_view to_string(BellLabel b) noexcept {
    return b == BellLabel::PsiMinus ? "PsiMinus" : "PsiPlus";
}

} // namespace twqkd
