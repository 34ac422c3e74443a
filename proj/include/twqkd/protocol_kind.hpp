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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twqkd {

enum class ProtocolKind : std::uint8_t { BB84, McasBB84, PingPong, LM05 };

inline constexpr std::array<ProtocolKind, 4> kAllProtocols{
    ProtocolKind::BB84, ProtocolKind::PingPong, ProtocolKind::LM05, ProtocolKind::McasBB84};

constexpr bool is_two_way(ProtocolKind k) noexcept {
    return k == ProtocolKind::PingPong || k == ProtocolKind::LM05;
}

/// Number of one-way link lengths (L) covered per round: photon distance
/// in the transmittance table is this multiple of L.
inline int link_multiple(ProtocolKind k) {
    switch (k) {
    case ProtocolKind::BB84:
    case ProtocolKind::McasBB84: return 1;
    case ProtocolKind::LM05: return 2;
    case ProtocolKind::PingPong: return 4;
    }
    throw std::invalid_argument("unknown protocol kind");
}

constexpr std::string_view to_string(ProtocolKind k) noexcept {
    switch (k) {
    case ProtocolKind::BB84: return "bb84";
    case ProtocolKind::McasBB84: return "mcasbb84";
    case ProtocolKind::PingPong: return "pp";
    case ProtocolKind::LM05: return "lm05";
    }
    return "?";
}

inline std::optional<ProtocolKind> parse_protocol(std::string_view s) {
    for (auto k : kAllProtocols) {
        if (s == to_string(k)) return k;
    }
    if (s == "pingpong" || s == "ping-pong") return ProtocolKind::PingPong;
    return std::nullopt;
}

} // namespace twqkd
