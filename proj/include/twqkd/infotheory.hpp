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

// Binary entropy and the mutual-information quantities behind the
// disturbance curves. All logarithms are base 2.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace twqkd {

namespace detail {

inline void require_range(double x, double lo, double hi, const char* who) {
    if (!(x >= lo && x <= hi)) {
        throw std::domain_error(std::string(who) + ": argument out of range");
    }
}

} // namespace detail

/// h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
inline double binary_entropy(double x) {
    detail::require_range(x, 0.0, 1.0, "binary_entropy");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// I_AB = 1 + D log2 D + (1-D) log2 (1-D).
inline double mutual_info_ab(double d) {
    detail::require_range(d, 0.0, 0.5, "mutual_info_ab");
    return 1.0 - binary_entropy(d);
}

/// I_AE = -D log2 D - (1-D) log2 (1-D).
inline double mutual_info_ae(double d) {
    detail::require_range(d, 0.0, 0.5, "mutual_info_ae");
    return binary_entropy(d);
}

/// Disturbance at which I_AB = I_AE, i.e. h(D) = 1/2, by bisection on
/// [0.05, 0.2]. Stops when the bracket is narrower than `tol` and
/// |h(D) - 1/2| < tol.
inline double critical_disturbance(double tol = 1e-9) {
    if (!(tol > 0.0)) throw std::domain_error("critical_disturbance: tol must be positive");
    auto gap = [](double d) { return mutual_info_ab(d) - mutual_info_ae(d); };
    double lo = 0.05, hi = 0.2; // gap(lo) > 0 > gap(hi)
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double g = gap(mid);
        if (g == 0.0) break;
        if (g > 0.0) lo = mid;
        else hi = mid;
        if (hi - lo < tol && std::abs(binary_entropy(mid) - 0.5) < tol) break;
    }
    return mid;
}

/// r_PA = 1 - h(xi).
inline double key_rate_rpa(double xi) {
    detail::require_range(xi, 0.0, 1.0, "key_rate_rpa");
    return 1.0 - binary_entropy(xi);
}

/// Eve's copied-key fraction under a MITM attack observed at control-mode
/// disturbance d_cm: presence p = 2 d_cm and Eve holds exactly the engaged
/// rounds, so the curve is linear and reaches 1 at d_cm = 1/2.
inline double eve_info_mitm(double d_cm) {
    detail::require_range(d_cm, 0.0, 0.5, "eve_info_mitm");
    return std::min(1.0, 2.0 * d_cm);
}

enum class CurveLabel { Fig2a, Fig2b, Fig2c };

constexpr std::string_view to_string(CurveLabel l) noexcept {
    switch (l) {
    case CurveLabel::Fig2a: return "fig2a";
    case CurveLabel::Fig2b: return "fig2b";
    case CurveLabel::Fig2c: return "fig2c";
    }
    return "?";
}

inline std::optional<CurveLabel> parse_curve_label(std::string_view s) {
    for (auto l : {CurveLabel::Fig2a, CurveLabel::Fig2b, CurveLabel::Fig2c}) {
        if (s == to_string(l)) return l;
    }
    return std::nullopt;
}

struct MutualInfoCurve {
    CurveLabel label;
    std::vector<double> d_grid;
    std::vector<double> i_ab;
    std::vector<double> i_ae;
    /// fig2c only: I_AEc = I_AE(D_pd-CM), the ceiling of Eve's information.
    std::optional<double> i_ae_cap;
};

inline constexpr std::size_t kDefaultCurvePoints = 201;
inline constexpr double kDefaultThresholdCM = 0.05;

/// fig2a: BB84 (I_AB(D), I_AE(D)) over D in [0, 1/2].
/// fig2b: two-way MITM, I_AB = 1 and I_AE = eve_info_mitm(D_CM) over [0, 1/2].
/// fig2c: mcasBB84 MITM, as fig2b but the grid stops at d_pd_cm.
inline MutualInfoCurve build_curve(CurveLabel label, std::size_t n_points = kDefaultCurvePoints,
                                   double d_pd_cm = kDefaultThresholdCM) {
    if (n_points < 2) throw std::invalid_argument("build_curve: need at least two points");
    MutualInfoCurve c{label, {}, {}, {}, std::nullopt};
    double d_max = 0.5;
    if (label == CurveLabel::Fig2c) {
        if (!(d_pd_cm > 0.0 && d_pd_cm < 0.5)) {
            throw std::invalid_argument("build_curve: d_pd_cm must lie in (0, 1/2)");
        }
        d_max = d_pd_cm;
        c.i_ae_cap = eve_info_mitm(d_pd_cm);
    }
    c.d_grid.reserve(n_points);
    c.i_ab.reserve(n_points);
    c.i_ae.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        // Endpoint pinned so the last grid value is exactly d_max.
        const double d = i + 1 == n_points ? d_max : d_max * static_cast<double>(i) / (n_points - 1);
        c.d_grid.push_back(d);
        if (label == CurveLabel::Fig2a) {
            c.i_ab.push_back(mutual_info_ab(d));
            c.i_ae.push_back(mutual_info_ae(d));
        } else {
            c.i_ab.push_back(1.0);
            c.i_ae.push_back(eve_info_mitm(d));
        }
    }
    return c;
}

/// Index of the first grid point where I_AE >= I_AB, if any.
inline std::optional<std::size_t> first_crossing(const MutualInfoCurve& c) {
    for (std::size_t i = 0; i < c.d_grid.size(); ++i) {
        if (c.i_ae[i] >= c.i_ab[i]) return i;
    }
    return std::nullopt;
}

} // namespace twqkd
