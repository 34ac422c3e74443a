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

// Self-contained SVG line plot for mutual-information curves.

#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "twqkd/infotheory.hpp"

namespace twqkd::svg {

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace detail

inline void write_curve(std::ostream& os, const MutualInfoCurve& c) {
    using detail::fmt;
    constexpr double W = 640, H = 420, L = 60, R = 20, T = 30, B = 50;
    const double pw = W - L - R, ph = H - T - B;
    const double x_max = c.d_grid.empty() ? 0.5 : c.d_grid.back();
    auto X = [&](double d) { return L + pw * (x_max > 0 ? d / x_max : 0.0); };
    auto Y = [&](double v) { return T + ph * (1.0 - v); };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\">" << to_string(c.label) << "</text>\n";

    // axes and ticks
    os << "<path d=\"M" << L << ' ' << T << " V" << T + ph << " H" << L + pw
       << "\" stroke=\"black\" fill=\"none\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double d = x_max * i / 5.0;
        os << "<line x1=\"" << fmt(X(d)) << "\" y1=\"" << T + ph << "\" x2=\"" << fmt(X(d)) << "\" y2=\""
           << T + ph + 5 << "\" stroke=\"black\"/>"
           << "<text x=\"" << fmt(X(d)) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">" << fmt(d)
           << "</text>\n";
        const double v = i / 5.0;
        os << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(Y(v)) << "\" x2=\"" << L << "\" y2=\"" << fmt(Y(v))
           << "\" stroke=\"black\"/>"
           << "<text x=\"" << L - 8 << "\" y=\"" << fmt(Y(v) + 4) << "\" text-anchor=\"end\">" << fmt(v)
           << "</text>\n";
    }
    const char* x_label = c.label == CurveLabel::Fig2a ? "D_MM" : "D_CM";
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label
       << "</text>\n";

    auto polyline = [&](const std::vector<double>& ys, const char* colour) {
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < c.d_grid.size(); ++i) {
            if (i) os << ' ';
            os << fmt(X(c.d_grid[i])) << ',' << fmt(Y(ys[i]));
        }
        os << "\"/>\n";
    };
    polyline(c.i_ab, "#1f77b4");
    polyline(c.i_ae, "#d62728");
    if (c.i_ae_cap) {
        os << "<line x1=\"" << L << "\" y1=\"" << fmt(Y(*c.i_ae_cap)) << "\" x2=\"" << L + pw << "\" y2=\""
           << fmt(Y(*c.i_ae_cap)) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
    }

    os << "<text x=\"" << L + pw - 70 << "\" y=\"" << T + 16 << "\" fill=\"#1f77b4\">I_AB</text>\n"
       << "<text x=\"" << L + pw - 70 << "\" y=\"" << T + 32 << "\" fill=\"#d62728\">I_AE</text>\n"
       << "</g>\n</svg>\n";
}

} // namespace twqkd::svg
