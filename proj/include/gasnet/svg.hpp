#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gasnet/error.hpp"
#include "gasnet/io.hpp"

namespace gasnet::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Panel {
    std::string title;
    std::string x_label = "time (s)";
    std::string y_label;
    std::vector<Series> series;
};

namespace detail {

inline const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

inline std::string fmt(double v) {
    std::ostringstream os;
    double a = std::abs(v);
    if (v != 0.0 && (a >= 1.0e5 || a < 1.0e-3)) {
        os.setf(std::ios::scientific);
        os.precision(2);
    } else {
        os.precision(5);
    }
    os << v;
    return os.str();
}

struct Range {
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    void absorb(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (lo > hi) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

inline void render_panel(std::ostringstream& os, const Panel& p, double ox, double oy, double w,
                         double h) {
    const double ml = 74, mr = 12, mt = 26, mb = 40;
    double pw = w - ml - mr, ph = h - mt - mb;
    Range rx, ry;
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            rx.absorb(s.x[i]);
            ry.absorb(s.y[i]);
        }
    rx.pad();
    ry.pad();
    auto X = [&](double v) { return ox + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return oy + mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    os << "<rect x='" << ox + ml << "' y='" << oy + mt << "' width='" << pw << "' height='" << ph
       << "' fill='white' stroke='#444'/>\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
        double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        os << "<line x1='" << X(fx) << "' y1='" << oy + mt << "' x2='" << X(fx) << "' y2='"
           << oy + mt + ph << "' stroke='#ddd'/>\n";
        os << "<line x1='" << ox + ml << "' y1='" << Y(fy) << "' x2='" << ox + ml + pw << "' y2='"
           << Y(fy) << "' stroke='#ddd'/>\n";
        os << "<text x='" << X(fx) << "' y='" << oy + mt + ph + 16
           << "' font-size='10' text-anchor='middle'>" << fmt(fx) << "</text>\n";
        os << "<text x='" << ox + ml - 6 << "' y='" << Y(fy) + 3
           << "' font-size='10' text-anchor='end'>" << fmt(fy) << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : p.series) {
        os << "<polyline fill='none' stroke='" << kPalette[ci % 6] << "' stroke-width='1.3' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            os << X(s.x[i]) << "," << Y(s.y[i]) << " ";
        os << "'/>\n";
        if (p.series.size() > 1)
            os << "<text x='" << ox + ml + 8 << "' y='" << oy + mt + 14 + 13 * ci
               << "' font-size='11' fill='" << kPalette[ci % 6] << "'>" << s.label << "</text>\n";
        ++ci;
    }
    os << "<text x='" << ox + w / 2 << "' y='" << oy + 14
       << "' font-size='12' font-weight='bold' text-anchor='middle'>" << p.title << "</text>\n";
    os << "<text x='" << ox + w / 2 << "' y='" << oy + h - 6
       << "' font-size='11' text-anchor='middle'>" << p.x_label << "</text>\n";
    os << "<text transform='translate(" << ox + 14 << "," << oy + mt + ph / 2
       << ") rotate(-90)' font-size='11' text-anchor='middle'>" << p.y_label << "</text>\n";
}

}  // namespace detail

/// Standalone multi-panel line chart, laid out `per_row` panels wide.
inline void write_chart(const std::string& path, const std::vector<Panel>& panels,
                        int per_row = 3, double panel_w = 380, double panel_h = 260) {
    if (panels.empty()) throw Error(ErrorKind::Argument, "chart needs at least one panel");
    int rows = (static_cast<int>(panels.size()) + per_row - 1) / per_row;
    int cols = std::min<int>(per_row, static_cast<int>(panels.size()));
    double W = cols * panel_w, H = rows * panel_h;
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
       << "' viewBox='0 0 " << W << " " << H << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        double ox = static_cast<double>(i % per_row) * panel_w;
        double oy = static_cast<double>(i / per_row) * panel_h;
        detail::render_panel(os, panels[i], ox, oy, panel_w, panel_h);
    }
    os << "</svg>\n";
    io::spit(path, os.str());
}

/// Pick columns out of a CSV table as chart series.
inline Series table_series(const Table& t, const std::string& x_col, const std::string& y_col,
                           const std::string& label = "") {
    auto find = [&t](const std::string& name) -> std::size_t {
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            if (t.columns[c] == name) return c;
        throw Error(ErrorKind::Argument, "no column '" + name + "' in table " + t.name);
    };
    std::size_t xi = find(x_col), yi = find(y_col);
    Series s;
    s.label = label.empty() ? y_col : label;
    for (const auto& row : t.rows) {
        s.x.push_back(row[xi]);
        s.y.push_back(row[yi]);
    }
    return s;
}

}  // namespace gasnet::svg
