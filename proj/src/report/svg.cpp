#include "rfp/report/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rfp::report {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 11) {
    return "<text x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", y) + "\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

std::string rect(double x, double y, double w, double h, const std::string& fill) {
    return "<rect x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", y) + "\" width=\"" + fmt("%.1f", w) +
           "\" height=\"" + fmt("%.1f", h) + "\" fill=\"" + fill + "\" stroke=\"#ffffff\"/>\n";
}

// White at 0 to dark blue at 1.
std::string shade(double v) {
    v = std::clamp(v, 0.0, 1.0);
    auto ch = [&](int lo, int hi) { return int(std::lround(lo + (hi - lo) * v)); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", ch(255, 8), ch(255, 48), ch(255, 107));
    return buf;
}

std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", w) + "\" height=\"" + fmt("%.0f", h) +
           "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

std::string ft(double d) { return fmt("%g", d) + " ft"; }

}  // namespace

std::string heatmap_svg(const PrecisionGrid& g, const std::string& title) {
    const double cw = 52, ch = 26, left = 70, top = 60;
    const std::size_t nd = g.distances.size(), nm = g.devices.size();
    const double w = left + cw * double(nm + 1) + 20, h = top + ch * double(nd + 1) + 30;
    std::string s = header(w, h);
    s += text(w / 2, 24, title, "middle", 15);
    for (std::size_t m = 0; m < nm; ++m) s += text(left + cw * (double(m) + 0.5), top - 8, g.devices[m]);
    s += text(left + cw * (double(nm) + 0.5), top - 8, "avg");
    for (std::size_t d = 0; d <= nd; ++d) {
        double y = top + ch * double(d);
        s += text(left - 8, y + ch * 0.65, d < nd ? ft(g.distances[d]) : "avg", "end");
        for (std::size_t m = 0; m <= nm; ++m) {
            if (d == nd && m == nm) continue;
            double v = d < nd ? (m < nm ? g.precision[d][m] : g.row_average[d]) : g.column_average[m];
            double x = left + cw * double(m);
            s += rect(x, y, cw, ch, shade(v));
            std::string label = (d < nd && m < nm && g.empty[d][m]) ? "n/a" : fmt("%.2f", v);
            s += "<text x=\"" + fmt("%.1f", x + cw / 2) + "\" y=\"" + fmt("%.1f", y + ch * 0.65) +
                 "\" font-size=\"10\" text-anchor=\"middle\" fill=\"" + (v > 0.55 ? "#ffffff" : "#000000") + "\">" +
                 label + "</text>\n";
        }
    }
    return s + "</svg>\n";
}

std::string series_svg(const SeriesTable& t, const std::string& title, const std::string& y_label) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    const double w = 640, h = 400, left = 70, right = 150, top = 50, bottom = 50;
    const double pw = w - left - right, ph = h - top - bottom;
    std::string s = header(w, h);
    s += text(w / 2, 26, title, "middle", 15);

    double lo = 0.0, hi = 1.0;
    for (const auto& v : t.values) {
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    const std::size_t n = t.keys.size();
    auto px = [&](std::size_t k) { return left + (n > 1 ? pw * double(k) / double(n - 1) : pw / 2); };
    auto py = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

    s += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", top + ph) + "\" x2=\"" + fmt("%.1f", left + pw) +
         "\" y2=\"" + fmt("%.1f", top + ph) + "\" stroke=\"#000000\"/>\n";
    s += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", top) + "\" x2=\"" + fmt("%.1f", left) +
         "\" y2=\"" + fmt("%.1f", top + ph) + "\" stroke=\"#000000\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double v = lo + (hi - lo) * i / 5.0;
        s += text(left - 6, py(v) + 4, fmt("%.2f", v), "end", 10);
    }
    for (std::size_t k = 0; k < n; ++k) s += text(px(k), top + ph + 18, ft(t.keys[k]), "middle", 10);
    s += text(left + pw / 2, h - 10, t.key_name);
    s += "<text x=\"16\" y=\"" + fmt("%.1f", top + ph / 2) + "\" font-size=\"11\" text-anchor=\"middle\" " +
         "transform=\"rotate(-90 16 " + fmt("%.1f", top + ph / 2) + ")\">" + escape(y_label) + "</text>\n";

    for (std::size_t si = 0; si < t.values.size(); ++si) {
        std::string color = palette[si % std::size(palette)];
        std::string pts;
        for (std::size_t k = 0; k < n; ++k) pts += fmt("%.1f", px(k)) + "," + fmt("%.1f", py(t.values[si][k])) + " ";
        s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        for (std::size_t k = 0; k < n; ++k) {
            s += "<circle cx=\"" + fmt("%.1f", px(k)) + "\" cy=\"" + fmt("%.1f", py(t.values[si][k])) +
                 "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
        }
        double ly = top + 16 * double(si);
        s += rect(left + pw + 16, ly, 12, 12, color);
        s += text(left + pw + 34, ly + 10, t.series_names[si], "start");
    }
    return s + "</svg>\n";
}

}  // namespace rfp::report
