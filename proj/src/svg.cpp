#include "polymax/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace polymax {

namespace {

const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    const double left = 70, right = 20 + 150, top = 40, bottom = 50;
    const double pw = spec.width - left - right, ph = spec.height - top - bottom;
    auto yv = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!spec.log_y || y > 0); };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (usable(s.x[i], s.y[i])) {
                x0 = std::min(x0, s.x[i]);
                x1 = std::max(x1, s.x[i]);
                y0 = std::min(y0, yv(s.y[i]));
                y1 = std::max(y1, yv(s.y[i]));
            }
    if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << coord(left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
       << "</text>\n";
    os << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\"" << coord(pw) << "\" height=\"" << coord(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = x0 + (x1 - x0) * k / 4.0, yk = y0 + (y1 - y0) * k / 4.0;
        os << "<text x=\"" << coord(px(xv)) << "\" y=\"" << coord(top + ph + 16) << "\" text-anchor=\"middle\">" << number(xv)
           << "</text>\n";
        os << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(py(yk) + 4) << "\" text-anchor=\"end\">"
           << number(spec.log_y ? std::pow(10.0, yk) : yk) << "</text>\n";
    }
    os << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(spec.height - 12) << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(16," << coord(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(spec.y_label) << (spec.log_y ? " (log)" : "") << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* colour = kColours[s % (sizeof kColours / sizeof kColours[0])];
        std::string points;
        for (std::size_t i = 0; i < std::min(series[s].x.size(), series[s].y.size()); ++i)
            if (usable(series[s].x[i], series[s].y[i])) {
                points += coord(px(series[s].x[i])) + "," + coord(py(yv(series[s].y[i]))) + " ";
                if (series[s].markers)
                    os << "<circle cx=\"" << coord(px(series[s].x[i])) << "\" cy=\"" << coord(py(yv(series[s].y[i])))
                       << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
            }
        if (!points.empty())
            os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
        double ly = top + 14 + 18.0 * static_cast<double>(s);
        os << "<line x1=\"" << coord(left + pw + 10) << "\" y1=\"" << coord(ly) << "\" x2=\"" << coord(left + pw + 30)
           << "\" y2=\"" << coord(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << coord(left + pw + 36) << "\" y=\"" << coord(ly + 4) << "\">" << escape(series[s].label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace polymax
