#include "pathdet/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pathdet {

nlohmann::json defaults_json()
{
    using D = Defaults;
    return {
        {"structural_tolerance", D::structural_tolerance},
        {"operator_tolerance", D::operator_tolerance},
        {"expansion_tolerance", D::expansion_tolerance},
        {"gue", {{"tolerance", D::gue_tolerance}, {"domain", D::gue_domain}, {"panel", D::gue_panel},
                 {"nodes", D::gue_nodes}}},
        {"airy2", {{"tolerance", D::airy_tolerance}, {"left", D::airy_left}, {"right", D::airy_right},
                   {"panel", D::airy_panel}, {"nodes", D::airy_nodes},
                   {"stationarity_tolerance", D::stationarity_tolerance}}},
        {"tracy_widom", {{"nodes", D::tracy_widom_nodes}, {"right", D::tracy_widom_right}}},
        {"continuum", {{"steps", D::continuum_steps}, {"left", D::continuum_left}, {"right", D::continuum_right}}},
        {"monte_carlo", {{"samples", D::mc_samples}, {"sigmas", D::mc_sigmas}}},
        {"seed", D::seed},
        {"random_instances", D::random_instances},
    };
}

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what)
{
}

nlohmann::json RunReport::to_json() const
{
    nlohmann::json prov = {{"version", PATHDET_VERSION},
                           {"grid", grid},
                           {"tolerances", tolerances},
                           {"wall_clock_seconds", wall_clock_seconds}};
    prov["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    return {{"command", command}, {"pass", pass}, {"inputs", inputs}, {"results", results}, {"provenance", prov}};
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(path, "cannot open for writing");
    f << text;
    f.flush();
    if (!f) throw IoError(path, "write failed");
}

void Table::add_row(const std::vector<double>& values)
{
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_number(v));
    rows.push_back(std::move(row));
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void csv_line(std::string& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += "\r\n";
}

std::string xml_escape(const std::string& s)
{
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

} // namespace

std::string to_csv(const Table& table)
{
    if (table.header.empty()) throw std::invalid_argument("to_csv: empty header");
    std::string out;
    csv_line(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw std::invalid_argument("to_csv: ragged row");
        csv_line(out, row);
    }
    return out;
}

void emit_csv(const Table& table, const std::filesystem::path& path)
{
    write_text(path, to_csv(table));
}

std::string to_svg(const std::vector<Series>& series, const PlotOptions& opts)
{
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double W = opts.width, H = opts.height;
    auto ty = [&](double y) { return opts.log_y ? std::log10(y) : y; };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("to_svg: x and y differ in length");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (opts.log_y && !(s.y[i] > 0)) throw std::invalid_argument("to_svg: log scale needs positive values");
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (ty(y) - y0) / (y1 - y0) * (H - mt - mb); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
    std::ostringstream o;
    o.precision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(opts.title)
      << "</text>\n";
    o << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
      << "\" stroke=\"black\"/>\n";
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        o << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor << "\" font-size=\"11\">"
          << xml_escape(text) << "</text>\n";
    };
    label(ml, H - mb + 16, format_number(x0), "middle");
    label(W - mr, H - mb + 16, format_number(x1), "middle");
    const std::string ylo = opts.log_y ? "1e" + format_number(y0) : format_number(y0);
    const std::string yhi = opts.log_y ? "1e" + format_number(y1) : format_number(y1);
    label(ml - 6, H - mb, ylo, "end");
    label(ml - 6, mt + 4, yhi, "end");
    label((ml + W - mr) / 2, H - 12, opts.x_label, "middle");
    o << "<text x=\"16\" y=\"" << (mt + H - mb) / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + H - mb) / 2 << ")\">" << xml_escape(opts.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 5];
        o << "<polyline class=\"series\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) o << (i ? " " : "") << px(s.x[i]) << ',' << py(s.y[i]);
        o << "\"/>\n";
        if (opts.scatter)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
        if (!s.label.empty())
            o << "<text x=\"" << W - mr - 4 << "\" y=\"" << mt + 14 * (k + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
              << c << "\">" << xml_escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

void emit_svg(const std::vector<Series>& series, const std::filesystem::path& path, const PlotOptions& opts)
{
    write_text(path, to_svg(series, opts));
}

} // namespace pathdet
