#ifndef PATHDET_REPORT_HPP
#define PATHDET_REPORT_HPP

#include "pathdet/airy.hpp"
#include "pathdet/hermite.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathdet {

// Every default used by the command line and the acceptance run.
struct Defaults {
    static constexpr double structural_tolerance = 1e-12;
    static constexpr double operator_tolerance = 1e-10;
    static constexpr double expansion_tolerance = 1e-12;

    static constexpr double gue_tolerance = 1e-8;
    static constexpr double gue_domain = GueGridOptions{}.domain;
    static constexpr double gue_panel = GueGridOptions{}.panel;
    static constexpr std::size_t gue_nodes = GueGridOptions{}.nodes;

    static constexpr double airy_tolerance = 1e-6;
    static constexpr double airy_left = AiryGridOptions{}.left;
    static constexpr double airy_right = AiryGridOptions{}.right;
    static constexpr double airy_panel = AiryGridOptions{}.panel;
    static constexpr std::size_t airy_nodes = AiryGridOptions{}.nodes;
    static constexpr double stationarity_tolerance = 1e-8;

    static constexpr std::size_t tracy_widom_nodes = TracyWidomOptions{}.nodes;
    static constexpr double tracy_widom_right = TracyWidomOptions{}.right;

    static constexpr std::size_t continuum_steps = 128;
    static constexpr double continuum_left = 0;
    static constexpr double continuum_right = 1;

    static constexpr std::size_t mc_samples = 10000;
    static constexpr std::uint64_t seed = 1;
    static constexpr double mc_sigmas = 3;

    static constexpr std::size_t random_instances = 20;
};

nlohmann::json defaults_json();

struct IoError : std::runtime_error {
    IoError(const std::filesystem::path& path, const std::string& what);
};

struct RunReport {
    std::string command;
    nlohmann::json inputs = nlohmann::json::object();
    nlohmann::json results = nlohmann::json::object();
    bool pass = true;
    std::optional<std::uint64_t> seed;
    nlohmann::json grid = nlohmann::json::object();
    nlohmann::json tolerances = nlohmann::json::object();
    double wall_clock_seconds = 0;

    // {command, pass, inputs, results, provenance: {version, seed, grid, tolerances, wall_clock_seconds}}
    nlohmann::json to_json() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
};

// Shortest text that reads back to the same double.
std::string format_number(double v);

// RFC 4180: CRLF line ends, fields with commas, quotes or line breaks quoted.
std::string to_csv(const Table& table);
void emit_csv(const Table& table, const std::filesystem::path& path);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    bool scatter = false;
    int width = 640;
    int height = 400;
};

// Standalone SVG with one polyline (and markers when scatter is set) per series.
std::string to_svg(const std::vector<Series>& series, const PlotOptions& opts = {});
void emit_svg(const std::vector<Series>& series, const std::filesystem::path& path, const PlotOptions& opts = {});

} // namespace pathdet

#endif
