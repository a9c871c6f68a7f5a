#pragma once

// CSV/JSON/SVG serialization with write-to-temp-then-rename and no silent overwrites.

#include <filesystem>
#include <string>
#include <vector>

#include "ddsim/experiment.hpp"
#include "ddsim/magnus.hpp"

namespace ddsim {

// %.17g, so every double round-trips.
std::string format_double(double v);

// dir/stem.ext, or dir/stem-1.ext, dir/stem-2.ext ... if taken. Creates dir.
std::filesystem::path unique_path(const std::filesystem::path& dir, const std::string& stem, const std::string& ext);

// Writes a sibling temp file and renames it onto `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Columns t_ns,spectator_state,arm,fidelity,ci_half_width.
std::string series_csv(const std::vector<FidelitySeries>& series);
std::vector<FidelitySeries> parse_series_csv(const std::string& text);

std::string cancellation_csv(const CancellationReport& report);

struct SvgStyle {
    double width = 640.0;
    double height = 400.0;
    std::string title;
};

// One polyline per series; time axis in us, fidelity clipped to [0, 1].
std::string render_svg(const std::vector<FidelitySeries>& series, const SvgStyle& style = {});

}  // namespace ddsim
