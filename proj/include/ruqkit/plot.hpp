#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "ruqkit/ruq.hpp"

namespace ruqkit {

/// CSV with header "series,position,mean_logprob,count", rows sorted by
/// (series label, position), means printed with six decimals. Labels are
/// quoted when they contain a comma, quote or newline. Throws DataError for
/// an empty series list.
void write_plot_csv(std::ostream& out, std::span<const PlotSeries> series);
void emit_plot_csv(std::span<const PlotSeries> series, const std::filesystem::path& path);

struct SvgSize {
  int width = 720;
  int height = 420;
};

/// Standalone SVG line chart: one polyline per series, per-point markers
/// (star: reference, circle: decoded, square/triangle/...: generics), linear
/// axes and a legend. Each marker carries data-position, data-mean and
/// data-count attributes with the CSV values.
void write_plot_svg(std::ostream& out, std::span<const PlotSeries> series, SvgSize size = {});
void emit_plot_svg(std::span<const PlotSeries> series, const std::filesystem::path& path, SvgSize size = {});

}  // namespace ruqkit
