#pragma once

#include <string>

#include "qmee/bench/report.hpp"

namespace qmee::bench {

/// Log-log wall-time-versus-size plot, one polyline per criterion with the
/// fitted slope in the legend.
void write_timing_svg(const std::string& path, const TimingReport& report);

/// Contour plot (marching squares over quantile levels) of one criterion's
/// cost surface, with the grid optimizer and the target weights marked.
void write_surface_svg(const std::string& path, const SurfaceGrid& grid,
                       const std::string& criterion);

}  // namespace qmee::bench
