#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "chl/process.hpp"

namespace chl {

/// Sampled image of one attached slit.
struct ParticleTrace {
  std::size_t event_index = 0;
  double birth_time = 0.0;
  /// Real parts in the fundamental domain.
  std::vector<Complex> points;
  /// Set when consecutive points straddle the seam at +-pi N.
  bool wraps = false;
};

/// Cluster of the backward process at the log's horizon, built
/// incrementally: each new slit first pushes every traced point through
/// S_x, then contributes the segment x + i u lambda, u uniform in [0, 1].
std::vector<ParticleTrace> trace_cluster(const EventLog& log, std::size_t samples_per_slit = 16);

/// Direct trace of the forward cluster: particle k is the image of its
/// segment under S_{x_1} ... S_{x_{k-1}}.
std::vector<ParticleTrace> trace_cluster_forward(const EventLog& log,
                                                 std::size_t samples_per_slit = 16);

struct SvgStyle {
  double width_px = 800.0;
  double stroke_width = 0.05;  // in cylinder units
  std::string stroke = "#1f3b73";
  std::string background = "#ffffff";
};

/// SVG 1.1 document with viewBox [-pi N, pi N] x [0, 1.1 * max height],
/// y flipped to screen orientation, polylines split at seam crossings.
void export_svg(std::ostream& out, const std::vector<ParticleTrace>& traces,
                const CylinderParams& params, const SvgStyle& style = {});

/// CSV with columns event_index,birth_time,point_index,re,im.
void export_csv(std::ostream& out, const std::vector<ParticleTrace>& traces);

/// Parses the output of export_csv back into traces (wrap flags recomputed).
std::vector<ParticleTrace> read_csv(std::istream& in, const CylinderParams& params);

}  // namespace chl
