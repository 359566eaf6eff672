#include "chl/render.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "chl/event_io.hpp"

namespace chl {

namespace {

std::vector<Complex> segment(const Event& e, double lambda, std::size_t samples) {
  std::vector<Complex> pts(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double u = static_cast<double>(j) / static_cast<double>(samples - 1);
    pts[j] = Complex(e.x, u * lambda);
  }
  pts.back() = Complex(e.x, lambda);
  return pts;
}

Complex to_fundamental(const CylinderParams& p, const Complex& z) {
  return {reduce_to_fundamental(p, z.real()), z.imag()};
}

bool crosses_seam(const CylinderParams& p, const Complex& a, const Complex& b) {
  return std::abs(b.real() - a.real()) > p.half_width();
}

void mark_wraps(const CylinderParams& p, ParticleTrace& trace) {
  trace.wraps = false;
  for (std::size_t j = 1; j < trace.points.size(); ++j)
    if (crosses_seam(p, trace.points[j - 1], trace.points[j])) trace.wraps = true;
}

void check_samples(std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("trace: need at least two samples per slit");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::vector<ParticleTrace> trace_cluster(const EventLog& log, std::size_t samples_per_slit) {
  check_samples(samples_per_slit);
  const CylinderParams& p = log.params();
  std::vector<ParticleTrace> traces;
  traces.reserve(log.size());
  const auto events = log.events();
  for (std::size_t k = 0; k < events.size(); ++k) {
    const Event& e = events[k];
    for (ParticleTrace& t : traces)
      for (Complex& pt : t.points) pt = to_fundamental(p, cyl_slit(p, e.x, pt));
    traces.push_back({k, e.time, segment(e, p.lambda, samples_per_slit), false});
  }
  for (ParticleTrace& t : traces) mark_wraps(p, t);
  return traces;
}

std::vector<ParticleTrace> trace_cluster_forward(const EventLog& log, std::size_t samples_per_slit) {
  check_samples(samples_per_slit);
  const CylinderParams& p = log.params();
  const auto events = log.events();
  std::vector<ParticleTrace> traces;
  traces.reserve(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    ParticleTrace t{k, events[k].time, segment(events[k], p.lambda, samples_per_slit), false};
    for (Complex& pt : t.points) {
      for (std::size_t j = k; j-- > 0;) pt = cyl_slit(p, events[j].x, pt);
      pt = to_fundamental(p, pt);
    }
    mark_wraps(p, t);
    traces.push_back(std::move(t));
  }
  return traces;
}

void export_svg(std::ostream& out, const std::vector<ParticleTrace>& traces,
                const CylinderParams& params, const SvgStyle& style) {
  if (traces.empty()) throw std::invalid_argument("export_svg: no traces");
  double top = 0.0;
  for (const auto& t : traces)
    for (const auto& pt : t.points) top = std::max(top, pt.imag());
  const double height = (top > 0 ? top : params.lambda) * 1.1;
  const double left = -params.half_width();
  const double span = params.period();
  const double height_px = style.width_px * height / span;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(style.width_px)
      << "\" height=\"" << num(height_px) << "\" viewBox=\"" << num(left) << " 0 " << num(span)
      << " " << num(height) << "\">\n";
  out << "<rect x=\"" << num(left) << "\" y=\"0\" width=\"" << num(span) << "\" height=\""
      << num(height) << "\" fill=\"" << style.background << "\"/>\n";
  out << "<g fill=\"none\" stroke=\"" << style.stroke << "\" stroke-width=\""
      << num(style.stroke_width) << "\" stroke-linejoin=\"round\">\n";
  for (const auto& t : traces) {
    std::size_t start = 0;
    for (std::size_t j = 1; j <= t.points.size(); ++j) {
      if (j < t.points.size() && !crosses_seam(params, t.points[j - 1], t.points[j])) continue;
      if (j - start >= 2) {
        out << "<polyline points=\"";
        for (std::size_t m = start; m < j; ++m)
          out << (m > start ? " " : "") << num(t.points[m].real()) << ","
              << num(height - t.points[m].imag());
        out << "\"/>\n";
      }
      start = j;
    }
  }
  out << "</g>\n</svg>\n";
}

void export_csv(std::ostream& out, const std::vector<ParticleTrace>& traces) {
  out << "event_index,birth_time,point_index,re,im\n";
  for (const auto& t : traces)
    for (std::size_t j = 0; j < t.points.size(); ++j)
      out << t.event_index << "," << format_double(t.birth_time) << "," << j << ","
          << format_double(t.points[j].real()) << "," << format_double(t.points[j].imag()) << "\n";
}

std::vector<ParticleTrace> read_csv(std::istream& in, const CylinderParams& params) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace csv: missing header");
  std::vector<ParticleTrace> traces;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell[5];
    for (auto& c : cell)
      if (!std::getline(row, c, ',')) throw std::runtime_error("trace csv: short row");
    const std::size_t index = std::stoull(cell[0]);
    if (traces.empty() || traces.back().event_index != index)
      traces.push_back({index, std::strtod(cell[1].c_str(), nullptr), {}, false});
    traces.back().points.emplace_back(std::strtod(cell[3].c_str(), nullptr),
                                      std::strtod(cell[4].c_str(), nullptr));
  }
  for (auto& t : traces) mark_wraps(params, t);
  return traces;
}

}  // namespace chl
