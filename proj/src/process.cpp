#include "chl/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "chl/random.hpp"

namespace chl {

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson: mean must be finite and non-negative");
  constexpr double kChunk = 500.0;
  std::uint64_t total = 0;
  while (mean > 0) {
    const double m = std::min(mean, kChunk);
    mean -= m;
    const double u = uniform();
    double p = std::exp(-m);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf) {
      ++k;
      p *= m / static_cast<double>(k);
      const double next = cdf + p;
      if (next == cdf) break;  // the remaining tail is below rounding
      cdf = next;
    }
    total += k;
  }
  return total;
}

EventLog::EventLog(CylinderParams params, double horizon, std::uint64_t seed,
                   std::vector<Event> events)
    : params_(params), horizon_(horizon), seed_(seed), events_(std::move(events)) {
  if (!(params_.radius_n > 0) || !(params_.lambda > 0))
    throw std::invalid_argument("EventLog: radius and lambda must be positive");
  if (!(horizon_ > 0)) throw std::invalid_argument("EventLog: horizon must be positive");
  const double half = params_.half_width();
  for (std::size_t k = 0; k < events_.size(); ++k) {
    const Event& e = events_[k];
    if (!(e.time > 0) || e.time > horizon_)
      throw std::invalid_argument("EventLog: event time outside (0, horizon]");
    if (!(e.x >= -half) || !(e.x < half))
      throw std::invalid_argument("EventLog: abscissa outside [-pi N, pi N)");
    if (k > 0) {
      const Event& prev = events_[k - 1];
      if (e.time < prev.time || (e.time == prev.time && e.x < prev.x))
        throw std::invalid_argument("EventLog: events not sorted by time");
    }
  }
}

std::size_t EventLog::count_until(double s) const {
  const auto it = std::upper_bound(events_.begin(), events_.end(), s,
                                   [](double t, const Event& e) { return t < e.time; });
  return static_cast<std::size_t>(it - events_.begin());
}

EventLog sample_events(const CylinderParams& params, double horizon, std::uint64_t seed) {
  if (!(horizon > 0)) throw std::invalid_argument("sample_events: horizon must be positive");
  Rng rng(seed);
  const std::uint64_t count = rng.poisson(params.period() * horizon);
  std::vector<Event> events;
  events.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const double time = horizon * rng.uniform_open_left();
    const double x = reduce_to_fundamental(params, -params.half_width() + params.period() * rng.uniform());
    events.push_back({time, x});
  }
  // Ties (time, then abscissa) keep insertion order.
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.time < b.time || (a.time == b.time && a.x < b.x);
  });
  return EventLog(params, horizon, seed, std::move(events));
}

EventLog restrict_log(const EventLog& log, double half_width) {
  const CylinderParams& src = log.params();
  if (!(half_width > 0)) throw std::invalid_argument("restrict_log: half width must be positive");
  if (half_width > src.half_width())
    throw std::invalid_argument("restrict_log: half width exceeds the source domain");
  const CylinderParams dst = make_cylinder(half_width / std::numbers::pi, src.lambda);
  std::vector<Event> kept;
  for (const Event& e : log.events())
    if (std::abs(e.x) <= half_width) kept.push_back({e.time, reduce_to_fundamental(dst, e.x)});
  // Only an event at exactly +half_width can move (to -half_width); restore order.
  std::stable_sort(kept.begin(), kept.end(), [](const Event& a, const Event& b) {
    return a.time < b.time || (a.time == b.time && a.x < b.x);
  });
  return EventLog(dst, log.horizon(), log.seed(), std::move(kept));
}

const char* to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::ForwardChl: return "forward-chl";
    case ProcessKind::BackwardChl: return "backward-chl";
    case ProcessKind::ForwardShl: return "forward-shl";
    case ProcessKind::BackwardShl: return "backward-shl";
    case ProcessKind::DiskHl: return "disk-hl";
  }
  return "unknown";
}

namespace {

bool is_shl(ProcessKind kind) {
  return kind == ProcessKind::ForwardShl || kind == ProcessKind::BackwardShl;
}

bool is_forward(ProcessKind kind) {
  return kind == ProcessKind::ForwardChl || kind == ProcessKind::ForwardShl;
}

void require_kind(const ProcessEvaluator& ev, ProcessKind kind) {
  if (ev.kind() != kind)
    throw std::invalid_argument(std::string("evaluator kind is ") + to_string(ev.kind()) +
                                ", expected " + to_string(kind));
}

}  // namespace

ProcessEvaluator::ProcessEvaluator(const EventLog& log, ProcessKind kind,
                                   std::optional<double> window)
    : log_(&log), kind_(kind), window_(window) {
  if (is_shl(kind_) != window_.has_value())
    throw std::invalid_argument("ProcessEvaluator: a window is required exactly for SHL kinds");
  if (window_ && !(*window_ > 0))
    throw std::invalid_argument("ProcessEvaluator: window must be positive");
}

bool ProcessEvaluator::contributes(const Event& e) const {
  return !window_ || std::abs(e.x) <= *window_;
}

Complex ProcessEvaluator::apply_slit(const Event& e, const Complex& z) const {
  if (is_shl(kind_)) return halfplane_slit(HalfPlaneSlitParams{log_->params().lambda, e.x}, z);
  return cyl_slit(log_->params(), e.x, z);
}

Complex ProcessEvaluator::operator()(const Complex& z, double s) const {
  const std::span<const Event> events = log_->events().first(log_->count_until(s));
  if (kind_ == ProcessKind::DiskHl) {
    const CylinderParams& p = log_->params();
    Complex w = map_f(p.radius_n, z);
    for (const Event& e : events) w = disk_slit(p, e.x, w);
    return events.empty() ? z : map_f_inv(p.radius_n, w);
  }
  Complex value = z;
  if (is_forward(kind_)) {
    // Earliest event outermost: apply the newest first.
    for (auto it = events.rbegin(); it != events.rend(); ++it)
      if (contributes(*it)) value = apply_slit(*it, value);
  } else {
    for (const Event& e : events)
      if (contributes(e)) value = apply_slit(e, value);
  }
  return value;
}

std::vector<std::pair<double, Complex>> ProcessEvaluator::trajectory(const Complex& z) const {
  std::vector<std::pair<double, Complex>> out;
  out.emplace_back(0.0, z);
  const std::span<const Event> events = log_->events();
  if (is_forward(kind_)) {
    for (const Event& e : events)
      if (contributes(e)) out.emplace_back(e.time, (*this)(z, e.time));
    return out;
  }
  if (kind_ == ProcessKind::DiskHl) {
    const CylinderParams& p = log_->params();
    Complex w = map_f(p.radius_n, z);
    for (const Event& e : events) {
      w = disk_slit(p, e.x, w);
      out.emplace_back(e.time, map_f_inv(p.radius_n, w));
    }
    return out;
  }
  Complex value = z;
  for (const Event& e : events) {
    if (!contributes(e)) continue;
    value = apply_slit(e, value);
    out.emplace_back(e.time, value);
  }
  return out;
}

Complex eval_forward_chl(const ProcessEvaluator& ev, const Complex& z, double s) {
  require_kind(ev, ProcessKind::ForwardChl);
  return ev(z, s);
}

Complex eval_backward_chl(const ProcessEvaluator& ev, const Complex& z, double s) {
  require_kind(ev, ProcessKind::BackwardChl);
  return ev(z, s);
}

Complex eval_forward_shl(const ProcessEvaluator& ev, const Complex& z, double s) {
  require_kind(ev, ProcessKind::ForwardShl);
  return ev(z, s);
}

Complex eval_backward_shl(const ProcessEvaluator& ev, const Complex& z, double s) {
  require_kind(ev, ProcessKind::BackwardShl);
  return ev(z, s);
}

Complex eval_disk_hl(const ProcessEvaluator& ev, const Complex& z, double s) {
  require_kind(ev, ProcessKind::DiskHl);
  return ev(z, s);
}

DriftValue drift(const CylinderParams& params, double t) {
  if (!(t >= 0)) throw std::invalid_argument("drift: time must be non-negative");
  const double n = params.radius_n;
  const double d = params.delta;
  return {Complex(0.0, -2.0 * std::numbers::pi * n * n * t * std::log1p(-d * d))};
}

}  // namespace chl
