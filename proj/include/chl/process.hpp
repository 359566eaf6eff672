#pragma once

/// \file
/// Poisson event logs and evaluation of the cylindrical and stationary
/// Hastings-Levitov(0) cluster maps driven by them.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "chl/conformal.hpp"

namespace chl {

/// One Poisson arrival: time and attachment abscissa.
struct Event {
  double time{};
  double x{};

  friend bool operator==(const Event&, const Event&) = default;
};

/// Immutable, time-sorted record of the arrivals on [-pi N, pi N) x (0, t].
class EventLog {
 public:
  /// Validates the invariants: positive increasing times (ties allowed only
  /// if already ordered by abscissa), times within the horizon, abscissae in
  /// the fundamental domain.
  EventLog(CylinderParams params, double horizon, std::uint64_t seed,
           std::vector<Event> events);

  const CylinderParams& params() const { return params_; }
  double horizon() const { return horizon_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  /// Number of events with time <= s.
  std::size_t count_until(double s) const;

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  CylinderParams params_;
  double horizon_;
  std::uint64_t seed_;
  std::vector<Event> events_;
};

/// Samples an intensity-one Poisson process on [-pi N, pi N) x (0, horizon].
/// Deterministic in `seed`.
EventLog sample_events(const CylinderParams& params, double horizon, std::uint64_t seed);

/// Keeps the events with |x| <= half_width and re-tags the log with the
/// radius half_width / pi (delta recomputed for the same lambda).
EventLog restrict_log(const EventLog& log, double half_width);

enum class ProcessKind { ForwardChl, BackwardChl, ForwardShl, BackwardShl, DiskHl };

const char* to_string(ProcessKind kind);

/// Stateless view of an event log that evaluates one of the processes.
/// SHL variants use the half-plane slit map on the events with |x| <= window.
class ProcessEvaluator {
 public:
  ProcessEvaluator(const EventLog& log, ProcessKind kind,
                   std::optional<double> window = std::nullopt);

  const EventLog& log() const { return *log_; }
  ProcessKind kind() const { return kind_; }
  std::optional<double> window() const { return window_; }

  /// Cluster map at time s applied to z. Right-continuous in s.
  Complex operator()(const Complex& z, double s) const;

  /// Values at time 0 and after each contributing event, as (time, value)
  /// pairs. Backward kinds reuse the running composition; forward kinds are
  /// recomposed per event.
  std::vector<std::pair<double, Complex>> trajectory(const Complex& z) const;

 private:
  bool contributes(const Event& e) const;
  Complex apply_slit(const Event& e, const Complex& z) const;

  const EventLog* log_;
  ProcessKind kind_;
  std::optional<double> window_;
};

Complex eval_forward_chl(const ProcessEvaluator& ev, const Complex& z, double s);
Complex eval_backward_chl(const ProcessEvaluator& ev, const Complex& z, double s);
Complex eval_forward_shl(const ProcessEvaluator& ev, const Complex& z, double s);
Complex eval_backward_shl(const ProcessEvaluator& ev, const Complex& z, double s);
Complex eval_disk_hl(const ProcessEvaluator& ev, const Complex& z, double s);

/// Predictable part of the backward process: -i 2 pi N^2 t log(1 - delta^2).
struct DriftValue {
  Complex value;
};

DriftValue drift(const CylinderParams& params, double t);

}  // namespace chl
