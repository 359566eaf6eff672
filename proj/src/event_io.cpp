#include "chl/event_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace chl {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_event_log(std::ostream& out, const EventLog& log) {
  const CylinderParams& p = log.params();
  out << "{\"N\":" << format_double(p.radius_n) << ",\"lambda\":" << format_double(p.lambda)
      << ",\"delta\":" << format_double(p.delta) << ",\"horizon\":" << format_double(log.horizon())
      << ",\"seed\":" << log.seed() << "}\n";
  for (const Event& e : log.events())
    out << "{\"t\":" << format_double(e.time) << ",\"x\":" << format_double(e.x) << "}\n";
}

EventLog read_event_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("event log: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("event log: bad header: ") + e.what());
  }
  for (const char* key : {"N", "lambda", "horizon", "seed"})
    if (!header.contains(key)) throw std::runtime_error(std::string("event log: header lacks ") + key);

  const CylinderParams params =
      make_cylinder(header["N"].get<double>(), header["lambda"].get<double>());
  std::vector<Event> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json row = nlohmann::json::parse(line);
      events.push_back({row.at("t").get<double>(), row.at("x").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("event log: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  try {
    return EventLog(params, header["horizon"].get<double>(), header["seed"].get<std::uint64_t>(),
                    std::move(events));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("event log: ") + e.what());
  }
}

}  // namespace chl
