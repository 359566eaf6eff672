#pragma once

#include <iosfwd>
#include <string>

#include "chl/process.hpp"

namespace chl {

/// JSON Lines: a header {"N","lambda","delta","horizon","seed"} followed by
/// one {"t","x"} object per event. Floats are written with 17 significant
/// digits so that reading back reproduces every bit.
void write_event_log(std::ostream& out, const EventLog& log);

/// Throws std::runtime_error on malformed input.
EventLog read_event_log(std::istream& in);

/// printf("%.17g") of a double.
std::string format_double(double value);

}  // namespace chl
