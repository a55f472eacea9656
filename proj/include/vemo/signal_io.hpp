#pragma once

#include <map>
#include <string>

#include "vemo/signal.hpp"

namespace vemo {

// Raw dump: little-endian interleaved 64-bit float I/Q pairs. A sidecar JSON
// (path + ".json") records sample count plus caller-supplied config fields,
// so golden vectors stay self-describing.
void write_signal(const std::string& path, const ComplexSignal& sig,
                  const std::map<std::string, std::string>& config = {});

// Reads a dump written by write_signal. The sidecar is consulted for the
// expected sample count when present; a byte-length mismatch throws.
ComplexSignal read_signal(const std::string& path);

} // namespace vemo
