#pragma once

#include <string>

namespace stokhom {

/// Shortest round-trip decimal form of a double; locale-independent, so CSV
/// bodies are byte-deterministic across runs.
std::string csv_double(double v);

}  // namespace stokhom
