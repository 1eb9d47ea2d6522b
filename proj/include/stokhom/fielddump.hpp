#pragma once

#include <string>

#include "stokhom/array2d.hpp"

namespace stokhom {

/// Binary field container: a text header followed by row-major 64-bit
/// little-endian floats. Layout (newline-delimited):
///
///   STOKES-HOMOG-FIELD v1
///   kind = cell | mac-u | mac-v | mac-p
///   rows = <int>
///   cols = <int>
///   meta = <single free-text line>        (optional)
///   END
///   <rows*cols doubles, row-major, little-endian>
///
/// The payload length must equal rows*cols*8 exactly; loads are bit-exact.
struct FieldDump {
    std::string kind;
    std::string meta;
    Array2D data;
};

void dump_field(const std::string& path, const FieldDump& f);
FieldDump load_field(const std::string& path);

}  // namespace stokhom
