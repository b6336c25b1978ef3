#pragma once
// Plain-text matrix serialization.
//
//   features=<M> classes=<W>
//   <class id>\t<object count>\t<activation bias>     (W lines)
//   <feature id>                                       (M lines)
//   <feature index>\t<class index>\t<weight>           (one line per nonzero cell)
//
// Reals use the shortest decimal that round-trips to the same double.

#include "ina/information_matrix.hpp"

#include <iosfwd>
#include <string>

namespace ina {

std::string format_real(double value);
double parse_real(std::string_view text);

void write_matrix(std::ostream& out, const InformationMatrix& matrix);
std::string matrix_to_string(const InformationMatrix& matrix);

/// Throws Error(ParseError) on malformed input.
InformationMatrix read_matrix(std::istream& in);
InformationMatrix matrix_from_string(const std::string& text);

}  // namespace ina
