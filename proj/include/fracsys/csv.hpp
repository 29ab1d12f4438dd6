#pragma once

// Trajectory CSV: header "t,x,y", one row per sample, '\n' line endings,
// values printed with %.<precision>g.

#include <iosfwd>

#include "fracsys/system_solver.hpp"

namespace fracsys {

inline constexpr int kDefaultPrecision = 12;

void write_csv(std::ostream& os, const Trajectory& tr, int precision = kDefaultPrecision);

/// Throws DomainError on a malformed header or row.
Trajectory read_csv(std::istream& is);

}  // namespace fracsys
