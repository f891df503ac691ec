#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace shiftindex {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest readable rendering of a double for error messages.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

#define SHIFTINDEX_DEFINE_ERROR(Name)          \
  class Name : public Error {                  \
   public:                                     \
    explicit Name(const std::string& what)     \
        : Error(std::string(#Name ": ") + what) {} \
  }

// geometry
SHIFTINDEX_DEFINE_ERROR(UnsupportedGeometry);
SHIFTINDEX_DEFINE_ERROR(BadResolution);
SHIFTINDEX_DEFINE_ERROR(DegreeMismatch);

// group_action
SHIFTINDEX_DEFINE_ERROR(GroupMismatch);
SHIFTINDEX_DEFINE_ERROR(InvalidGroup);

// symbol_algebra
SHIFTINDEX_DEFINE_ERROR(AlgebraMismatch);
SHIFTINDEX_DEFINE_ERROR(NotElliptic);
SHIFTINDEX_DEFINE_ERROR(TruncationInsufficient);
SHIFTINDEX_DEFINE_ERROR(TopDegree);
SHIFTINDEX_DEFINE_ERROR(InsufficientSupport);

// analytic_index
SHIFTINDEX_DEFINE_ERROR(UnsupportedTerm);

// topological_index
SHIFTINDEX_DEFINE_ERROR(EmptyStratum);
SHIFTINDEX_DEFINE_ERROR(VanishingAngle);
SHIFTINDEX_DEFINE_ERROR(NotIdempotent);

// harness
SHIFTINDEX_DEFINE_ERROR(ScenarioInvalid);
SHIFTINDEX_DEFINE_ERROR(ParseError);

#undef SHIFTINDEX_DEFINE_ERROR

}  // namespace shiftindex
