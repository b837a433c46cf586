#pragma once

#include <stdexcept>
#include <string>

namespace dissdoi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DISSDOI_DEFINE_ERROR(Name)            \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(std::string(#Name ": ") + what) {} \
  }

DISSDOI_DEFINE_ERROR(InvalidArgument);
DISSDOI_DEFINE_ERROR(DefectiveMatrix);
DISSDOI_DEFINE_ERROR(SingularMatrix);
DISSDOI_DEFINE_ERROR(InvalidExponent);
DISSDOI_DEFINE_ERROR(NotDissipative);
DISSDOI_DEFINE_ERROR(NearSingularShift);
DISSDOI_DEFINE_ERROR(UnitEigenvalueAtOne);
DISSDOI_DEFINE_ERROR(NotCommuting);
DISSDOI_DEFINE_ERROR(LowerHalfPlane);
DISSDOI_DEFINE_ERROR(QuadratureNotConverged);
DISSDOI_DEFINE_ERROR(DivergentModulus);
DISSDOI_DEFINE_ERROR(RouteUnavailable);
DISSDOI_DEFINE_ERROR(SeriesNotConverged);
DISSDOI_DEFINE_ERROR(ParseError);

#undef DISSDOI_DEFINE_ERROR

}  // namespace dissdoi
