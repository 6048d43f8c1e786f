#pragma once

#include <stdexcept>
#include <string>

namespace kahler {

// Base of every error thrown by the library. `residual()` carries the measured
// violation when the error is a failed numerical precondition.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

#define KAHLER_DEFINE_ERROR(Name)  \
  class Name : public Error {      \
   public:                         \
    using Error::Error;            \
  };

KAHLER_DEFINE_ERROR(DimensionError)
KAHLER_DEFINE_ERROR(ParityError)
KAHLER_DEFINE_ERROR(NotInHSpace)
KAHLER_DEFINE_ERROR(NotInU3)
KAHLER_DEFINE_ERROR(NotSkewAdjoint)
KAHLER_DEFINE_ERROR(NotCommuting)
KAHLER_DEFINE_ERROR(MalformedString)
KAHLER_DEFINE_ERROR(ToleranceError)
KAHLER_DEFINE_ERROR(RankDeficient)
KAHLER_DEFINE_ERROR(DomainError)
KAHLER_DEFINE_ERROR(SingularMetric)
KAHLER_DEFINE_ERROR(KindMismatch)
KAHLER_DEFINE_ERROR(ConvergenceError)

#undef KAHLER_DEFINE_ERROR

}  // namespace kahler
