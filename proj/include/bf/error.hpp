#pragma once

#include <stdexcept>
#include <string>

namespace bf {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" catch this; the subclasses name the failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BF_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                 \
   public:                                                    \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

BF_DEFINE_ERROR(NotPositiveDefinite);
BF_DEFINE_ERROR(Singular);
BF_DEFINE_ERROR(OutOfRange);
BF_DEFINE_ERROR(InvalidParameter);
BF_DEFINE_ERROR(DimensionMismatch);
BF_DEFINE_ERROR(ZeroChannel);
BF_DEFINE_ERROR(SizeLimitExceeded);
BF_DEFINE_ERROR(UnrepresentableConstant);
BF_DEFINE_ERROR(InconsistentAssignment);
BF_DEFINE_ERROR(ParseError);
BF_DEFINE_ERROR(NumericalFailure);

#undef BF_DEFINE_ERROR

}  // namespace bf
