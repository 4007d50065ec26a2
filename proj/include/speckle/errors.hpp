#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace speckle {

// Base class for all library errors. kind() is the stable identifier that
// shows up in sweep CSV error columns and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SPECKLE_DEFINE_ERROR(NAME)                                   \
  class NAME : public Error {                                        \
   public:                                                           \
    explicit NAME(const std::string& what) : Error(#NAME, what) {}   \
  }

SPECKLE_DEFINE_ERROR(OutOfBox);
SPECKLE_DEFINE_ERROR(BudgetExceeded);
SPECKLE_DEFINE_ERROR(InvalidDims);
SPECKLE_DEFINE_ERROR(DimensionMismatch);
SPECKLE_DEFINE_ERROR(NotPositiveDefinite);
SPECKLE_DEFINE_ERROR(SingularNormalMatrix);
SPECKLE_DEFINE_ERROR(SearchSpaceTooLarge);
SPECKLE_DEFINE_ERROR(TooFewPoints);
SPECKLE_DEFINE_ERROR(NonPositiveInput);
SPECKLE_DEFINE_ERROR(ParseError);
SPECKLE_DEFINE_ERROR(ValidationError);
SPECKLE_DEFINE_ERROR(InvalidArgument);

#undef SPECKLE_DEFINE_ERROR

}  // namespace speckle
