#pragma once

#include <stdexcept>
#include <string>

namespace liftcal {

/// Coarse classification used by front ends to map failures onto exit codes.
enum class ErrorCategory {
  Input,      // the caller supplied data or parameters the method cannot use
  Numerical,  // the data were acceptable but an iterative method failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define LIFTCAL_DEFINE_ERROR(Name, Category)                         \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(Category, what) {} \
  };

LIFTCAL_DEFINE_ERROR(InvalidParameterError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(InvalidInputError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(ShapeError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(InsufficientDataError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(DegenerateDesignError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(BoundaryError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(UndefinedLcdError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(SingularityError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(InsufficientSamplesError, ErrorCategory::Input)
LIFTCAL_DEFINE_ERROR(NonConvergenceError, ErrorCategory::Numerical)
LIFTCAL_DEFINE_ERROR(TuningFailureError, ErrorCategory::Numerical)
LIFTCAL_DEFINE_ERROR(ModelUnsuitableError, ErrorCategory::Numerical)

#undef LIFTCAL_DEFINE_ERROR

}  // namespace liftcal
