#pragma once

#include <stdexcept>
#include <string>

namespace smm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SMM_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

SMM_DEFINE_ERROR(NotPositiveDefinite);
SMM_DEFINE_ERROR(NotSymmetric);
SMM_DEFINE_ERROR(InvalidShape);
SMM_DEFINE_ERROR(InvalidRate);
SMM_DEFINE_ERROR(InvalidConcentration);
SMM_DEFINE_ERROR(InvalidParams);
SMM_DEFINE_ERROR(DegenerateData);
SMM_DEFINE_ERROR(InvalidCount);
SMM_DEFINE_ERROR(InvalidLabel);
SMM_DEFINE_ERROR(InvalidConfig);
SMM_DEFINE_ERROR(AllZeroLikelihood);
SMM_DEFINE_ERROR(NoMatchingDraws);
SMM_DEFINE_ERROR(NotAPermutation);
SMM_DEFINE_ERROR(LengthMismatch);
SMM_DEFINE_ERROR(FormatError);

#undef SMM_DEFINE_ERROR

/// A step failure inside run_chain, tagged with the sweep at which it happened.
class SamplerFailure : public Error {
 public:
  SamplerFailure(long iteration, const std::string& what)
      : Error("sweep " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace smm
