#pragma once

#include <stdexcept>
#include <string>

namespace blbayes {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something that violates a precondition. The CLI maps
/// these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computation broke down on otherwise valid input. The CLI maps these
/// to exit code 3.
class ComputeError : public Error {
 public:
  using Error::Error;
};

#define BLBAYES_DEFINE_ERROR(Name, Base) \
  class Name : public Base {             \
   public:                               \
    using Base::Base;                    \
  }

BLBAYES_DEFINE_ERROR(DimensionError, InputError);
BLBAYES_DEFINE_ERROR(SymmetryError, InputError);
BLBAYES_DEFINE_ERROR(ParameterError, InputError);
BLBAYES_DEFINE_ERROR(DegreesOfFreedomError, InputError);
BLBAYES_DEFINE_ERROR(RankError, InputError);
BLBAYES_DEFINE_ERROR(InsufficientDataError, InputError);
BLBAYES_DEFINE_ERROR(FormatError, InputError);
BLBAYES_DEFINE_ERROR(ModelSizeError, InputError);
BLBAYES_DEFINE_ERROR(HyperparamError, InputError);
BLBAYES_DEFINE_ERROR(ConfigError, InputError);

BLBAYES_DEFINE_ERROR(NotPositiveDefiniteError, ComputeError);
BLBAYES_DEFINE_ERROR(NumericalError, ComputeError);
BLBAYES_DEFINE_ERROR(AugmentationError, ComputeError);
BLBAYES_DEFINE_ERROR(BasisError, ComputeError);

#undef BLBAYES_DEFINE_ERROR

/// A Markov chain produced a non-finite or otherwise unusable state.
class ChainError : public ComputeError {
 public:
  ChainError(const std::string& what, long iteration);
  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace blbayes
