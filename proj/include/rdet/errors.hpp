#pragma once

#include <stdexcept>
#include <string>

namespace rdet {

/// Base class for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RDET_ERROR(Name, Base)   \
  class Name : public Base {     \
   public:                       \
    using Base::Base;            \
  }

// dataset
RDET_ERROR(MissingColumn, Error);
RDET_ERROR(UnparsableValue, Error);
RDET_ERROR(EmptyFile, Error);
RDET_ERROR(DuplicateHeader, Error);
RDET_ERROR(TooFewSamples, Error);
RDET_ERROR(EmptyClass, Error);

// tree
RDET_ERROR(EmptyNode, Error);
RDET_ERROR(FeatureIndexOutOfRange, Error);

// learners
RDET_ERROR(SingleClassDataset, Error);
RDET_ERROR(NonFiniteLoss, Error);
RDET_ERROR(FeatureLengthMismatch, Error);

// pe
RDET_ERROR(PeError, Error);
RDET_ERROR(NotAnExecutable, PeError);
RDET_ERROR(TruncatedHeader, PeError);
RDET_ERROR(UnknownOptionalHeaderMagic, PeError);
RDET_ERROR(UnmappedColumn, Error);

// metrics
RDET_ERROR(LengthMismatch, Error);
RDET_ERROR(EmptyInput, Error);
RDET_ERROR(SingleClassTruth, Error);

// model persistence
RDET_ERROR(UnsupportedVersion, Error);
RDET_ERROR(CorruptModelFile, Error);

// pipeline / config
RDET_ERROR(ConfigInvalid, Error);

#undef RDET_ERROR

}  // namespace rdet
