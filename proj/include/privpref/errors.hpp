#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace privpref {

// Base for all library errors. kind() is the stable machine-readable tag
// used in CLI diagnostics and exit-code mapping.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define PRIVPREF_DEFINE_ERROR(NAME, TAG)                         \
  class NAME : public Error {                                    \
   public:                                                       \
    explicit NAME(const std::string& msg) : Error(TAG, msg) {}   \
  }

PRIVPREF_DEFINE_ERROR(UnknownChoiceError, "UnknownChoice");
PRIVPREF_DEFINE_ERROR(SchemaMismatchError, "SchemaMismatch");
PRIVPREF_DEFINE_ERROR(ParseError, "ParseError");
PRIVPREF_DEFINE_ERROR(IoError, "IoError");
PRIVPREF_DEFINE_ERROR(ConfigInvalidError, "ConfigInvalid");
PRIVPREF_DEFINE_ERROR(InsufficientDonorsError, "InsufficientDonors");
PRIVPREF_DEFINE_ERROR(NoSensitiveFeaturesError, "NoSensitiveFeatures");
PRIVPREF_DEFINE_ERROR(AnonymizationInfeasibleError, "AnonymizationInfeasible");
PRIVPREF_DEFINE_ERROR(EmptyClassError, "EmptyClass");
PRIVPREF_DEFINE_ERROR(EmptyTrainingSetError, "EmptyTrainingSet");
PRIVPREF_DEFINE_ERROR(NonFiniteLossError, "NonFiniteLoss");
PRIVPREF_DEFINE_ERROR(DimensionMismatchError, "DimensionMismatch");
PRIVPREF_DEFINE_ERROR(LengthMismatchError, "LengthMismatch");
PRIVPREF_DEFINE_ERROR(TooSmallError, "TooSmall");
PRIVPREF_DEFINE_ERROR(InternalError, "Internal");

#undef PRIVPREF_DEFINE_ERROR

}  // namespace privpref
