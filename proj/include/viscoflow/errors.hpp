#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace viscoflow {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct NotSPD : Error {
  using Error::Error;
};

struct ExtensionExceeded : Error {
  using Error::Error;
};

struct SingularF : Error {
  using Error::Error;
};

enum class Reason {
  Ok,
  NonFinite,
  NegativeDensity,
  DensityAboveCovolume,
  NotSPD,
  NonPositiveDetY,
  NonPositiveTemperature,
  ExtensionExceeded,
};

const char* to_string(Reason r);

struct Inadmissible : Error {
  Reason reason;
  explicit Inadmissible(Reason r)
      : Error(std::string("inadmissible state: ") + to_string(r)), reason(r) {}
};

struct InadmissibleCell : Error {
  std::size_t index;
  Reason reason;
  InadmissibleCell(std::size_t i, Reason r)
      : Error("cell " + std::to_string(i) + " inadmissible: " + to_string(r)),
        index(i),
        reason(r) {}
};

struct StepTooLarge : Error {
  using Error::Error;
};

struct CFLCollapse : Error {
  using Error::Error;
};

struct SamplingFailure : Error {
  using Error::Error;
};

}  // namespace viscoflow
