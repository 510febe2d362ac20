#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace snz {

enum class Errc {
  EmptyPulse,
  OutOfRange,
  GridViolation,
  Unstable,
  NonUnitary,
  InvalidChannel,
  DegenerateLevels,
  NoContour,
  FitFailed,
  IllConditioned,
  RootNotBracketed,
  MissingNoiseField,
  InvalidConfig,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::EmptyPulse: return "EmptyPulse";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::GridViolation: return "GridViolation";
    case Errc::Unstable: return "Unstable";
    case Errc::NonUnitary: return "NonUnitary";
    case Errc::InvalidChannel: return "InvalidChannel";
    case Errc::DegenerateLevels: return "DegenerateLevels";
    case Errc::NoContour: return "NoContour";
    case Errc::FitFailed: return "FitFailed";
    case Errc::IllConditioned: return "IllConditioned";
    case Errc::RootNotBracketed: return "RootNotBracketed";
    case Errc::MissingNoiseField: return "MissingNoiseField";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Exception carrying one of the library error codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace snz
