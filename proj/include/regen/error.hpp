// Copyright 2026 The regen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regen {

enum class Errc {
  ZeroInverse,
  LengthMismatch,
  SingularMatrix,
  DecodeFailure,
  DuplicatePosition,
  TooShort,
  NoMajority,
  InvalidParams,
  NonIntegralPoint,
  SelfRepair,
  OverlappingSets,
  PayloadTooLarge,
  MalformedChunk,
  Usage,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::DecodeFailure: return "DecodeFailure";
    case Errc::DuplicatePosition: return "DuplicatePosition";
    case Errc::TooShort: return "TooShort";
    case Errc::NoMajority: return "NoMajority";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::NonIntegralPoint: return "NonIntegralPoint";
    case Errc::SelfRepair: return "SelfRepair";
    case Errc::OverlappingSets: return "OverlappingSets";
    case Errc::PayloadTooLarge: return "PayloadTooLarge";
    case Errc::MalformedChunk: return "MalformedChunk";
    case Errc::Usage: return "Usage";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers can branch on the cause without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace regen
