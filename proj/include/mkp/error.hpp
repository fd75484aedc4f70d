// Copyright 2026 The mkp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace mkp {

enum class Errc {
  CompositeDimension,
  ZeroInverse,
  IndexOutOfRange,
  DimensionMismatch,
  QubitModeUnsupported,
  NonOrthonormalBasis,
  InvalidControlBasis,
  DimensionTooLarge,
  UnsupportedFormat,
  InvalidConfig,
  MalformedInput,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::CompositeDimension: return "CompositeDimension";
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::QubitModeUnsupported: return "QubitModeUnsupported";
    case Errc::NonOrthonormalBasis: return "NonOrthonormalBasis";
    case Errc::InvalidControlBasis: return "InvalidControlBasis";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

/// Library error. The code identifies the contract that was violated; the
/// message carries the offending values.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mkp
