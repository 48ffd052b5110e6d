/* Copyright 2026 The melforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MELFORGE_ERROR_H_
#define MELFORGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace melforge {

enum class ErrorCode {
  kNotFound,
  kUnsupportedFormat,
  kInvalidArgument,
  kInvalidRange,
  kShapeMismatch,
  kNonFinite,
  kBatchTooSmall,
  kUnknownArchitecture,
  kLengthMismatch,
  kEmpty,
  kDegenerateClass,
  kParseError,
  kDuplicateClipId,
  kUnknownLabel,
  kEmptyTrainSplit,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// All library failures surface as this exception; code() identifies the
// failure class and what() names the offending field or file.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // The message without the error-code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace melforge

#endif  // MELFORGE_ERROR_H_
