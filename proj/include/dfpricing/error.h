//
// Copyright 2026 The dfpricing Authors
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
//

#ifndef DFPRICING_ERROR_H_
#define DFPRICING_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dfpricing {

enum class ErrorCode {
  kInvalidInput,
  kDomain,
  kNumeric,
  kTraining,
  kConfig,
  kData,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception. `context` names
// the offending item (a config path, a file, a layer, a record index).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string context = {});

  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }
  const std::string& context() const { return context_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::string context_;
};

[[noreturn]] void Fail(ErrorCode code, std::string message,
                       std::string context = {});

}  // namespace dfpricing

#endif  // DFPRICING_ERROR_H_
