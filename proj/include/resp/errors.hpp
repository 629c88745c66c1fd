// Copyright 2026 The resp Authors
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

namespace resp {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  InvalidArgument,
  InsufficientPrecision,
  BruteForceTooLarge,
  PreconditionViolated,
  NoSuchN,
  TooFewShells,
  NoConvergence,
  SingularJacobian,
  NoBracket,
  BudgetExceeded,
  DivisorUnderflow,
  NewtonStepFailure,
  ConfigError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::BruteForceTooLarge: return "BruteForceTooLarge";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::NoSuchN: return "NoSuchN";
    case ErrorKind::TooFewShells: return "TooFewShells";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::DivisorUnderflow: return "DivisorUnderflow";
    case ErrorKind::NewtonStepFailure: return "NewtonStepFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace resp
