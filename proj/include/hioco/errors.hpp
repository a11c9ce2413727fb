// Copyright 2026 The HiOCO Authors
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

namespace hioco {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (dimension mismatch, bad index).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter is outside its admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A time slot outside 1..T was requested.
class SlotRangeError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Master/worker message exchange reached an inconsistent state.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. `where` names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)), message_(what) {}
  const std::string& where() const noexcept { return where_; }
  /// The description without the location prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string where_;
  std::string message_;
};

class NotImplementedError : public Error {
 public:
  using Error::Error;
};

}  // namespace hioco
