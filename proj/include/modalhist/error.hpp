// Copyright 2026 The modalhist Authors
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

namespace modalhist {

enum class ErrorKind {
  kShape,
  kValidation,
  kCapacity,
  kDisjointness,
  kCausality,
  kIndexRange,
  kConsistencyRefusal,
  kSchema,
  kIo,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kDisjointness: return "disjointness";
    case ErrorKind::kCausality: return "causality";
    case ErrorKind::kIndexRange: return "index_range";
    case ErrorKind::kConsistencyRefusal: return "consistency_refusal";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a kind so front-ends can map
/// it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace modalhist
