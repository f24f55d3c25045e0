// Copyright 2026 The RidgeSVM Authors. All Rights Reserved.
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

#ifndef RIDGESVM_ERROR_HPP
#define RIDGESVM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ridgesvm {

enum class Errc {
  // linalg
  not_positive_definite,
  singular_border,
  singular_schur_block,
  singular_corner_block,
  dimension_mismatch,
  // kernels / model
  invalid_kernel,
  invalid_hyperparams,
  inconsistent_state,
  unknown_id,
  duplicate_id,
  // solvers
  single_class_input,
  no_convergence,
  nonpositive_rho,
  empty_s,
  repair_divergence,
  stalled_path,
  inconsistent_event,
  // datakit
  parse_error,
  label_domain_error,
  constant_column,
  pool_exhausted,
  schema_version_mismatch,
  corrupt_file,
  io_error,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::singular_border: return "SingularBorder";
    case Errc::singular_schur_block: return "SingularSchurBlock";
    case Errc::singular_corner_block: return "SingularCornerBlock";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::invalid_kernel: return "InvalidKernel";
    case Errc::invalid_hyperparams: return "InvalidHyperparams";
    case Errc::inconsistent_state: return "InconsistentState";
    case Errc::unknown_id: return "UnknownId";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::single_class_input: return "SingleClassInput";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::nonpositive_rho: return "NonpositiveRho";
    case Errc::empty_s: return "EmptyS";
    case Errc::repair_divergence: return "RepairDivergence";
    case Errc::stalled_path: return "StalledPath";
    case Errc::inconsistent_event: return "InconsistentEvent";
    case Errc::parse_error: return "ParseError";
    case Errc::label_domain_error: return "LabelDomainError";
    case Errc::constant_column: return "ConstantColumn";
    case Errc::pool_exhausted: return "PoolExhausted";
    case Errc::schema_version_mismatch: return "SchemaVersionMismatch";
    case Errc::corrupt_file: return "CorruptFile";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ridgesvm

#endif  // RIDGESVM_ERROR_HPP
