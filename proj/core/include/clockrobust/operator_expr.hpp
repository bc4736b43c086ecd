// Copyright 2026 The clockrobust Authors
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

#ifndef CLOCKROBUST_OPERATOR_EXPR_HPP
#define CLOCKROBUST_OPERATOR_EXPR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include "clockrobust/linalg.hpp"

namespace clockrobust {

/// Raised for malformed operator expressions; `position()` is the byte offset
/// into the expression where parsing stopped.
class OperatorExprError : public std::invalid_argument {
 public:
  OperatorExprError(const std::string& msg, std::size_t position)
      : std::invalid_argument(msg), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Builds a matrix from a weighted sum of tensor products of single-qubit
/// operators.
///
/// Grammar (whitespace-insensitive):
///
///     expr    := ['+' | '-'] product (('+' | '-') product)*
///     product := factor (['*' | '⊗'] factor)*
///     factor  := number | 'i' | 'pi' | NAME | '(' expr ')'
///     NAME    := I | X | Y | Z | SP | SM
///
/// Scalar factors multiply; operator factors are tensored left to right, so the
/// leftmost operator acts on qubit 1. `SP` is sigma+ = |0><1| and `SM` its
/// adjoint. Both `-` and the Unicode minus sign are accepted.
///
/// Examples: "0.0628318 * Z ⊗ Z", "SP + SM", "i(SP - SM)", "X I".
CMatrix build_operator(std::string_view expr);

/// Number of qubits an expression acts on (0 for a pure scalar).
int operator_qubit_count(std::string_view expr);

}  // namespace clockrobust

#endif  // CLOCKROBUST_OPERATOR_EXPR_HPP
