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

#include "clockrobust/operator_expr.hpp"

#include <cctype>
#include <charconv>
#include <numbers>

namespace clockrobust {

namespace {

// A 1x1 matrix stands for a scalar; kron then doubles as scalar multiply.
struct Term {
  int qubits = 0;
  CMatrix value = CMatrix::Constant(1, 1, Complex(1.0, 0.0));
};

CMatrix named_operator(std::string_view name) {
  CMatrix m = CMatrix::Zero(2, 2);
  const Complex i(0.0, 1.0);
  if (name == "I") {
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
  } else if (name == "X") {
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
  } else if (name == "Y") {
    m(0, 1) = -i;
    m(1, 0) = i;
  } else if (name == "Z") {
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
  } else if (name == "SP") {
    m(0, 1) = 1.0;
  } else if (name == "SM") {
    m(1, 0) = 1.0;
  } else {
    return CMatrix();
  }
  return m;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Term parse() {
    Term t = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw OperatorExprError("operator expression '" + std::string(text_) + "': " + what +
                                " at offset " + std::to_string(pos_),
                            pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  // Returns +1, -1, or 0 when no sign is present.
  int sign() {
    if (consume("+")) return 1;
    if (consume("-") || consume("−")) return -1;
    return 0;
  }

  static void add_into(Term& acc, const Term& rhs, int s, const Parser& p) {
    if (acc.qubits != rhs.qubits) {
      p.fail("inconsistent qubit counts across terms (" + std::to_string(acc.qubits) + " vs " +
             std::to_string(rhs.qubits) + ")");
    }
    acc.value += static_cast<double>(s) * rhs.value;
  }

  Term expr() {
    int s = sign();
    Term acc = product();
    if (s == -1) acc.value = -acc.value;
    for (;;) {
      const std::size_t save = pos_;
      s = sign();
      if (s == 0) {
        pos_ = save;
        break;
      }
      add_into(acc, product(), s, *this);
    }
    return acc;
  }

  bool at_factor_start() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return c == '(' || c == '.' || std::isdigit(static_cast<unsigned char>(c)) ||
           std::isalpha(static_cast<unsigned char>(c));
  }

  Term product() {
    Term acc = factor();
    for (;;) {
      if (consume("*") || consume("⊗")) {
        acc = tensor(acc, factor());
      } else if (at_factor_start()) {
        acc = tensor(acc, factor());
      } else {
        break;
      }
    }
    return acc;
  }

  static Term tensor(const Term& a, const Term& b) {
    Term t;
    t.qubits = a.qubits + b.qubits;
    t.value = kron(a.value, b.value);
    return t;
  }

  Term factor() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected operand");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Term inner = expr();
      if (!consume(")")) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const char* first = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - first);
      Term t;
      t.value(0, 0) = v;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      Term t;
      if (name == "i") {
        t.value(0, 0) = Complex(0.0, 1.0);
        return t;
      }
      if (name == "pi") {
        t.value(0, 0) = std::numbers::pi;
        return t;
      }
      CMatrix m = named_operator(name);
      if (m.size() == 0) {
        pos_ = start;
        fail("unknown operator name '" + std::string(name) + "'");
      }
      t.qubits = 1;
      t.value = std::move(m);
      return t;
    }
    fail("unexpected character");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

CMatrix build_operator(std::string_view expr) {
  Term t = Parser(expr).parse();
  if (t.qubits == 0) {
    throw OperatorExprError("operator expression '" + std::string(expr) + "' has no operator factor",
                            0);
  }
  return t.value;
}

int operator_qubit_count(std::string_view expr) { return Parser(expr).parse().qubits; }

}  // namespace clockrobust
