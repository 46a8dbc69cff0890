// Copyright 2026 The qagg Authors
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

// Minimal line-oriented assembly dialect:
//
//   # comment
//   qubits 3;
//   h q0;
//   rz(5.67) q1;
//   cnot q0 q1;
//
// Keywords and gate names are case-insensitive. Angles are radians.

#pragma once

#include "qagg/circuit.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

namespace qagg {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

namespace detail {

class AsmLexer {
 public:
  AsmLexer(const std::string& text, int line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size();
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, column(), what); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string word() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    std::string w = text_.substr(start, pos_ - start);
    for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return w;
  }

  double number() {
    skip_space();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  int qubit() {
    skip_space();
    const int col = column();
    const std::string w = word();
    if (w.size() < 2 || w[0] != 'q') throw ParseError(line_, col, "expected qubit operand like q0");
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(w[i]))) {
        throw ParseError(line_, col, "malformed qubit operand '" + w + "'");
      }
    }
    return std::stoi(w.substr(1));
  }

 private:
  const std::string& text_;
  int line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the assembly dialect into a Circuit, preserving statement order.
inline Circuit parse_asm(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  int num_qubits = -1;
  Circuit circuit;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    // A line may carry several ';'-terminated statements.
    detail::AsmLexer lex(line, line_no);
    while (!lex.done()) {
      const int stmt_col = lex.column();
      const std::string head = lex.word();
      if (head == "qubits") {
        if (num_qubits >= 0) lex.fail("duplicate 'qubits' header");
        const double n = lex.number();
        if (n < 1 || n != std::floor(n)) lex.fail("qubit count must be a positive integer");
        num_qubits = static_cast<int>(n);
        circuit = Circuit(num_qubits);
        lex.expect(';');
        continue;
      }
      if (num_qubits < 0) throw ParseError(line_no, stmt_col, "missing 'qubits N;' header");
      const auto kind = gate_kind_from_name(head);
      if (!kind) throw ParseError(line_no, stmt_col, "unknown gate '" + head + "'");

      std::vector<double> params;
      if (lex.peek() == '(') {
        lex.expect('(');
        params.push_back(lex.number());
        while (lex.peek() == ',') {
          lex.expect(',');
          params.push_back(lex.number());
        }
        lex.expect(')');
      }
      std::vector<Qubit> qubits;
      while (lex.peek() != ';') {
        if (lex.peek() == '\0') lex.fail("expected ';'");
        const int col = lex.column();
        const int q = lex.qubit();
        if (q >= num_qubits) {
          throw ParseError(line_no, col,
                           "qubit index q" + std::to_string(q) + " out of range (declared " +
                               std::to_string(num_qubits) + ")");
        }
        qubits.push_back(q);
      }
      lex.expect(';');
      Gate g{*kind, std::move(params), std::move(qubits), std::nullopt};
      try {
        g.validate();
      } catch (const Error& e) {
        throw ParseError(line_no, stmt_col, e.what());
      }
      circuit.gates.push_back(std::move(g));
    }
  }
  if (num_qubits < 0) throw ParseError(line_no == 0 ? 1 : line_no, 1, "missing 'qubits N;' header");
  return circuit;
}

inline Circuit load_asm(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  Circuit c = parse_asm(ss.str());
  if (c.name.empty()) {
    const auto slash = path.find_last_of('/');
    c.name = path.substr(slash == std::string::npos ? 0 : slash + 1);
  }
  return c;
}

/// Renders a circuit in the assembly dialect. Custom gates have no textual
/// form and are rejected.
inline std::string to_asm(const Circuit& c) {
  std::ostringstream os;
  if (!c.name.empty()) os << "# " << c.name << '\n';
  os << "qubits " << c.num_qubits << ";\n";
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Custom) throw Error("to_asm: custom gates cannot be rendered");
    os << to_string(g) << ";\n";
  }
  return os.str();
}

}  // namespace qagg
