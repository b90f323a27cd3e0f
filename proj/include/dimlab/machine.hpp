#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dimlab/codes.hpp"

namespace dimlab {

/// Program grammar of the toy prefix machine M (opcode is two bits):
///   00 LITERAL   enc(l) then l raw bits          emits the raw bits
///   01 COPY-COND enc(offset) enc(l)              emits v[offset, offset + l)
///   10 REPEAT    enc(k) subprogram               emits k copies of the output
///   11 CONCAT    subprogram subprogram           emits both outputs in order
/// enc is encode_nat. Every node costs one step plus one step per emitted bit.
struct MachineBudget {
  int max_len = 24;
  std::uint64_t max_steps = 4096;

  static constexpr int kMaxLen = 24;
  /// Throws machine.InvalidBudget unless max_len <= 24 and max_steps >= 1.
  void validate() const;
};

enum class Opcode : std::uint8_t { kLiteral = 0, kCopyCond = 1, kRepeat = 2, kConcat = 3 };

struct ProgramNode {
  Opcode op = Opcode::kLiteral;
  std::uint64_t a = 0;  // LITERAL length, COPY-COND offset, REPEAT count
  std::uint64_t b = 0;  // COPY-COND length
  BitString literal;
  int left = -1;
  int right = -1;
};

/// A decoded program: the bits it consumed and its syntax tree.
struct Program {
  BitString code;
  std::vector<ProgramNode> nodes;
  int root = -1;
};

/// Decodes one program starting at the reader's position.
Program parse_program(BitReader& in);
/// The whole string must be exactly one program, else codes.MalformedCode.
Program parse_program(const BitString& code);

struct RunResult {
  bool halted = false;
  BitString output;
  std::uint64_t steps = 0;
  std::string reason;  // why it diverged: "steps" or "cond-range"
};

RunResult run(const Program& p, const BitString& v, const MachineBudget& budget);
RunResult run(const BitString& code, const BitString& v, const MachineBudget& budget);

/// Program builders.
BitString program_literal(const BitString& w);
BitString program_copy(std::uint64_t offset, std::uint64_t len);
BitString program_repeat(std::uint64_t k, const BitString& sub);
BitString program_concat(const BitString& a, const BitString& b);

/// Exact shortest-program search for a fixed condition v and budget.
///
/// Builds, for every string reachable as a node output, the minimum step
/// count achievable with each program length <= max_len. Node outputs of an
/// optimal program are substrings of the target (or periods of them), so the
/// table over those substrings is complete; dominated shapes (empty children,
/// REPEAT with k < 2) are skipped since they are never shorter.
class MachineSolver {
 public:
  MachineSolver(BitString v, MachineBudget budget);

  /// K_M(w|v) under the budget, or nullopt.
  std::optional<int> min_program_length(const BitString& w);

 private:
  static constexpr std::uint64_t kInf = UINT64_MAX;
  using Table = std::array<std::uint64_t, MachineBudget::kMaxLen + 1>;

  const Table& solve(const BitString& t);

  BitString v_;
  MachineBudget budget_;
  std::map<BitString, Table> memo_;
};

std::optional<int> min_program_length(const BitString& w, const BitString& v,
                                      const MachineBudget& budget);

/// Length of the LITERAL program for w, which always exists.
std::size_t literal_program_length(std::size_t len);

}  // namespace dimlab
