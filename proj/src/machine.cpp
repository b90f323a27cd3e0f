#include "dimlab/machine.hpp"

#include <algorithm>

#include "dimlab/error.hpp"

namespace dimlab {

void MachineBudget::validate() const {
  if (max_len < 0 || max_len > kMaxLen) {
    throw Error(errc::kInvalidBudget, "max_len must be in [0, 24], got " + std::to_string(max_len));
  }
  if (max_steps < 1) throw Error(errc::kInvalidBudget, "max_steps must be >= 1");
}

namespace {

int parse_node(BitReader& in, Program& p) {
  const auto op = static_cast<Opcode>(in.read_uint(2));
  ProgramNode node;
  node.op = op;
  switch (op) {
    case Opcode::kLiteral:
      node.a = decode_nat(in);
      if (node.a > in.remaining()) throw Error(errc::kMalformedCode, "literal runs past the end");
      node.literal = in.read_bits(node.a);
      break;
    case Opcode::kCopyCond:
      node.a = decode_nat(in);
      node.b = decode_nat(in);
      break;
    case Opcode::kRepeat:
      node.a = decode_nat(in);
      node.left = parse_node(in, p);
      break;
    case Opcode::kConcat:
      node.left = parse_node(in, p);
      node.right = parse_node(in, p);
      break;
  }
  p.nodes.push_back(std::move(node));
  return static_cast<int>(p.nodes.size()) - 1;
}

struct Evaluator {
  const Program& p;
  const BitString& v;
  std::uint64_t limit;
  std::uint64_t steps = 0;
  std::string failure;

  // Charges a node emitting `len` bits; false once the budget is exceeded.
  bool charge(std::uint64_t len) {
    if (len > limit || steps + 1 + len > limit) {
      failure = "steps";
      return false;
    }
    steps += 1 + len;
    return true;
  }

  bool eval(int idx, BitString& out) {
    const ProgramNode& n = p.nodes[static_cast<std::size_t>(idx)];
    switch (n.op) {
      case Opcode::kLiteral:
        if (!charge(n.a)) return false;
        out.append(n.literal);
        return true;
      case Opcode::kCopyCond:
        if (n.a > v.size() || n.b > v.size() - n.a) {
          failure = "cond-range";
          return false;
        }
        if (!charge(n.b)) return false;
        out.append(v.substr(n.a, n.b));
        return true;
      case Opcode::kRepeat: {
        BitString once;
        if (!eval(n.left, once)) return false;
        if (n.a != 0 && once.size() > limit / n.a) {
          failure = "steps";
          return false;
        }
        if (!charge(n.a * once.size())) return false;
        for (std::uint64_t i = 0; i < n.a; ++i) out.append(once);
        return true;
      }
      case Opcode::kConcat: {
        BitString both;
        if (!eval(n.left, both) || !eval(n.right, both)) return false;
        if (!charge(both.size())) return false;
        out.append(both);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

Program parse_program(BitReader& in) {
  Program p;
  const std::size_t start = in.position();
  p.root = parse_node(in, p);
  p.code = in.source().substr(start, in.position() - start);
  return p;
}

Program parse_program(const BitString& code) {
  BitReader in(code);
  Program p;
  p.root = parse_node(in, p);
  if (!in.at_end()) throw Error(errc::kMalformedCode, "trailing bits after program");
  p.code = code;
  return p;
}

RunResult run(const Program& p, const BitString& v, const MachineBudget& budget) {
  budget.validate();
  Evaluator ev{p, v, budget.max_steps};
  RunResult res;
  res.halted = ev.eval(p.root, res.output);
  res.steps = ev.steps;
  if (!res.halted) {
    res.output = BitString();
    res.reason = ev.failure;
  }
  return res;
}

RunResult run(const BitString& code, const BitString& v, const MachineBudget& budget) {
  return run(parse_program(code), v, budget);
}

BitString program_literal(const BitString& w) {
  BitString out = BitString::from_string("00");
  encode_nat_into(w.size(), out);
  out.append(w);
  return out;
}

BitString program_copy(std::uint64_t offset, std::uint64_t len) {
  BitString out = BitString::from_string("01");
  encode_nat_into(offset, out);
  encode_nat_into(len, out);
  return out;
}

BitString program_repeat(std::uint64_t k, const BitString& sub) {
  BitString out = BitString::from_string("10");
  encode_nat_into(k, out);
  out.append(sub);
  return out;
}

BitString program_concat(const BitString& a, const BitString& b) {
  BitString out = BitString::from_string("11");
  out.append(a);
  out.append(b);
  return out;
}

std::size_t literal_program_length(std::size_t len) { return 2 + nat_code_length(len) + len; }

MachineSolver::MachineSolver(BitString v, MachineBudget budget)
    : v_(std::move(v)), budget_(budget) {
  budget_.validate();
}

const MachineSolver::Table& MachineSolver::solve(const BitString& t) {
  if (auto it = memo_.find(t); it != memo_.end()) return it->second;

  Table best;
  best.fill(kInf);
  const int L = budget_.max_len;
  const std::uint64_t n = t.size();
  auto offer = [&](std::size_t len, std::uint64_t steps) {
    if (len <= static_cast<std::size_t>(L) && steps < best[len]) best[len] = steps;
  };

  offer(literal_program_length(n), 1 + n);

  if (n <= v_.size()) {
    for (std::uint64_t off = 0; off + n <= v_.size(); ++off) {
      const std::size_t len = 2 + nat_code_length(off) + nat_code_length(n);
      if (len > static_cast<std::size_t>(L)) break;
      if (std::equal(t.bits().begin(), t.bits().end(),
                     v_.bits().begin() + static_cast<std::ptrdiff_t>(off))) {
        offer(len, 1 + n);
      }
    }
  }

  // Children have length >= 3, so composite nodes need room for them.
  if (n >= 2 && L >= 8) {
    for (std::uint64_t k = 1; k < n; ++k) {
      const Table left = solve(t.substr(0, k));
      const Table& right = solve(t.substr(k, n - k));
      for (int la = 3; la + 5 <= L; ++la) {
        if (left[static_cast<std::size_t>(la)] == kInf) continue;
        for (int lb = 3; 2 + la + lb <= L; ++lb) {
          if (right[static_cast<std::size_t>(lb)] == kInf) continue;
          offer(static_cast<std::size_t>(2 + la + lb),
                1 + n + left[static_cast<std::size_t>(la)] + right[static_cast<std::size_t>(lb)]);
        }
      }
    }
  }
  if (n >= 2) {
    for (std::uint64_t d = 1; d * 2 <= n; ++d) {
      if (n % d != 0) continue;
      bool periodic = true;
      for (std::uint64_t i = d; i < n && periodic; ++i) periodic = t[i] == t[i - d];
      if (!periodic) continue;
      const std::uint64_t k = n / d;
      const std::size_t head = 2 + nat_code_length(k);
      if (head + 3 > static_cast<std::size_t>(L)) continue;
      const Table& sub = solve(t.substr(0, d));
      for (int lc = 3; head + static_cast<std::size_t>(lc) <= static_cast<std::size_t>(L); ++lc) {
        if (sub[static_cast<std::size_t>(lc)] == kInf) continue;
        offer(head + static_cast<std::size_t>(lc), 1 + n + sub[static_cast<std::size_t>(lc)]);
      }
    }
  }
  return memo_.emplace(t, best).first->second;
}

std::optional<int> MachineSolver::min_program_length(const BitString& w) {
  const Table& best = solve(w);
  for (int len = 0; len <= budget_.max_len; ++len) {
    if (best[static_cast<std::size_t>(len)] <= budget_.max_steps) return len;
  }
  return std::nullopt;
}

std::optional<int> min_program_length(const BitString& w, const BitString& v,
                                      const MachineBudget& budget) {
  MachineSolver solver(v, budget);
  return solver.min_program_length(w);
}

}  // namespace dimlab
