#pragma once

// Membership of ultimately periodic words u v^omega in a DBA's language,
// decided three ways that must agree everywhere:
//
//   accept_up            - iterate the end-state map of v from the state
//                          reached by u until the iteration cycles; accept
//                          iff a cycle state's v-segment visits an
//                          accepting state. Production decider, O(n |v|).
//   accept_up_matexp     - boolean matrix reachability over the same map,
//                          by repeated squaring. Verification path.
//   accept_up_bruteforce - unroll u then 2n+2 copies of v symbol by
//                          symbol. Independent oracle for tests.
//
// A v-segment starting at q visits the accepting set if q itself or any
// state entered while reading v is accepting: on the lasso the segment's
// start state recurs infinitely often, so it counts.

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "omegalab/automaton.hpp"

namespace omegalab {

struct SuffixProfile {
  std::vector<std::int32_t> end_state;        // q -> delta*(q, v)
  std::vector<std::uint8_t> visits_accepting; // q -> segment from q touches F
};

inline SuffixProfile suffix_profile(const Dba& dba, std::span<const Symbol> v) {
  if (v.empty()) throw std::invalid_argument("suffix_profile: empty period");
  SuffixProfile p;
  p.end_state.resize(static_cast<std::size_t>(dba.n_states));
  p.visits_accepting.resize(static_cast<std::size_t>(dba.n_states));
  for (int q = 0; q < dba.n_states; ++q) {
    int cur = q;
    bool visits = dba.is_accepting(cur);
    for (Symbol sym : v) {
      cur = dba.step(cur, sym);
      visits = visits || dba.is_accepting(cur);
    }
    p.end_state[static_cast<std::size_t>(q)] = cur;
    p.visits_accepting[static_cast<std::size_t>(q)] = visits ? 1 : 0;
  }
  return p;
}

inline bool accept_up(const Dba& dba, const UpWord& w) {
  if (w.v.empty()) throw std::invalid_argument("accept_up: empty period");
  const SuffixProfile p = suffix_profile(dba, w.v);
  int s = dba.run_prefix(w.u);
  // Iterating a function over finitely many states must cycle within
  // n_states steps.
  std::vector<int> seen_at(static_cast<std::size_t>(dba.n_states), -1);
  std::vector<int> order;
  int steps = 0;
  while (seen_at[static_cast<std::size_t>(s)] < 0) {
    if (steps > dba.n_states)
      throw std::logic_error("accept_up: iteration failed to cycle");
    seen_at[static_cast<std::size_t>(s)] = static_cast<int>(order.size());
    order.push_back(s);
    s = p.end_state[static_cast<std::size_t>(s)];
    ++steps;
  }
  for (std::size_t i = static_cast<std::size_t>(seen_at[static_cast<std::size_t>(s)]);
       i < order.size(); ++i)
    if (p.visits_accepting[static_cast<std::size_t>(order[i])]) return true;
  return false;
}

namespace accept_detail {

// Square boolean matrix as bit rows.
struct BitMatrix {
  int n = 0;
  int words = 0;
  std::vector<std::uint64_t> row;

  explicit BitMatrix(int n_) : n(n_), words((n_ + 63) / 64), row(static_cast<std::size_t>(n_) * words) {}

  void set(int i, int j) {
    row[static_cast<std::size_t>(i) * words + (j >> 6)] |= 1ULL << (j & 63);
  }
  bool get(int i, int j) const {
    return (row[static_cast<std::size_t>(i) * words + (j >> 6)] >> (j & 63)) & 1ULL;
  }

  static BitMatrix identity(int n) {
    BitMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i);
    return m;
  }

  BitMatrix operator*(const BitMatrix& other) const {
    BitMatrix out(n);
    for (int i = 0; i < n; ++i) {
      const std::uint64_t* r = &row[static_cast<std::size_t>(i) * words];
      std::uint64_t* o = &out.row[static_cast<std::size_t>(i) * words];
      for (int w = 0; w < words; ++w) {
        std::uint64_t bits = r[w];
        while (bits) {
          const int j = (w << 6) + std::countr_zero(bits);
          bits &= bits - 1;
          const std::uint64_t* oj = &other.row[static_cast<std::size_t>(j) * words];
          for (int k = 0; k < words; ++k) o[k] |= oj[k];
        }
      }
    }
    return out;
  }

  void operator|=(const BitMatrix& other) {
    for (std::size_t i = 0; i < row.size(); ++i) row[i] |= other.row[i];
  }
};

}  // namespace accept_detail

inline bool accept_up_matexp(const Dba& dba, const UpWord& w) {
  if (w.v.empty()) throw std::invalid_argument("accept_up_matexp: empty period");
  using accept_detail::BitMatrix;
  const SuffixProfile p = suffix_profile(dba, w.v);
  const int n = dba.n_states;

  BitMatrix step(n);  // M[q][q'] = 1 iff reading v from q ends in q'
  for (int q = 0; q < n; ++q) step.set(q, p.end_state[static_cast<std::size_t>(q)]);

  // (M | I)^k for k >= n is the reflexive-transitive closure of M.
  BitMatrix closure = step;
  closure |= BitMatrix::identity(n);
  for (int reach = 1; reach < n; reach *= 2) closure = closure * closure;

  // q lies on a cycle of M iff some path of length >= 1 returns to q.
  const BitMatrix positive = step * closure;  // M | M^2 | ... | M^(n+...)

  const int s0 = dba.run_prefix(w.u);
  for (int c = 0; c < n; ++c)
    if (closure.get(s0, c) && positive.get(c, c) &&
        p.visits_accepting[static_cast<std::size_t>(c)])
      return true;
  return false;
}

inline bool accept_up_bruteforce(const Dba& dba, const UpWord& w) {
  if (w.v.empty()) throw std::invalid_argument("accept_up_bruteforce: empty period");
  int q = dba.run_prefix(w.u);
  const int copies = 2 * dba.n_states + 2;
  const int tail = dba.n_states + 1;  // copies guaranteed inside the cycle
  bool accept = false;
  for (int c = 0; c < copies; ++c) {
    bool visited = dba.is_accepting(q);
    for (Symbol sym : w.v) {
      q = dba.step(q, sym);
      visited = visited || dba.is_accepting(q);
    }
    if (c >= copies - tail && visited) accept = true;
  }
  return accept;
}

enum class AcceptMethod { iterate, matexp, brute };

inline bool accept_word(const Dba& dba, const UpWord& w, AcceptMethod m) {
  switch (m) {
    case AcceptMethod::iterate: return accept_up(dba, w);
    case AcceptMethod::matexp: return accept_up_matexp(dba, w);
    case AcceptMethod::brute: return accept_up_bruteforce(dba, w);
  }
  throw std::logic_error("unknown accept method");
}

}  // namespace omegalab
