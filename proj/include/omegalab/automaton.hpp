#pragma once

// Executable model of a deterministic Buchi automaton. The alphabet of a
// DBA over propositions P has one symbol per full assignment (2^|P| of
// them) plus a separator used only in sequence encodings; symbol index
// equals the assignment's bit value, the separator takes the last index.
// Transitions are stored as a dense (state x assignment) table so that
// stepping is a single lookup.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace omegalab {

using Symbol = std::uint32_t;

inline constexpr int kMaxPropositions = 16;

struct Alphabet {
  int prop_count = 0;

  std::uint32_t assignment_count() const { return 1u << prop_count; }
  // Assignments plus the separator.
  std::uint32_t size() const { return assignment_count() + 1; }
  Symbol separator() const { return assignment_count(); }
};

struct Dba {
  int n_states = 0;
  int initial = 0;
  std::vector<std::string> ap_names;
  std::vector<std::int32_t> delta;      // n_states * 2^|P|; -1 = undefined
  std::vector<std::uint8_t> accepting;  // per state

  Alphabet alphabet() const { return Alphabet{static_cast<int>(ap_names.size())}; }
  std::uint32_t assignment_count() const { return 1u << ap_names.size(); }

  bool is_accepting(int q) const { return accepting[static_cast<std::size_t>(q)] != 0; }

  // Raw table access; -1 where no transition is defined.
  std::int32_t delta_at(int q, Symbol sym) const {
    return delta[static_cast<std::size_t>(q) * assignment_count() + sym];
  }

  // delta(q, sym) on a complete automaton.
  int step(int q, Symbol sym) const {
    const std::int32_t next = delta_at(q, sym);
    if (next < 0) throw std::logic_error("step on incomplete DBA");
    return next;
  }

  // State reached from the initial state after reading u (initial if empty).
  int run_prefix(std::span<const Symbol> u) const {
    int q = initial;
    for (Symbol sym : u) q = step(q, sym);
    return q;
  }

  bool is_complete() const {
    for (std::int32_t d : delta)
      if (d < 0) return false;
    return true;
  }
};

enum class SinkClass { not_sink, accepting_sink, rejecting_sink };

// A sink transitions only back to itself, on every assignment.
inline std::vector<SinkClass> classify_sinks(const Dba& dba) {
  std::vector<SinkClass> out(static_cast<std::size_t>(dba.n_states), SinkClass::not_sink);
  const std::uint32_t na = dba.assignment_count();
  for (int q = 0; q < dba.n_states; ++q) {
    bool sink = true;
    for (std::uint32_t a = 0; a < na && sink; ++a)
      sink = dba.delta_at(q, a) == q;
    if (sink)
      out[static_cast<std::size_t>(q)] =
          dba.is_accepting(q) ? SinkClass::accepting_sink : SinkClass::rejecting_sink;
  }
  return out;
}

// Completes a partial automaton by routing every missing transition to one
// fresh non-accepting trap state (a rejecting sink). Complete inputs are
// returned unchanged.
inline Dba complete(const Dba& dba) {
  if (dba.is_complete()) return dba;
  Dba out = dba;
  const std::uint32_t na = dba.assignment_count();
  const int trap = out.n_states;
  out.n_states += 1;
  out.accepting.push_back(0);
  out.delta.resize(static_cast<std::size_t>(out.n_states) * na);
  for (std::uint32_t a = 0; a < na; ++a)
    out.delta[static_cast<std::size_t>(trap) * na + a] = trap;
  for (int q = 0; q < dba.n_states; ++q)
    for (std::uint32_t a = 0; a < na; ++a) {
      auto& d = out.delta[static_cast<std::size_t>(q) * na + a];
      if (d < 0) d = trap;
    }
  return out;
}

// Ultimately periodic word u v^omega; v must be nonempty.
struct UpWord {
  std::vector<Symbol> u;
  std::vector<Symbol> v;
};

}  // namespace omegalab
