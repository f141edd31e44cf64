#pragma once

// Built-in languages used as test beds and CLI targets (fixture:NAME).
// All fixtures are complete deterministic Buchi automata by construction.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omegalab/automaton.hpp"

namespace omegalab {

struct NamedDba {
  std::string name;
  std::string description;
  Dba dba;
};

namespace detail {

inline Dba make_dba(int n_states, int initial, std::vector<std::string> ap_names,
                    std::vector<std::int32_t> delta, std::vector<int> accepting) {
  Dba d;
  d.n_states = n_states;
  d.initial = initial;
  d.ap_names = std::move(ap_names);
  d.delta = std::move(delta);
  d.accepting.assign(static_cast<std::size_t>(n_states), 0);
  for (int q : accepting) d.accepting[static_cast<std::size_t>(q)] = 1;
  return d;
}

}  // namespace detail

// Whenever a holds, b must eventually hold, and a holds initially.
// States: 0 start, 1 no pending obligation (accepting), 2 waiting for b,
// 3 rejecting sink (entered when the first symbol lacks a).
// Assignments over {a, b}: bit 0 = a, bit 1 = b.
inline Dba fixture_fig1() {
  return detail::make_dba(4, 0, {"a", "b"},
                          {
                              // 00=!a!b, 01=a!b, 10=!a b, 11=a b
                              3, 2, 3, 1,  // from 0
                              1, 2, 1, 1,  // from 1
                              2, 2, 1, 1,  // from 2
                              3, 3, 3, 3,  // from 3
                          },
                          {1});
}

// Infinitely often a. State 1 (accepting) is occupied right after reading a.
inline Dba fixture_gfa() {
  return detail::make_dba(2, 0, {"a"},
                          {
                              0, 1,  // from 0: !a, a
                              0, 1,  // from 1
                          },
                          {1});
}

// Always a. Any !a falls into the rejecting sink.
inline Dba fixture_ga() {
  return detail::make_dba(2, 0, {"a"},
                          {
                              1, 0,  // from 0: !a, a
                              1, 1,  // from 1 (sink)
                          },
                          {0});
}

// Accepts every word.
inline Dba fixture_universal() {
  return detail::make_dba(1, 0, {"a"}, {0, 0}, {0});
}

// k states in a directed cycle advanced by a; !a stays put. State 0 is the
// single accepting state. Exercises state-count scaling.
inline Dba fixture_cycle(int k) {
  if (k < 1) throw std::invalid_argument("cycle fixture needs k >= 1");
  std::vector<std::int32_t> delta(static_cast<std::size_t>(k) * 2);
  for (int q = 0; q < k; ++q) {
    delta[static_cast<std::size_t>(q) * 2 + 0] = q;
    delta[static_cast<std::size_t>(q) * 2 + 1] = (q + 1) % k;
  }
  return detail::make_dba(k, 0, {"a"}, std::move(delta), {0});
}

inline std::vector<NamedDba> fixtures() {
  std::vector<NamedDba> out;
  out.push_back({"fig1", "G(a -> F b) and a, over {a, b}", fixture_fig1()});
  out.push_back({"gfa", "infinitely often a", fixture_gfa()});
  out.push_back({"ga", "always a", fixture_ga()});
  out.push_back({"universal", "accepts every word", fixture_universal()});
  for (int k : {3, 8, 16, 32})
    out.push_back({"cycle_" + std::to_string(k),
                   "directed " + std::to_string(k) + "-cycle on a, one accepting state",
                   fixture_cycle(k)});
  return out;
}

inline std::optional<Dba> find_fixture(const std::string& name) {
  for (auto& f : fixtures())
    if (f.name == name) return std::move(f.dba);
  return std::nullopt;
}

inline Dba fixture(const std::string& name) {
  auto d = find_fixture(name);
  if (!d) throw std::invalid_argument("unknown fixture: " + name);
  return *std::move(d);
}

}  // namespace omegalab
