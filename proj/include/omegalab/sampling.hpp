#pragma once

// UP-word dataset generation from a DBA.
//
// A sequence of total length n is drawn by sampling the separator position
// k uniformly on 1..n-1, then walking u (length k-1) from the initial
// state and v (length n-k) from u's end state, choosing uniformly at each
// step among the assignment symbols whose target is not forbidden.
// Class-targeted draws forbid sink states of the opposite class, and
// reject-targeted draws additionally keep v away from accepting states
// (u is left unconstrained, so equivalent rejected words stay reachable).
// Targets are heuristics: every record is labeled by the acceptance
// decider and pooled by its actual label.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "omegalab/acceptance.hpp"
#include "omegalab/automaton.hpp"
#include "omegalab/rng.hpp"

namespace omegalab {

enum class SampleMode { uniform, balanced };
enum class ClassTarget { accept, reject, any };

struct SamplerConfig {
  int min_len = 2;
  int max_len = 64;
  double target_positive_fraction = 0.5;
  int oversample_factor = 4;
  int max_resample_attempts = 100;
  SampleMode mode = SampleMode::balanced;
  std::uint64_t seed = 0;

  void check() const {
    if (min_len < 2 || min_len > max_len)
      throw std::invalid_argument("sampler: need 2 <= min_len <= max_len");
    if (oversample_factor < 1)
      throw std::invalid_argument("sampler: oversample_factor >= 1");
    if (max_resample_attempts < 1)
      throw std::invalid_argument("sampler: max_resample_attempts >= 1");
    if (!(target_positive_fraction > 0.0 && target_positive_fraction < 1.0))
      throw std::invalid_argument("sampler: target_positive_fraction in (0,1)");
  }
};

struct SequenceRecord {
  std::vector<Symbol> u;
  std::vector<Symbol> v;
  bool label = false;

  int length() const { return static_cast<int>(u.size() + 1 + v.size()); }
};

inline std::vector<Symbol> encode(std::span<const Symbol> u, std::span<const Symbol> v,
                                  const Alphabet& alphabet) {
  if (v.empty()) throw std::invalid_argument("encode: empty period");
  std::vector<Symbol> out;
  out.reserve(u.size() + 1 + v.size());
  out.insert(out.end(), u.begin(), u.end());
  out.push_back(alphabet.separator());
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

inline std::pair<std::vector<Symbol>, std::vector<Symbol>> decode(
    std::span<const Symbol> encoded, const Alphabet& alphabet) {
  const Symbol sep = alphabet.separator();
  std::size_t pos = encoded.size();
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == sep) {
      if (pos != encoded.size()) throw std::invalid_argument("decode: two separators");
      pos = i;
    }
  }
  if (pos == encoded.size()) throw std::invalid_argument("decode: no separator");
  if (pos + 1 == encoded.size()) throw std::invalid_argument("decode: empty period");
  return {std::vector<Symbol>(encoded.begin(), encoded.begin() + pos),
          std::vector<Symbol>(encoded.begin() + pos + 1, encoded.end())};
}

// Separator position k, uniform on 1..n-1. |u| = k-1, |v| = n-k.
inline int sample_split(int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_split: n >= 2");
  return rng.range_int(1, n - 1);
}

struct PathSample {
  std::vector<Symbol> symbols;
  int end = -1;
};

// Uniform per-step walk of `len` symbols from `start`, never transitioning
// into a forbidden state (or through an undefined transition). Returns
// nullopt on a dead end, signalling the caller to restart the sequence.
inline std::optional<PathSample> sample_path(const Dba& dba, int start, int len,
                                             const std::vector<std::uint8_t>& forbidden,
                                             Rng& rng) {
  PathSample out;
  out.symbols.reserve(static_cast<std::size_t>(len));
  out.end = start;
  const std::uint32_t na = dba.assignment_count();
  std::vector<Symbol> allowed;
  allowed.reserve(na);
  for (int i = 0; i < len; ++i) {
    allowed.clear();
    for (std::uint32_t a = 0; a < na; ++a) {
      const std::int32_t next = dba.delta_at(out.end, a);
      if (next >= 0 && !forbidden[static_cast<std::size_t>(next)]) allowed.push_back(a);
    }
    if (allowed.empty()) return std::nullopt;
    const Symbol sym = allowed[rng.below(allowed.size())];
    out.symbols.push_back(sym);
    out.end = dba.step(out.end, sym);
  }
  return out;
}

namespace sampling_detail {

struct ForbiddenSets {
  std::vector<std::uint8_t> none;
  std::vector<std::uint8_t> rejecting_sinks;   // accept target, u and v
  std::vector<std::uint8_t> accepting_sinks;   // reject target, u
  std::vector<std::uint8_t> accepting_states;  // reject target, v
};

inline ForbiddenSets forbidden_sets(const Dba& dba) {
  const auto sinks = classify_sinks(dba);
  ForbiddenSets f;
  const auto n = static_cast<std::size_t>(dba.n_states);
  f.none.assign(n, 0);
  f.rejecting_sinks.assign(n, 0);
  f.accepting_sinks.assign(n, 0);
  f.accepting_states.assign(n, 0);
  for (std::size_t q = 0; q < n; ++q) {
    if (sinks[q] == SinkClass::rejecting_sink) f.rejecting_sinks[q] = 1;
    if (sinks[q] == SinkClass::accepting_sink) f.accepting_sinks[q] = 1;
    if (dba.accepting[q]) f.accepting_states[q] = 1;
  }
  return f;
}

}  // namespace sampling_detail

// One length-n record. The label is computed, not assumed: a targeted draw
// may come back with the opposite label. Dead ends restart the whole
// attempt (fresh k, u, v) up to max_resample_attempts times.
inline std::optional<SequenceRecord> sample_sequence(const Dba& dba, int n,
                                                     ClassTarget target,
                                                     const SamplerConfig& cfg, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_sequence: n >= 2");
  const auto f = sampling_detail::forbidden_sets(dba);
  const std::vector<std::uint8_t>* forbid_u = &f.none;
  const std::vector<std::uint8_t>* forbid_v = &f.none;
  switch (target) {
    case ClassTarget::accept:
      forbid_u = &f.rejecting_sinks;
      forbid_v = &f.rejecting_sinks;
      break;
    case ClassTarget::reject:
      forbid_u = &f.accepting_sinks;
      forbid_v = &f.accepting_states;
      break;
    case ClassTarget::any:
      break;
  }
  for (int attempt = 0; attempt < cfg.max_resample_attempts; ++attempt) {
    const int k = sample_split(n, rng);
    auto u = sample_path(dba, dba.initial, k - 1, *forbid_u, rng);
    if (!u) continue;
    auto v = sample_path(dba, u->end, n - k, *forbid_v, rng);
    if (!v) continue;
    SequenceRecord rec;
    rec.u = std::move(u->symbols);
    rec.v = std::move(v->symbols);
    rec.label = accept_up(dba, UpWord{rec.u, rec.v});
    return rec;
  }
  return std::nullopt;
}

struct BatchStats {
  int requested = 0;
  int positives = 0;
  double achieved_positive_fraction = 0.0;
  double target_positive_fraction = 0.0;
  long dead_ends = 0;       // exhausted sequence attempts
  long target_misses = 0;   // draws whose label differed from their target
  long draws = 0;
};

// Oversample-and-filter balancing: up to oversample_factor*count draws per
// class target, pooled by actual label; the batch takes the mix closest to
// target_positive_fraction and fills any shortfall from the majority pool,
// finally falling back to unconstrained draws if both pools run dry.
// Always returns exactly `count` records (on a complete DBA the fallback
// cannot dead-end); the achieved fraction is reported via `stats`.
inline std::vector<SequenceRecord> sample_balanced_batch(const Dba& dba, int count,
                                                         int min_len, int max_len,
                                                         const SamplerConfig& cfg,
                                                         std::uint64_t batch_seed,
                                                         BatchStats* stats = nullptr) {
  if (count < 1) throw std::invalid_argument("sample_balanced_batch: count >= 1");
  BatchStats st;
  st.requested = count;
  st.target_positive_fraction = cfg.target_positive_fraction;

  const int want_pos =
      std::min(count, static_cast<int>(cfg.target_positive_fraction * count + 0.5));
  const int want_neg = count - want_pos;
  const long budget = static_cast<long>(cfg.oversample_factor) * count;

  std::vector<SequenceRecord> pos, neg;
  long accept_draws = 0, reject_draws = 0, any_draws = 0;
  std::uint64_t candidate = 0;
  bool flip = false;

  auto draw = [&](ClassTarget target) {
    Rng rng(derive_seed(batch_seed, seeds::kCandidate, candidate++));
    const int n = rng.range_int(min_len, max_len);
    auto rec = sample_sequence(dba, n, target, cfg, rng);
    ++st.draws;
    if (!rec) {
      ++st.dead_ends;
      return;
    }
    // 1% spot check against the independent brute-force oracle.
    if (st.draws % 100 == 1 &&
        rec->label != accept_up_bruteforce(dba, UpWord{rec->u, rec->v}))
      throw std::logic_error("sampler label disagrees with the brute-force oracle");
    if (target == ClassTarget::accept && !rec->label) ++st.target_misses;
    if (target == ClassTarget::reject && rec->label) ++st.target_misses;
    (rec->label ? pos : neg).push_back(std::move(*rec));
  };

  for (;;) {
    const bool need_pos = static_cast<int>(pos.size()) < want_pos;
    const bool need_neg = static_cast<int>(neg.size()) < want_neg;
    if (!need_pos && !need_neg) break;
    const bool can_pos = accept_draws < budget;
    const bool can_neg = reject_draws < budget;
    ClassTarget target;
    if (need_pos && can_pos && need_neg && can_neg) {
      target = flip ? ClassTarget::reject : ClassTarget::accept;
      flip = !flip;
    } else if (need_pos && can_pos) {
      target = ClassTarget::accept;
    } else if (need_neg && can_neg) {
      target = ClassTarget::reject;
    } else {
      break;
    }
    (target == ClassTarget::accept ? accept_draws : reject_draws)++;
    draw(target);
  }

  std::vector<SequenceRecord> out;
  out.reserve(static_cast<std::size_t>(count));
  const int take_pos = std::min<int>(want_pos, static_cast<int>(pos.size()));
  const int take_neg = std::min<int>(want_neg, static_cast<int>(neg.size()));
  out.insert(out.end(), pos.begin(), pos.begin() + take_pos);
  out.insert(out.end(), neg.begin(), neg.begin() + take_neg);
  // Shortfall in one class is made up from the other pool's surplus.
  for (std::size_t i = static_cast<std::size_t>(take_pos);
       i < pos.size() && static_cast<int>(out.size()) < count; ++i)
    out.push_back(pos[i]);
  for (std::size_t i = static_cast<std::size_t>(take_neg);
       i < neg.size() && static_cast<int>(out.size()) < count; ++i)
    out.push_back(neg[i]);
  while (static_cast<int>(out.size()) < count && any_draws < budget) {
    ++any_draws;
    Rng rng(derive_seed(batch_seed, seeds::kCandidate, candidate++));
    const int n = rng.range_int(min_len, max_len);
    auto rec = sample_sequence(dba, n, ClassTarget::any, cfg, rng);
    ++st.draws;
    if (rec) out.push_back(std::move(*rec));
    else ++st.dead_ends;
  }
  if (static_cast<int>(out.size()) < count)
    throw std::runtime_error(
        "sampler exhausted: produced " + std::to_string(out.size()) + " of " +
        std::to_string(count) + " records (" + std::to_string(st.dead_ends) +
        " dead ends); the automaton may be partial");

  Rng shuffle_rng(derive_seed(batch_seed, seeds::kShuffle, 0));
  shuffle_rng.shuffle(out);

  for (const auto& r : out) st.positives += r.label ? 1 : 0;
  st.achieved_positive_fraction = static_cast<double>(st.positives) / count;
  if (stats) *stats = st;
  return out;
}

// Unconstrained per-step-uniform sampling; reports the (possibly skewed)
// label mix via `stats`.
inline std::vector<SequenceRecord> sample_uniform_batch(const Dba& dba, int count,
                                                        int min_len, int max_len,
                                                        const SamplerConfig& cfg,
                                                        std::uint64_t batch_seed,
                                                        BatchStats* stats = nullptr) {
  if (count < 1) throw std::invalid_argument("sample_uniform_batch: count >= 1");
  BatchStats st;
  st.requested = count;
  st.target_positive_fraction = cfg.target_positive_fraction;
  std::vector<SequenceRecord> out;
  out.reserve(static_cast<std::size_t>(count));
  std::uint64_t candidate = 0;
  while (static_cast<int>(out.size()) < count) {
    Rng rng(derive_seed(batch_seed, seeds::kCandidate, candidate++));
    const int n = rng.range_int(min_len, max_len);
    auto rec = sample_sequence(dba, n, ClassTarget::any, cfg, rng);
    ++st.draws;
    if (!rec) {
      ++st.dead_ends;
      if (st.dead_ends > static_cast<long>(cfg.oversample_factor) * count + 100)
        throw std::runtime_error("sampler exhausted: uniform draws keep dead-ending");
      continue;
    }
    if (st.draws % 100 == 1 &&
        rec->label != accept_up_bruteforce(dba, UpWord{rec->u, rec->v}))
      throw std::logic_error("sampler label disagrees with the brute-force oracle");
    out.push_back(std::move(*rec));
  }
  for (const auto& r : out) st.positives += r.label ? 1 : 0;
  st.achieved_positive_fraction = static_cast<double>(st.positives) / count;
  if (stats) *stats = st;
  return out;
}

inline std::vector<SequenceRecord> sample_batch(const Dba& dba, int count, int min_len,
                                                int max_len, const SamplerConfig& cfg,
                                                std::uint64_t batch_seed,
                                                BatchStats* stats = nullptr) {
  return cfg.mode == SampleMode::balanced
             ? sample_balanced_batch(dba, count, min_len, max_len, cfg, batch_seed, stats)
             : sample_uniform_batch(dba, count, min_len, max_len, cfg, batch_seed, stats);
}

}  // namespace omegalab
