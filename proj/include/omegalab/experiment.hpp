#pragma once

// Training and evaluation harness: on-the-fly balanced batches, periodic
// validation on a fixed length-512 set, the per-length range evaluation,
// ID/OOD summaries with performance categories, and cross-run Pearson
// analyses (state count vs OOD accuracy, state count vs parameter norm).
//
// Every random stream derives from the run's master seed, so a RunRecord
// is a pure function of (automaton, configs, seed).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>  // vendored nlohmann/json

#include "omegalab/checkpoint.hpp"
#include "omegalab/dataset_io.hpp"
#include "omegalab/optimizer.hpp"
#include "omegalab/plot.hpp"
#include "omegalab/rnn.hpp"
#include "omegalab/sampling.hpp"
#include "omegalab/stats.hpp"
#include "omegalab/version.hpp"

namespace omegalab {

struct EvalConfig {
  int min_len = 2;
  int max_len = 512;
  int per_length = 512;
  int val_size = 1024;
  int val_len = 512;
  int validation_interval = 250;
  std::uint64_t seed = 0;  // 0: derived from the run's master seed

  void check() const {
    if (min_len < 2 || min_len > max_len)
      throw std::invalid_argument("eval: need 2 <= min_len <= max_len");
    if (per_length < 1 || val_size < 1 || val_len < 2 || validation_interval < 1)
      throw std::invalid_argument("eval: counts must be positive");
  }
};

struct EvalGrid {
  std::vector<int> lengths;
  std::vector<double> accuracy;
  std::vector<double> positive_fraction;
  std::vector<int> n_samples;
  std::vector<int> pos_correct, pos_total, neg_correct, neg_total;
};

enum class Category { perfect, near_perfect, good, moderate, poor };

// Table-style OOD bins: Perfect > 99.9, Near-Perfect 98-99.9, Good 95-98,
// Moderate 90-95, Poor < 90 (percent). The half-open choices partition
// [0,1] exactly.
inline Category categorize_ood(double acc) {
  if (acc > 0.999) return Category::perfect;
  if (acc >= 0.98) return Category::near_perfect;
  if (acc >= 0.95) return Category::good;
  if (acc >= 0.90) return Category::moderate;
  return Category::poor;
}

inline const char* category_name(Category c) {
  switch (c) {
    case Category::perfect: return "Perfect";
    case Category::near_perfect: return "Near-Perfect";
    case Category::good: return "Good";
    case Category::moderate: return "Moderate";
    case Category::poor: return "Poor";
  }
  return "?";
}

struct IdOodSummary {
  double id_accuracy = 0.0;
  double ood_accuracy = 0.0;
  Category category = Category::poor;
};

// ID: mean per-length accuracy at lengths <= train_max_len; OOD: above it.
inline IdOodSummary summarize_id_ood(const EvalGrid& grid, int train_max_len) {
  double id_sum = 0.0, ood_sum = 0.0;
  int id_n = 0, ood_n = 0;
  for (std::size_t i = 0; i < grid.lengths.size(); ++i) {
    if (grid.lengths[i] <= train_max_len) {
      id_sum += grid.accuracy[i];
      ++id_n;
    } else {
      ood_sum += grid.accuracy[i];
      ++ood_n;
    }
  }
  if (id_n == 0 || ood_n == 0)
    throw std::invalid_argument("summarize_id_ood: grid must cover both ranges");
  IdOodSummary s;
  s.id_accuracy = id_sum / id_n;
  s.ood_accuracy = ood_sum / ood_n;
  s.category = categorize_ood(s.ood_accuracy);
  return s;
}

inline int max_threads() {
  if (const char* env = std::getenv("OMEGA_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

namespace experiment_detail {

// Index-parallel loop; each task writes only its own slots, so results do
// not depend on thread count or schedule.
template <typename F>
void parallel_for(int n, F&& f) {
  const int threads = std::min(max_threads(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        f(i);
      }
    });
  for (auto& th : pool) th.join();
}

inline double accuracy_of(const std::vector<int>& predicted,
                          const std::vector<int>& labels) {
  int correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    correct += predicted[i] == labels[i] ? 1 : 0;
  return predicted.empty() ? 0.0 : static_cast<double>(correct) / predicted.size();
}

}  // namespace experiment_detail

// Balanced per-length test sets, scored with the tie-to-0 argmax rule.
// Reproducible bit-for-bit for a given eval_seed; lengths evaluate in
// parallel (cap with OMEGA_LAB_THREADS).
inline EvalGrid evaluate_range(const RnnParams& params, const Dba& dba,
                               const EvalConfig& eval, const SamplerConfig& sampler,
                               std::uint64_t eval_seed) {
  eval.check();
  const int n_lengths = eval.max_len - eval.min_len + 1;
  EvalGrid grid;
  grid.lengths.resize(static_cast<std::size_t>(n_lengths));
  grid.accuracy.resize(static_cast<std::size_t>(n_lengths));
  grid.positive_fraction.resize(static_cast<std::size_t>(n_lengths));
  grid.n_samples.resize(static_cast<std::size_t>(n_lengths));
  grid.pos_correct.resize(static_cast<std::size_t>(n_lengths));
  grid.pos_total.resize(static_cast<std::size_t>(n_lengths));
  grid.neg_correct.resize(static_cast<std::size_t>(n_lengths));
  grid.neg_total.resize(static_cast<std::size_t>(n_lengths));

  const Alphabet alphabet = dba.alphabet();
  experiment_detail::parallel_for(n_lengths, [&](int i) {
    const int len = eval.min_len + i;
    BatchStats stats;
    const auto records = sample_batch(dba, eval.per_length, len, len, sampler,
                                      derive_seed(eval_seed, seeds::kRangeEval,
                                                  static_cast<std::uint64_t>(len)),
                                      &stats);
    const Batch batch = Batch::from_records(records, alphabet);
    const auto predicted = predict(params, batch);
    int pos_correct = 0, pos_total = 0, neg_correct = 0, neg_total = 0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
      const bool correct = predicted[k] == batch.labels[k];
      if (batch.labels[k] == 1) {
        ++pos_total;
        pos_correct += correct ? 1 : 0;
      } else {
        ++neg_total;
        neg_correct += correct ? 1 : 0;
      }
    }
    const auto idx = static_cast<std::size_t>(i);
    grid.lengths[idx] = len;
    grid.n_samples[idx] = eval.per_length;
    grid.accuracy[idx] =
        static_cast<double>(pos_correct + neg_correct) / eval.per_length;
    grid.positive_fraction[idx] = stats.achieved_positive_fraction;
    grid.pos_correct[idx] = pos_correct;
    grid.pos_total[idx] = pos_total;
    grid.neg_correct[idx] = neg_correct;
    grid.neg_total[idx] = neg_total;
  });
  return grid;
}

struct ValidationPoint {
  long step = 0;
  double accuracy = 0.0;
};

struct RunRecord {
  std::string automaton;
  std::string automaton_sha256;
  int state_count = 0;
  bool completion_added_trap = false;
  std::uint64_t seed = 0;
  TrainConfig train;
  EvalConfig eval;
  SamplerConfig sampler;
  std::vector<ValidationPoint> history;
  EvalGrid grid;
  double id_accuracy = 0.0;
  double ood_accuracy = 0.0;
  Category category = Category::poor;
  double param_norm = 0.0;
  double final_train_loss = 0.0;
  double val_positive_fraction = 0.0;
  double mean_train_positive_fraction = 0.0;
  bool imbalance_flagged = false;
  double pos_accuracy = 0.0;  // per-class accuracy over the whole grid
  double neg_accuracy = 0.0;
};

struct TrainResult {
  RunRecord record;
  RnnParams params;
  AmsgradState opt;
};

using ProgressFn =
    std::function<void(long step, long total, double loss, double val_accuracy)>;

inline TrainResult train_run(const Dba& dba, const std::string& automaton_name,
                             const TrainConfig& train, const EvalConfig& eval,
                             const SamplerConfig& sampler,
                             bool completion_added_trap = false,
                             const ProgressFn& progress = nullptr) {
  train.check();
  eval.check();
  sampler.check();
  if (!dba.is_complete())
    throw std::invalid_argument("train_run: automaton must be complete");

  const std::uint64_t master = train.seed;
  const Alphabet alphabet = dba.alphabet();

  RnnParams params = init_params(static_cast<int>(alphabet.size()), train.hidden,
                                 derive_seed(master, seeds::kParamsInit, 0));
  AmsgradState opt = AmsgradState::init(params, train.optimizer);

  // Fixed validation set, regenerated once per run from its own stream.
  BatchStats val_stats;
  const auto val_records =
      sample_batch(dba, eval.val_size, eval.val_len, eval.val_len, sampler,
                   derive_seed(master, seeds::kValidationSet, 0), &val_stats);
  const Batch val_batch = Batch::from_records(val_records, alphabet);

  RunRecord rec;
  rec.automaton = automaton_name;
  rec.automaton_sha256 = automaton_sha256(dba);
  rec.state_count = dba.n_states;
  rec.completion_added_trap = completion_added_trap;
  rec.seed = master;
  rec.train = train;
  rec.eval = eval;
  rec.sampler = sampler;
  rec.val_positive_fraction = val_stats.achieved_positive_fraction;

  double train_pos_frac_sum = 0.0;
  double last_val_acc = 0.0;
  double loss_value = 0.0;
  for (long step = 0; step < train.steps; ++step) {
    BatchStats bstats;
    const auto records = sample_batch(
        dba, train.batch, train.train_min_len, train.train_max_len, sampler,
        derive_seed(master, seeds::kTrainBatch, static_cast<std::uint64_t>(step)),
        &bstats);
    train_pos_frac_sum += bstats.achieved_positive_fraction;
    const Batch batch = Batch::from_records(records, alphabet);
    const ForwardResult fwd = forward(params, batch);
    const LossResult loss = cross_entropy(fwd.logits, batch.labels);
    loss_value = loss.value + train.l2_weight * weight_squared_sum(params);
    const RnnParams grads = backward(params, fwd.trace, loss.d_logits, train.l2_weight);
    amsgrad_step(params, grads, opt, lr_at(step, train));
    if (!params.all_finite())
      throw std::runtime_error("training diverged: non-finite parameters at step " +
                               std::to_string(step));

    const long done = step + 1;
    if (done % eval.validation_interval == 0 || done == train.steps) {
      const auto predicted = predict(params, val_batch);
      last_val_acc = experiment_detail::accuracy_of(predicted, val_batch.labels);
      rec.history.push_back({done, last_val_acc});
    }
    if (progress) progress(done, train.steps, loss_value, last_val_acc);
  }
  rec.final_train_loss = loss_value;
  rec.mean_train_positive_fraction = train_pos_frac_sum / train.steps;

  const std::uint64_t eval_seed =
      eval.seed ? eval.seed : derive_seed(master, seeds::kRangeEval, 0);
  rec.grid = evaluate_range(params, dba, eval, sampler, eval_seed);
  const IdOodSummary summary = summarize_id_ood(rec.grid, train.train_max_len);
  rec.id_accuracy = summary.id_accuracy;
  rec.ood_accuracy = summary.ood_accuracy;
  rec.category = summary.category;
  rec.param_norm = param_l2_norm(params);

  long pos_correct = 0, pos_total = 0, neg_correct = 0, neg_total = 0;
  for (std::size_t i = 0; i < rec.grid.lengths.size(); ++i) {
    pos_correct += rec.grid.pos_correct[i];
    pos_total += rec.grid.pos_total[i];
    neg_correct += rec.grid.neg_correct[i];
    neg_total += rec.grid.neg_total[i];
  }
  rec.pos_accuracy = pos_total ? static_cast<double>(pos_correct) / pos_total : 0.0;
  rec.neg_accuracy = neg_total ? static_cast<double>(neg_correct) / neg_total : 0.0;
  rec.imbalance_flagged =
      std::fabs(rec.val_positive_fraction - sampler.target_positive_fraction) > 0.1 ||
      std::fabs(rec.mean_train_positive_fraction - sampler.target_positive_fraction) >
          0.1;

  TrainResult result;
  result.record = std::move(rec);
  result.params = std::move(params);
  result.opt = std::move(opt);
  return result;
}

// ---- serialization ----

inline nlohmann::ordered_json sampler_config_to_json(const SamplerConfig& c) {
  nlohmann::ordered_json j;
  j["min_len"] = c.min_len;
  j["max_len"] = c.max_len;
  j["target_positive_fraction"] = c.target_positive_fraction;
  j["oversample_factor"] = c.oversample_factor;
  j["max_resample_attempts"] = c.max_resample_attempts;
  j["mode"] = c.mode == SampleMode::balanced ? "balanced" : "uniform";
  return j;
}

inline SamplerConfig sampler_config_from_json(const nlohmann::json& j) {
  SamplerConfig c;
  c.min_len = j.at("min_len").get<int>();
  c.max_len = j.at("max_len").get<int>();
  c.target_positive_fraction = j.at("target_positive_fraction").get<double>();
  c.oversample_factor = j.at("oversample_factor").get<int>();
  c.max_resample_attempts = j.at("max_resample_attempts").get<int>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "balanced") c.mode = SampleMode::balanced;
  else if (mode == "uniform") c.mode = SampleMode::uniform;
  else throw std::runtime_error("unknown sampler mode: " + mode);
  return c;
}

inline nlohmann::ordered_json eval_config_to_json(const EvalConfig& c) {
  nlohmann::ordered_json j;
  j["min_len"] = c.min_len;
  j["max_len"] = c.max_len;
  j["per_length"] = c.per_length;
  j["val_size"] = c.val_size;
  j["val_len"] = c.val_len;
  j["validation_interval"] = c.validation_interval;
  j["seed"] = c.seed;
  return j;
}

inline EvalConfig eval_config_from_json(const nlohmann::json& j) {
  EvalConfig c;
  c.min_len = j.at("min_len").get<int>();
  c.max_len = j.at("max_len").get<int>();
  c.per_length = j.at("per_length").get<int>();
  c.val_size = j.at("val_size").get<int>();
  c.val_len = j.at("val_len").get<int>();
  c.validation_interval = j.at("validation_interval").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

inline nlohmann::ordered_json run_record_to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["format"] = "omega-lab/run/v1";
  j["version"] = kVersion;
  j["automaton"] = r.automaton;
  j["automaton_sha256"] = r.automaton_sha256;
  j["state_count"] = r.state_count;
  j["completion_added_trap"] = r.completion_added_trap;
  j["seed"] = r.seed;
  j["train"] = train_config_to_json(r.train);
  j["sampler"] = sampler_config_to_json(r.sampler);
  j["eval"] = eval_config_to_json(r.eval);
  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (const auto& h : r.history)
    hist.push_back(nlohmann::ordered_json{{"step", h.step}, {"val_accuracy", h.accuracy}});
  j["history"] = hist;
  nlohmann::ordered_json grid;
  grid["lengths"] = r.grid.lengths;
  grid["accuracy"] = r.grid.accuracy;
  grid["positive_fraction"] = r.grid.positive_fraction;
  grid["n_samples"] = r.grid.n_samples;
  grid["pos_correct"] = r.grid.pos_correct;
  grid["pos_total"] = r.grid.pos_total;
  grid["neg_correct"] = r.grid.neg_correct;
  grid["neg_total"] = r.grid.neg_total;
  j["grid"] = grid;
  j["id_accuracy"] = r.id_accuracy;
  j["ood_accuracy"] = r.ood_accuracy;
  j["category"] = category_name(r.category);
  j["param_norm"] = r.param_norm;
  j["final_train_loss"] = r.final_train_loss;
  j["val_positive_fraction"] = r.val_positive_fraction;
  j["mean_train_positive_fraction"] = r.mean_train_positive_fraction;
  j["imbalance_flagged"] = r.imbalance_flagged;
  j["pos_accuracy"] = r.pos_accuracy;
  j["neg_accuracy"] = r.neg_accuracy;
  return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.automaton = j.at("automaton").get<std::string>();
  r.automaton_sha256 = j.at("automaton_sha256").get<std::string>();
  r.state_count = j.at("state_count").get<int>();
  r.completion_added_trap = j.at("completion_added_trap").get<bool>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.train = train_config_from_json(j.at("train"));
  r.train.seed = r.seed;
  r.sampler = sampler_config_from_json(j.at("sampler"));
  r.sampler.seed = r.seed;
  r.eval = eval_config_from_json(j.at("eval"));
  for (const auto& h : j.at("history"))
    r.history.push_back({h.at("step").get<long>(), h.at("val_accuracy").get<double>()});
  const auto& g = j.at("grid");
  r.grid.lengths = g.at("lengths").get<std::vector<int>>();
  r.grid.accuracy = g.at("accuracy").get<std::vector<double>>();
  r.grid.positive_fraction = g.at("positive_fraction").get<std::vector<double>>();
  r.grid.n_samples = g.at("n_samples").get<std::vector<int>>();
  r.grid.pos_correct = g.at("pos_correct").get<std::vector<int>>();
  r.grid.pos_total = g.at("pos_total").get<std::vector<int>>();
  r.grid.neg_correct = g.at("neg_correct").get<std::vector<int>>();
  r.grid.neg_total = g.at("neg_total").get<std::vector<int>>();
  r.id_accuracy = j.at("id_accuracy").get<double>();
  r.ood_accuracy = j.at("ood_accuracy").get<double>();
  const std::string cat = j.at("category").get<std::string>();
  for (Category c : {Category::perfect, Category::near_perfect, Category::good,
                     Category::moderate, Category::poor})
    if (cat == category_name(c)) r.category = c;
  r.param_norm = j.at("param_norm").get<double>();
  r.final_train_loss = j.at("final_train_loss").get<double>();
  r.val_positive_fraction = j.at("val_positive_fraction").get<double>();
  r.mean_train_positive_fraction = j.at("mean_train_positive_fraction").get<double>();
  r.imbalance_flagged = j.at("imbalance_flagged").get<bool>();
  r.pos_accuracy = j.at("pos_accuracy").get<double>();
  r.neg_accuracy = j.at("neg_accuracy").get<double>();
  return r;
}

inline void write_grid_csv(std::ostream& out, const EvalGrid& grid) {
  out << "length,n_samples,accuracy,positive_fraction\n";
  char buf[64];
  for (std::size_t i = 0; i < grid.lengths.size(); ++i) {
    out << grid.lengths[i] << "," << grid.n_samples[i] << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", grid.accuracy[i]);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", grid.positive_fraction[i]);
    out << buf << "\n";
  }
}

// ---- cross-run correlation ----

struct CorrelationReport {
  CorrelationResult states_vs_ood;
  CorrelationResult states_vs_norm;
};

// The two RQ2-style analyses over a set of runs.
inline CorrelationReport correlate_runs(const std::vector<RunRecord>& runs) {
  if (runs.size() < 3)
    throw std::invalid_argument("correlate_runs: need at least 3 runs");
  std::vector<double> states, ood, norm;
  for (const auto& r : runs) {
    states.push_back(static_cast<double>(r.state_count));
    ood.push_back(r.ood_accuracy);
    norm.push_back(r.param_norm);
  }
  CorrelationReport rep;
  rep.states_vs_ood = pearson(states, ood);
  rep.states_vs_norm = pearson(states, norm);
  return rep;
}

inline void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << "automaton,state_count,id_accuracy,ood_accuracy,param_norm,category\n";
  char buf[64];
  for (const auto& r : runs) {
    out << r.automaton << "," << r.state_count << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", r.id_accuracy);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", r.ood_accuracy);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.10g", r.param_norm);
    out << buf << "," << category_name(r.category) << "\n";
  }
}

}  // namespace omegalab
