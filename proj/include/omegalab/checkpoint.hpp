#pragma once

// Model checkpoints as JSON: training config, step counter, flattened
// parameter arrays (row-major, in the order w_in, w_rec, b_h, w_out,
// b_out), optimizer moments in the same layout, and the master seed from
// which every random stream is re-derived.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>  // vendored nlohmann/json

#include "omegalab/optimizer.hpp"
#include "omegalab/rnn.hpp"
#include "omegalab/version.hpp"

namespace omegalab {

inline constexpr const char* kCheckpointFormat = "omega-lab/checkpoint/v1";

namespace checkpoint_detail {

inline std::vector<double> flatten_row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

inline std::vector<double> flatten(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

inline void unflatten_row_major(const std::vector<double>& xs, Eigen::MatrixXd& m) {
  if (static_cast<Eigen::Index>(xs.size()) != m.size())
    throw std::runtime_error("checkpoint: parameter array size mismatch");
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = xs[i++];
}

inline void unflatten(const std::vector<double>& xs, Eigen::VectorXd& v) {
  if (static_cast<Eigen::Index>(xs.size()) != v.size())
    throw std::runtime_error("checkpoint: parameter array size mismatch");
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = xs[static_cast<std::size_t>(i)];
}

inline nlohmann::ordered_json params_to_json(const RnnParams& p) {
  nlohmann::ordered_json j;
  j["w_in"] = flatten_row_major(p.w_in);
  j["w_rec"] = flatten_row_major(p.w_rec);
  j["b_h"] = flatten(p.b_h);
  j["w_out"] = flatten_row_major(p.w_out);
  j["b_out"] = flatten(p.b_out);
  return j;
}

inline RnnParams params_from_json(const nlohmann::json& j, int alphabet_size,
                                  int hidden) {
  RnnParams p = zero_params(alphabet_size, hidden);
  unflatten_row_major(j.at("w_in").get<std::vector<double>>(), p.w_in);
  unflatten_row_major(j.at("w_rec").get<std::vector<double>>(), p.w_rec);
  unflatten(j.at("b_h").get<std::vector<double>>(), p.b_h);
  unflatten_row_major(j.at("w_out").get<std::vector<double>>(), p.w_out);
  unflatten(j.at("b_out").get<std::vector<double>>(), p.b_out);
  return p;
}

}  // namespace checkpoint_detail

struct Checkpoint {
  TrainConfig train;
  int alphabet_size = 0;
  long step = 0;
  RnnParams params;
  AmsgradState opt;
  std::uint64_t master_seed = 0;
};

inline nlohmann::ordered_json train_config_to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["hidden"] = c.hidden;
  j["batch"] = c.batch;
  j["steps"] = c.steps;
  j["lr_peak"] = c.lr_peak;
  j["lr_start"] = c.lr_start;
  j["warmup_fraction"] = c.warmup_fraction;
  j["l2_weight"] = c.l2_weight;
  j["min_len"] = c.train_min_len;
  j["max_len"] = c.train_max_len;
  j["beta1"] = c.optimizer.beta1;
  j["beta2"] = c.optimizer.beta2;
  j["epsilon"] = c.optimizer.epsilon;
  return j;
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.hidden = j.at("hidden").get<int>();
  c.batch = j.at("batch").get<int>();
  c.steps = j.at("steps").get<long>();
  c.lr_peak = j.at("lr_peak").get<double>();
  c.lr_start = j.at("lr_start").get<double>();
  c.warmup_fraction = j.at("warmup_fraction").get<double>();
  c.l2_weight = j.at("l2_weight").get<double>();
  c.train_min_len = j.at("min_len").get<int>();
  c.train_max_len = j.at("max_len").get<int>();
  c.optimizer.beta1 = j.at("beta1").get<double>();
  c.optimizer.beta2 = j.at("beta2").get<double>();
  c.optimizer.epsilon = j.at("epsilon").get<double>();
  return c;
}

inline nlohmann::ordered_json checkpoint_to_json(const Checkpoint& ck) {
  using namespace checkpoint_detail;
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kVersion;
  j["train"] = train_config_to_json(ck.train);
  j["alphabet_size"] = ck.alphabet_size;
  j["step"] = ck.step;
  j["params"] = params_to_json(ck.params);
  j["optimizer"] = nlohmann::ordered_json{{"t", ck.opt.t},
                                          {"m", params_to_json(ck.opt.m)},
                                          {"v", params_to_json(ck.opt.v)},
                                          {"v_hat", params_to_json(ck.opt.v_hat)}};
  j["rng"] = nlohmann::ordered_json{{"scheme", "splitmix64-substreams"},
                                    {"master_seed", ck.master_seed}};
  return j;
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  using namespace checkpoint_detail;
  if (j.at("format").get<std::string>() != kCheckpointFormat)
    throw std::runtime_error("unsupported checkpoint format: " +
                             j.at("format").get<std::string>());
  Checkpoint ck;
  ck.train = train_config_from_json(j.at("train"));
  ck.train.seed = j.at("rng").at("master_seed").get<std::uint64_t>();
  ck.alphabet_size = j.at("alphabet_size").get<int>();
  ck.step = j.at("step").get<long>();
  ck.params = params_from_json(j.at("params"), ck.alphabet_size, ck.train.hidden);
  ck.opt = AmsgradState::init(ck.params, ck.train.optimizer);
  ck.opt.t = j.at("optimizer").at("t").get<long>();
  ck.opt.m = params_from_json(j.at("optimizer").at("m"), ck.alphabet_size, ck.train.hidden);
  ck.opt.v = params_from_json(j.at("optimizer").at("v"), ck.alphabet_size, ck.train.hidden);
  ck.opt.v_hat =
      params_from_json(j.at("optimizer").at("v_hat"), ck.alphabet_size, ck.train.hidden);
  ck.master_seed = j.at("rng").at("master_seed").get<std::uint64_t>();
  return ck;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << checkpoint_to_json(ck).dump(2) << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  return checkpoint_from_json(j);
}

}  // namespace omegalab
