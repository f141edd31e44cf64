// omega-lab: reproducible pipeline from deterministic Buchi automata to
// trained recurrent recognizers.
//
// Subcommands: inspect, sample, label, train, eval, correlate, report.
// Automata come from HOA v1 files or built-in fixtures (fixture:NAME).
// Commands accept a JSON config file (--config) whose values individual
// flags override; unknown config keys are rejected. Primary outputs are
// byte-deterministic for a given config and seed; timestamps live only in
// the run.log sidecar. Exit codes: 0 ok, 1 runtime failure, 2 bad
// input/config.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "omegalab/acceptance.hpp"
#include "omegalab/automaton.hpp"
#include "omegalab/checkpoint.hpp"
#include "omegalab/dataset_io.hpp"
#include "omegalab/experiment.hpp"
#include "omegalab/fixtures.hpp"
#include "omegalab/hoa.hpp"
#include "omegalab/plot.hpp"
#include "omegalab/sampling.hpp"
#include "omegalab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedAutomaton {
  std::string name;       // fixture name or file stem
  std::string source;     // as given on the command line
  omegalab::Dba dba;      // completed
  omegalab::Dba as_read;  // before completion
  bool completion_added_trap = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedAutomaton load_automaton(const std::string& source) {
  LoadedAutomaton out;
  out.source = source;
  if (source.rfind("fixture:", 0) == 0) {
    out.name = source.substr(8);
    auto dba = omegalab::find_fixture(out.name);
    if (!dba) throw ConfigError("unknown fixture: " + out.name);
    out.as_read = *dba;
  } else {
    out.name = fs::path(source).stem().string();
    const std::string text = read_file(source);
    try {
      out.as_read = omegalab::validate_dba(omegalab::parse_hoa(text));
    } catch (const omegalab::HoaError& e) {
      throw omegalab::HoaError(source + ":" + std::to_string(e.line) + ":" +
                                   std::to_string(e.col) + ": " + e.what(),
                               e.line, e.col);
    }
  }
  out.dba = omegalab::complete(out.as_read);
  out.completion_added_trap = out.dba.n_states != out.as_read.n_states;
  return out;
}

// Strict helpers: every key must be known, every known key type-checked.
void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown config key '" + it.key() + "' in " + where);
  }
}

struct RunConfig {
  std::string automaton;
  std::string out_dir = "runs";
  std::uint64_t seed = 1;
  omegalab::SamplerConfig sampler;
  omegalab::TrainConfig train;
  omegalab::EvalConfig eval;
};

RunConfig parse_run_config(const json& j) {
  require_keys(j, {"version", "automaton", "out_dir", "seed", "sampler", "train", "eval"},
               "config");
  RunConfig c;
  if (j.contains("version") && j.at("version").get<int>() != 1)
    throw ConfigError("unsupported config version");
  if (j.contains("automaton")) c.automaton = j.at("automaton").get<std::string>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    require_keys(s,
                 {"min_len", "max_len", "target_positive_fraction", "oversample_factor",
                  "max_resample_attempts", "mode"},
                 "config.sampler");
    if (s.contains("min_len")) c.sampler.min_len = s.at("min_len").get<int>();
    if (s.contains("max_len")) c.sampler.max_len = s.at("max_len").get<int>();
    if (s.contains("target_positive_fraction"))
      c.sampler.target_positive_fraction = s.at("target_positive_fraction").get<double>();
    if (s.contains("oversample_factor"))
      c.sampler.oversample_factor = s.at("oversample_factor").get<int>();
    if (s.contains("max_resample_attempts"))
      c.sampler.max_resample_attempts = s.at("max_resample_attempts").get<int>();
    if (s.contains("mode")) {
      const std::string m = s.at("mode").get<std::string>();
      if (m == "balanced") c.sampler.mode = omegalab::SampleMode::balanced;
      else if (m == "uniform") c.sampler.mode = omegalab::SampleMode::uniform;
      else throw ConfigError("sampler.mode must be 'balanced' or 'uniform'");
    }
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    require_keys(t,
                 {"hidden", "batch", "steps", "lr_peak", "lr_start", "warmup_fraction",
                  "l2_weight", "min_len", "max_len", "beta1", "beta2", "epsilon"},
                 "config.train");
    if (t.contains("hidden")) c.train.hidden = t.at("hidden").get<int>();
    if (t.contains("batch")) c.train.batch = t.at("batch").get<int>();
    if (t.contains("steps")) c.train.steps = t.at("steps").get<long>();
    if (t.contains("lr_peak")) c.train.lr_peak = t.at("lr_peak").get<double>();
    if (t.contains("lr_start")) c.train.lr_start = t.at("lr_start").get<double>();
    if (t.contains("warmup_fraction"))
      c.train.warmup_fraction = t.at("warmup_fraction").get<double>();
    if (t.contains("l2_weight")) c.train.l2_weight = t.at("l2_weight").get<double>();
    if (t.contains("min_len")) c.train.train_min_len = t.at("min_len").get<int>();
    if (t.contains("max_len")) c.train.train_max_len = t.at("max_len").get<int>();
    if (t.contains("beta1")) c.train.optimizer.beta1 = t.at("beta1").get<double>();
    if (t.contains("beta2")) c.train.optimizer.beta2 = t.at("beta2").get<double>();
    if (t.contains("epsilon")) c.train.optimizer.epsilon = t.at("epsilon").get<double>();
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    require_keys(e,
                 {"min_len", "max_len", "per_length", "val_size", "val_len",
                  "validation_interval", "seed"},
                 "config.eval");
    if (e.contains("min_len")) c.eval.min_len = e.at("min_len").get<int>();
    if (e.contains("max_len")) c.eval.max_len = e.at("max_len").get<int>();
    if (e.contains("per_length")) c.eval.per_length = e.at("per_length").get<int>();
    if (e.contains("val_size")) c.eval.val_size = e.at("val_size").get<int>();
    if (e.contains("val_len")) c.eval.val_len = e.at("val_len").get<int>();
    if (e.contains("validation_interval"))
      c.eval.validation_interval = e.at("validation_interval").get<int>();
    if (e.contains("seed")) c.eval.seed = e.at("seed").get<std::uint64_t>();
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return parse_run_config(j);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

// ---- subcommand bodies ----

int cmd_inspect(const std::string& source) {
  const auto loaded = load_automaton(source);
  const auto& dba = loaded.as_read;
  const auto sinks = omegalab::classify_sinks(dba);
  int accepting = 0, acc_sinks = 0, rej_sinks = 0;
  for (int q = 0; q < dba.n_states; ++q) {
    accepting += dba.is_accepting(q) ? 1 : 0;
    acc_sinks += sinks[static_cast<std::size_t>(q)] == omegalab::SinkClass::accepting_sink;
    rej_sinks += sinks[static_cast<std::size_t>(q)] == omegalab::SinkClass::rejecting_sink;
  }
  std::cout << "automaton: " << loaded.name << "\n";
  std::cout << "states: " << dba.n_states << "\n";
  std::cout << "initial: " << dba.initial << "\n";
  std::cout << "propositions: " << dba.ap_names.size();
  for (const auto& ap : dba.ap_names) std::cout << " " << ap;
  std::cout << "\n";
  std::cout << "alphabet_size: " << dba.alphabet().size() << "\n";
  std::cout << "accepting_states: " << accepting << "\n";
  std::cout << "accepting_sinks: " << acc_sinks << "\n";
  std::cout << "rejecting_sinks: " << rej_sinks << "\n";
  std::cout << "complete: " << (dba.is_complete() ? "yes" : "no") << "\n";
  std::cout << "sha256: " << omegalab::automaton_sha256(omegalab::complete(dba)) << "\n";
  return 0;
}

int cmd_sample(const RunConfig& cfg, int count, const std::string& out_path) {
  const auto loaded = load_automaton(cfg.automaton);
  omegalab::SamplerConfig sampler = cfg.sampler;
  sampler.seed = cfg.seed;
  sampler.check();
  omegalab::BatchStats stats;
  const auto records =
      omegalab::sample_batch(loaded.dba, count, sampler.min_len, sampler.max_len,
                             sampler, sampler.seed, &stats);
  const auto header = omegalab::make_dataset_header(loaded.dba, sampler.seed);
  omegalab::write_dataset_file(out_path, header, records);
  std::cout << "wrote " << records.size() << " records to " << out_path
            << " (positive fraction "
            << stats.achieved_positive_fraction << ", dead ends " << stats.dead_ends
            << ")\n";
  return 0;
}

int cmd_label(const std::string& automaton_src, const std::string& in_path,
              const std::string& out_path, const std::string& method_name, bool negate) {
  const auto loaded = load_automaton(automaton_src);
  omegalab::AcceptMethod method;
  if (method_name == "iterate") method = omegalab::AcceptMethod::iterate;
  else if (method_name == "matexp") method = omegalab::AcceptMethod::matexp;
  else if (method_name == "brute") method = omegalab::AcceptMethod::brute;
  else throw ConfigError("unknown --method: " + method_name);

  auto ds = omegalab::read_dataset_file(in_path);
  const std::string sha = omegalab::automaton_sha256(loaded.dba);
  if (ds.header.automaton_sha256 != sha)
    throw ConfigError("dataset was generated from a different automaton (sha256 " +
                      ds.header.automaton_sha256 + " != " + sha + ")");
  for (auto& r : ds.records) {
    const bool accepted =
        omegalab::accept_word(loaded.dba, omegalab::UpWord{r.u, r.v}, method);
    r.label = negate ? !accepted : accepted;
  }
  omegalab::write_dataset_file(out_path, ds.header, ds.records);
  std::cout << "labeled " << ds.records.size() << " records with method "
            << method_name << (negate ? " (negated)" : "") << " -> " << out_path << "\n";
  return 0;
}

fs::path run_output_dir(const RunConfig& cfg, const std::string& name) {
  return fs::path(cfg.out_dir) / name / std::to_string(cfg.seed);
}

void write_run_plots(const fs::path& dir, const omegalab::RunRecord& rec) {
  omegalab::PlotSeries val;
  val.name = rec.automaton;
  for (const auto& h : rec.history) {
    val.x.push_back(static_cast<double>(h.step));
    val.y.push_back(h.accuracy);
  }
  omegalab::write_svg_line_chart((dir / "validation.svg").string(),
                                 "validation accuracy", "step", "accuracy", {val});
  omegalab::PlotSeries range;
  range.name = rec.automaton;
  for (std::size_t i = 0; i < rec.grid.lengths.size(); ++i) {
    range.x.push_back(rec.grid.lengths[i]);
    range.y.push_back(rec.grid.accuracy[i]);
  }
  omegalab::write_svg_line_chart((dir / "range.svg").string(), "range evaluation",
                                 "sequence length", "accuracy", {range});
}

int cmd_train(const RunConfig& cfg) {
  const auto loaded = load_automaton(cfg.automaton);
  omegalab::TrainConfig train = cfg.train;
  train.seed = cfg.seed;
  omegalab::SamplerConfig sampler = cfg.sampler;
  sampler.seed = cfg.seed;

  const fs::path dir = run_output_dir(cfg, loaded.name);
  fs::create_directories(dir);
  std::ofstream log(dir / "run.log", std::ios::binary);
  log << timestamp_now() << " start automaton=" << loaded.source
      << " states=" << loaded.dba.n_states << " seed=" << cfg.seed
      << " version=" << omegalab::kVersion << "\n";
  const auto t0 = std::chrono::steady_clock::now();

  long last_logged = 0;
  auto progress = [&](long step, long total, double loss, double val_acc) {
    if (step - last_logged >= std::max(1L, total / 20) || step == total) {
      last_logged = step;
      log << timestamp_now() << " step " << step << "/" << total << " loss " << loss
          << " val_acc " << val_acc << "\n";
      log.flush();
    }
  };

  auto result = omegalab::train_run(loaded.dba, loaded.name, train, cfg.eval, sampler,
                                    loaded.completion_added_trap, progress);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log << timestamp_now() << " done wall_seconds=" << wall << "\n";

  write_text_file((dir / "run.json").string(),
                  omegalab::run_record_to_json(result.record).dump(2) + "\n");
  omegalab::Checkpoint ck;
  ck.train = train;
  ck.alphabet_size = static_cast<int>(loaded.dba.alphabet().size());
  ck.step = train.steps;
  ck.params = result.params;
  ck.opt = result.opt;
  ck.master_seed = cfg.seed;
  omegalab::save_checkpoint((dir / "checkpoint.json").string(), ck);
  {
    std::ofstream csv(dir / "range.csv", std::ios::binary);
    omegalab::write_grid_csv(csv, result.record.grid);
  }
  write_run_plots(dir, result.record);

  std::cout << "automaton " << loaded.name << ": id_accuracy "
            << result.record.id_accuracy << ", ood_accuracy "
            << result.record.ood_accuracy << " ("
            << omegalab::category_name(result.record.category) << "), param_norm "
            << result.record.param_norm << "\n";
  std::cout << "run dir: " << dir.string() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path,
             const std::string& out_dir) {
  const auto loaded = load_automaton(cfg.automaton);
  const auto ck = omegalab::load_checkpoint(checkpoint_path);
  if (ck.alphabet_size != static_cast<int>(loaded.dba.alphabet().size()))
    throw ConfigError("checkpoint alphabet size does not match the automaton");
  omegalab::SamplerConfig sampler = cfg.sampler;
  sampler.seed = cfg.seed;
  omegalab::EvalConfig eval = cfg.eval;
  const std::uint64_t eval_seed =
      eval.seed ? eval.seed : omegalab::derive_seed(cfg.seed, omegalab::seeds::kRangeEval, 0);
  const auto grid = omegalab::evaluate_range(ck.params, loaded.dba, eval, sampler, eval_seed);
  const auto summary = omegalab::summarize_id_ood(grid, ck.train.train_max_len);

  fs::create_directories(out_dir);
  {
    std::ofstream csv(fs::path(out_dir) / "range.csv", std::ios::binary);
    omegalab::write_grid_csv(csv, grid);
  }
  omegalab::PlotSeries range;
  range.name = loaded.name;
  for (std::size_t i = 0; i < grid.lengths.size(); ++i) {
    range.x.push_back(grid.lengths[i]);
    range.y.push_back(grid.accuracy[i]);
  }
  omegalab::write_svg_line_chart((fs::path(out_dir) / "range.svg").string(),
                                 "range evaluation", "sequence length", "accuracy",
                                 {range});
  std::cout << "id_accuracy " << summary.id_accuracy << ", ood_accuracy "
            << summary.ood_accuracy << " ("
            << omegalab::category_name(summary.category) << ")\n";
  return 0;
}

int cmd_correlate(const std::vector<std::string>& run_files, const std::string& out_dir) {
  std::vector<omegalab::RunRecord> runs;
  for (const auto& path : run_files)
    runs.push_back(omegalab::run_record_from_json(json::parse(read_file(path))));
  const auto report = omegalab::correlate_runs(runs);

  fs::create_directories(out_dir);
  {
    std::ofstream csv(fs::path(out_dir) / "runs.csv", std::ios::binary);
    omegalab::write_runs_csv(csv, runs);
  }
  omegalab::PlotSeries ood, norm;
  ood.name = "runs";
  norm.name = "runs";
  for (const auto& r : runs) {
    ood.x.push_back(r.state_count);
    ood.y.push_back(r.ood_accuracy);
    norm.x.push_back(r.state_count);
    norm.y.push_back(r.param_norm);
  }
  omegalab::write_svg_scatter((fs::path(out_dir) / "states_vs_ood.svg").string(),
                              "states vs OOD accuracy", "state count", "OOD accuracy",
                              {ood});
  omegalab::write_svg_scatter((fs::path(out_dir) / "states_vs_norm.svg").string(),
                              "states vs parameter norm", "state count",
                              "parameter L2 norm", {norm});
  char buf[256];
  std::snprintf(buf, sizeof(buf), "states_vs_ood: r=%.6g p=%.6g n=%d\n",
                report.states_vs_ood.r, report.states_vs_ood.p, report.states_vs_ood.n);
  std::cout << buf;
  std::snprintf(buf, sizeof(buf), "states_vs_norm: r=%.6g p=%.6g n=%d\n",
                report.states_vs_norm.r, report.states_vs_norm.p,
                report.states_vs_norm.n);
  std::cout << buf;
  {
    nlohmann::ordered_json j;
    j["states_vs_ood"] = {{"r", report.states_vs_ood.r},
                          {"p", report.states_vs_ood.p},
                          {"n", report.states_vs_ood.n}};
    j["states_vs_norm"] = {{"r", report.states_vs_norm.r},
                           {"p", report.states_vs_norm.p},
                           {"n", report.states_vs_norm.n}};
    write_text_file((fs::path(out_dir) / "correlations.json").string(),
                    j.dump(2) + "\n");
  }
  return 0;
}

int cmd_report(const std::string& run_file, const std::string& out_dir) {
  const auto rec = omegalab::run_record_from_json(json::parse(read_file(run_file)));
  fs::create_directories(out_dir);
  {
    std::ofstream csv(fs::path(out_dir) / "range.csv", std::ios::binary);
    omegalab::write_grid_csv(csv, rec.grid);
  }
  write_run_plots(out_dir, rec);
  std::cout << "automaton " << rec.automaton << " (" << rec.state_count << " states)\n";
  std::cout << "id_accuracy " << rec.id_accuracy << "\n";
  std::cout << "ood_accuracy " << rec.ood_accuracy << " ("
            << omegalab::category_name(rec.category) << ")\n";
  std::cout << "param_norm " << rec.param_norm << "\n";
  if (rec.imbalance_flagged)
    std::cout << "imbalance flagged: pos_accuracy " << rec.pos_accuracy
              << ", neg_accuracy " << rec.neg_accuracy << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"omega-lab: DBA acceptance, sampling and RNN generalization pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(omegalab::kVersion));

  std::string config_path;
  std::string automaton;
  std::uint64_t seed = 0;
  bool seed_set = false, automaton_set = false;

  const std::string config_footer =
      "Config file keys (JSON; flags override file values):\n"
      "  top level: version, automaton, out_dir, seed\n"
      "  sampler:   min_len, max_len, target_positive_fraction, oversample_factor,\n"
      "             max_resample_attempts, mode (balanced|uniform)\n"
      "  train:     hidden, batch, steps, lr_peak, lr_start, warmup_fraction,\n"
      "             l2_weight, min_len, max_len, beta1, beta2, epsilon\n"
      "  eval:      min_len, max_len, per_length, val_size, val_len,\n"
      "             validation_interval, seed\n"
      "Unknown keys are rejected. OMEGA_LAB_THREADS caps internal parallelism.";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    sub->add_option("--automaton", automaton, "HOA file or fixture:NAME")
        ->each([&](const std::string&) { automaton_set = true; });
    sub->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->footer(config_footer);
  };

  // inspect
  auto* inspect = app.add_subcommand("inspect", "print structural facts of an automaton");
  std::string inspect_source;
  inspect->add_option("automaton", inspect_source, "HOA file or fixture:NAME")
      ->required();

  // sample
  auto* sample = app.add_subcommand("sample", "write a JSONL dataset of labeled UP words");
  add_common(sample);
  int sample_count = 1024;
  int sample_min_len = -1, sample_max_len = -1;
  std::string sample_mode, sample_out = "dataset.jsonl";
  sample->add_option("--count", sample_count, "number of records");
  sample->add_option("--min-len", sample_min_len, "minimum encoded length");
  sample->add_option("--max-len", sample_max_len, "maximum encoded length");
  sample->add_option("--mode", sample_mode, "balanced|uniform");
  sample->add_option("--out", sample_out, "output path");

  // label
  auto* label = app.add_subcommand("label", "fill dataset labels via an acceptance method");
  add_common(label);
  std::string label_in, label_out, label_method = "iterate";
  bool label_negate = false;
  label->add_option("--in", label_in, "input dataset (JSONL)")->required();
  label->add_option("--out", label_out, "output dataset (JSONL)")->required();
  label->add_option("--method", label_method, "iterate|matexp|brute");
  label->add_flag("--negate", label_negate, "flip emitted labels");

  // train
  auto* train = app.add_subcommand("train", "train a recognizer and evaluate its range");
  add_common(train);
  std::string train_out_dir;
  int train_hidden = -1, train_batch = -1;
  long train_steps = -1;
  int train_min_len = -1, train_max_len = -1;
  int eval_max_len = -1, eval_per_length = -1, eval_val_interval = -1;
  std::vector<std::uint64_t> train_seeds;
  train->add_option("--seeds", train_seeds,
                    "run once per seed, reported separately (overrides --seed)")
      ->delimiter(',');
  train->add_option("--out-dir", train_out_dir, "output root (default runs)");
  train->add_option("--hidden", train_hidden, "hidden dimension");
  train->add_option("--batch", train_batch, "batch size");
  train->add_option("--steps", train_steps, "optimizer steps");
  train->add_option("--train-min-len", train_min_len, "training min length");
  train->add_option("--train-max-len", train_max_len, "training max length");
  train->add_option("--eval-max-len", eval_max_len, "range evaluation max length");
  train->add_option("--eval-per-length", eval_per_length, "sequences per test length");
  train->add_option("--validation-interval", eval_val_interval, "steps between validations");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "range-evaluate a saved checkpoint");
  add_common(eval_cmd);
  std::string eval_checkpoint, eval_out_dir = "reports";
  int eval_cmd_max_len = -1, eval_cmd_per_length = -1;
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint.json path")->required();
  eval_cmd->add_option("--out-dir", eval_out_dir, "output directory");
  eval_cmd->add_option("--eval-max-len", eval_cmd_max_len, "range evaluation max length");
  eval_cmd->add_option("--eval-per-length", eval_cmd_per_length, "sequences per test length");

  // correlate
  auto* correlate = app.add_subcommand("correlate", "Pearson analyses across run records");
  std::vector<std::string> correlate_runs_files;
  std::string correlate_out_dir = "reports";
  correlate->add_option("--run", correlate_runs_files, "run.json files (repeatable, >= 3)")
      ->required();
  correlate->add_option("--out-dir", correlate_out_dir, "output directory");

  // report
  auto* report = app.add_subcommand("report", "re-render plots and summary from a run record");
  std::string report_run, report_out_dir = "reports";
  report->add_option("--run", report_run, "run.json file")->required();
  report->add_option("--out-dir", report_out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (automaton_set) cfg.automaton = automaton;
    if (seed_set) cfg.seed = seed;

    if (inspect->parsed()) return cmd_inspect(inspect_source);

    if (sample->parsed()) {
      if (cfg.automaton.empty()) throw ConfigError("sample: --automaton required");
      if (sample_min_len >= 0) cfg.sampler.min_len = sample_min_len;
      if (sample_max_len >= 0) cfg.sampler.max_len = sample_max_len;
      if (!sample_mode.empty()) {
        if (sample_mode == "balanced") cfg.sampler.mode = omegalab::SampleMode::balanced;
        else if (sample_mode == "uniform") cfg.sampler.mode = omegalab::SampleMode::uniform;
        else throw ConfigError("--mode must be balanced or uniform");
      }
      return cmd_sample(cfg, sample_count, sample_out);
    }

    if (label->parsed()) {
      if (cfg.automaton.empty()) throw ConfigError("label: --automaton required");
      return cmd_label(cfg.automaton, label_in, label_out, label_method, label_negate);
    }

    if (train->parsed()) {
      if (cfg.automaton.empty()) throw ConfigError("train: --automaton required");
      if (!train_out_dir.empty()) cfg.out_dir = train_out_dir;
      if (train_hidden >= 0) cfg.train.hidden = train_hidden;
      if (train_batch >= 0) cfg.train.batch = train_batch;
      if (train_steps >= 0) cfg.train.steps = train_steps;
      if (train_min_len >= 0) cfg.train.train_min_len = train_min_len;
      if (train_max_len >= 0) cfg.train.train_max_len = train_max_len;
      if (eval_max_len >= 0) cfg.eval.max_len = eval_max_len;
      if (eval_per_length >= 0) cfg.eval.per_length = eval_per_length;
      if (eval_val_interval >= 0) cfg.eval.validation_interval = eval_val_interval;
      // One run per seed, reported separately.
      if (train_seeds.empty()) return cmd_train(cfg);
      for (std::uint64_t s : train_seeds) {
        cfg.seed = s;
        std::cout << "seed " << s << ":\n";
        const int rc = cmd_train(cfg);
        if (rc != 0) return rc;
      }
      return 0;
    }

    if (eval_cmd->parsed()) {
      if (cfg.automaton.empty()) throw ConfigError("eval: --automaton required");
      if (eval_cmd_max_len >= 0) cfg.eval.max_len = eval_cmd_max_len;
      if (eval_cmd_per_length >= 0) cfg.eval.per_length = eval_cmd_per_length;
      return cmd_eval(cfg, eval_checkpoint, eval_out_dir);
    }

    if (correlate->parsed()) return cmd_correlate(correlate_runs_files, correlate_out_dir);
    if (report->parsed()) return cmd_report(report_run, report_out_dir);

    std::cerr << "no subcommand\n";
    return 2;
  } catch (const omegalab::HoaError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const omegalab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
