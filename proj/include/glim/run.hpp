#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "glim/autoencoder.hpp"
#include "glim/composition.hpp"
#include "glim/evaluation.hpp"
#include "glim/kb.hpp"
#include "glim/serialize.hpp"
#include "glim/training.hpp"
#include "glim/types.hpp"

namespace glim {

// Everything a subcommand needs: dataset paths, hyperparameters, and the
// output layout (out_dir/model.bin, train.log.tsv, eval.tsv, analysis/).
struct RunConfig {
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string model_path;  // defaults to out_dir/model.bin
  std::string out_dir = ".";
  TrainConfig train;
  bool drop_oov = false;
  bool dump_ranks = false;
  std::string analyze_kind;

  std::string model_file() const {
    return model_path.empty() ? (std::filesystem::path(out_dir) / "model.bin").string()
                              : model_path;
  }
};

// Applies one "key=value" config entry. Returns false for unknown keys so
// callers can decide whether to reject or ignore them.
inline bool apply_config_entry(RunConfig& rc, const std::string& key, const std::string& value) {
  auto to_bool = [&](const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error("config: boolean expected for '" + key + "', got '" + v + "'");
  };
  if (key == "train") rc.train_path = value;
  else if (key == "valid") rc.valid_path = value;
  else if (key == "test") rc.test_path = value;
  else if (key == "model") rc.model_path = value;
  else if (key == "out-dir") rc.out_dir = value;
  else if (key == "d") rc.train.d = std::stoi(value);
  else if (key == "c") rc.train.c = std::stoi(value);
  else if (key == "eta1") rc.train.eta1 = std::stod(value);
  else if (key == "eta2") rc.train.eta2 = std::stod(value);
  else if (key == "lambda1") rc.train.lambda1 = std::stod(value);
  else if (key == "lambda2") rc.train.lambda2 = std::stod(value);
  else if (key == "k") rc.train.k = std::stoi(value);
  else if (key == "k-recon") rc.train.k_recon = std::stoi(value);
  else if (key == "rho") rc.train.rho = std::stod(value);
  else if (key == "batch-size") rc.train.batch_size = std::stoi(value);
  else if (key == "joint") rc.train.joint = to_bool(value);
  else if (key == "comp") rc.train.compositional = to_bool(value);
  else if (key == "poisson-mean") rc.train.poisson_mean = std::stod(value);
  else if (key == "max-epochs") rc.train.max_epochs = std::stoi(value);
  else if (key == "eval-every") rc.train.eval_every = std::stoi(value);
  else if (key == "patience") rc.train.patience = std::stoi(value);
  else if (key == "seed") rc.train.seed = std::stoull(value);
  else if (key == "threads") rc.train.threads = std::stoi(value);
  else if (key == "normalize") rc.train.normalize = to_bool(value);
  else if (key == "pure-gaussian") rc.train.pure_gaussian = to_bool(value);
  else if (key == "unigram-noise") rc.train.unigram_noise = to_bool(value);
  else if (key == "drop-oov") rc.drop_oov = to_bool(value);
  else if (key == "dump-ranks") rc.dump_ranks = to_bool(value);
  else return false;
  return true;
}

// Flat "key=value" file with '#' comments and blank lines.
inline void load_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t");
    line = line.substr(begin, end - begin + 1);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value, got '" + line + "'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (value.empty()) continue;  // unset keys are dumped as empty
    if (!apply_config_entry(rc, key, value))
      throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
  }
}

namespace detail {

inline void require_readable(const std::string& path, const char* what) {
  if (path.empty()) throw std::runtime_error(std::string(what) + " path is required");
  if (!std::filesystem::exists(path))
    throw std::runtime_error(std::string(what) + " path does not exist: " + path);
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Flat key=value dump of the effective configuration; re-running from this
// file reproduces the run.
inline void write_effective_config(const RunConfig& rc, const std::string& path) {
  std::ofstream out(path);
  out << "# effective configuration\n";
  out << "train=" << rc.train_path << "\n";
  out << "valid=" << rc.valid_path << "\n";
  out << "test=" << rc.test_path << "\n";
  out << "out-dir=" << rc.out_dir << "\n";
  if (!rc.model_path.empty()) out << "model=" << rc.model_path << "\n";
  out << "d=" << rc.train.d << "\n";
  out << "c=" << rc.train.c << "\n";
  out << "eta1=" << format_double(rc.train.eta1) << "\n";
  out << "eta2=" << format_double(rc.train.eta2) << "\n";
  out << "lambda1=" << format_double(rc.train.lambda1) << "\n";
  out << "lambda2=" << format_double(rc.train.lambda2) << "\n";
  out << "k=" << rc.train.k << "\n";
  out << "k-recon=" << rc.train.k_recon << "\n";
  out << "rho=" << format_double(rc.train.rho) << "\n";
  out << "batch-size=" << rc.train.batch_size << "\n";
  out << "joint=" << (rc.train.joint ? "true" : "false") << "\n";
  out << "comp=" << (rc.train.compositional ? "true" : "false") << "\n";
  out << "poisson-mean=" << format_double(rc.train.poisson_mean) << "\n";
  out << "max-epochs=" << rc.train.max_epochs << "\n";
  out << "eval-every=" << rc.train.eval_every << "\n";
  out << "patience=" << rc.train.patience << "\n";
  out << "seed=" << rc.train.seed << "\n";
  out << "threads=" << rc.train.threads << "\n";
  out << "normalize=" << (rc.train.normalize ? "true" : "false") << "\n";
  out << "pure-gaussian=" << (rc.train.pure_gaussian ? "true" : "false") << "\n";
  out << "unigram-noise=" << (rc.train.unigram_noise ? "true" : "false") << "\n";
  out << "drop-oov=" << (rc.drop_oov ? "true" : "false") << "\n";
}

inline void write_train_log(const std::vector<EpochLogRow>& log, const std::string& path) {
  std::ofstream out(path);
  out << "epoch\tmeanL1\tmeanL2\tvalidMR\tvalidMRR\tvalidH10\n";
  for (const auto& row : log) {
    out << row.epoch << '\t' << format_double(row.mean_l1) << '\t'
        << format_double(row.mean_l2) << '\t';
    if (row.evaluated) {
      out << format_double(row.valid_mr) << '\t' << format_double(row.valid_mrr) << '\t'
          << format_double(row.valid_h10) << '\n';
    } else {
      out << "-\t-\t-\n";
    }
  }
}

}  // namespace detail

// Trains the configured variant and persists model + log + config under
// out_dir. Returns the trained state.
inline TrainedModel cmd_train(const RunConfig& rc) {
  detail::require_readable(rc.train_path, "train");
  if (!rc.valid_path.empty()) detail::require_readable(rc.valid_path, "valid");
  if (!rc.test_path.empty()) detail::require_readable(rc.test_path, "test");

  DatasetSplits splits = DatasetSplits::load(rc.train_path, rc.valid_path, rc.test_path);
  TrainedModel trained = fit(splits, rc.train);

  std::filesystem::create_directories(rc.out_dir);
  save_model(rc.model_file(), splits.train().entity_vocab().names(),
             splits.train().relation_vocab().names(), trained.params, trained.ae, trained.opt);
  detail::write_train_log(trained.log,
                          (std::filesystem::path(rc.out_dir) / "train.log.tsv").string());
  detail::write_effective_config(
      rc, (std::filesystem::path(rc.out_dir) / "effective.config").string());
  return trained;
}

// Loads a model and verifies it matches the dataset's vocabulary.
inline LoadedModel load_model_checked(const RunConfig& rc, const DatasetSplits& splits) {
  detail::require_readable(rc.model_file(), "model");
  LoadedModel model = load_model(rc.model_file());
  if (static_cast<EntityId>(model.entities.size()) != splits.train().num_entities())
    throw std::runtime_error("model file header check failed: |E| does not match training data");
  if (static_cast<RelationId>(model.relations.size()) != splits.train().num_relations())
    throw std::runtime_error("model file header check failed: |R| does not match training data");
  for (std::size_t i = 0; i < model.entities.size(); ++i)
    if (model.entities[i] != splits.train().entity_vocab().name(static_cast<std::int32_t>(i)))
      throw std::runtime_error("model file vocabulary mismatch: entity " + std::to_string(i));
  for (std::size_t i = 0; i < model.relations.size(); ++i)
    if (model.relations[i] != splits.train().relation_vocab().name(static_cast<std::int32_t>(i)))
      throw std::runtime_error("model file vocabulary mismatch: relation " + std::to_string(i));
  return model;
}

struct EvalOutput {
  EvalReport valid;
  EvalReport test;
};

// Filtered ranking of the valid and test splits; writes
// "split<TAB>MR<TAB>MRR<TAB>H10" rows to out_dir/eval.tsv.
inline EvalOutput cmd_eval(const RunConfig& rc) {
  detail::require_readable(rc.train_path, "train");
  DatasetSplits splits = DatasetSplits::load(rc.train_path, rc.valid_path, rc.test_path);
  LoadedModel model = load_model_checked(rc, splits);

  EvalOptions opts{.drop_oov = rc.drop_oov, .threads = rc.train.threads};
  EvalOutput out;
  out.valid = evaluate(splits, model.params, splits.valid(), opts);
  out.test = evaluate(splits, model.params, splits.test(), opts);

  std::filesystem::create_directories(rc.out_dir);
  std::ofstream tsv((std::filesystem::path(rc.out_dir) / "eval.tsv").string());
  tsv << "split\tMR\tMRR\tH10\n";
  auto emit = [&](const char* split, const EvalReport& rep) {
    tsv << split << '\t' << detail::format_double(rep.mr) << '\t'
        << detail::format_double(rep.mrr) << '\t' << detail::format_double(rep.h10) << '\n';
  };
  emit("valid", out.valid);
  emit("test", out.test);

  if (rc.dump_ranks) {
    std::ofstream dump((std::filesystem::path(rc.out_dir) / "ranks.tsv").string());
    dump << "split\tquery\trank\n";
    for (std::size_t i = 0; i < out.valid.ranks.size(); ++i)
      dump << "valid\t" << i << '\t' << out.valid.ranks[i] << '\n';
    for (std::size_t i = 0; i < out.test.ranks.size(); ++i)
      dump << "test\t" << i << '\t' << out.test.ranks[i] << '\n';
  }
  return out;
}

// Interpretability exports: normalized codings (codings), mined constraints
// with both discovery-evaluation modes (constraints), or the flattened
// relation vectorizations with frequencies (vectorizations).
inline void cmd_analyze(const RunConfig& rc) {
  detail::require_readable(rc.train_path, "train");
  DatasetSplits splits = DatasetSplits::load(rc.train_path, rc.valid_path, rc.test_path);
  LoadedModel model = load_model_checked(rc, splits);
  const KnowledgeBase& kb = splits.train();

  std::filesystem::path analysis_dir = std::filesystem::path(rc.out_dir) / "analysis";
  std::filesystem::create_directories(analysis_dir);

  if (rc.analyze_kind == "codings") {
    std::ofstream csv((analysis_dir / "codings.csv").string());
    csv << "relation";
    for (int j = 0; j < model.c; ++j) csv << ",dim_" << j;
    csv << "\n";
    auto report = coding_sparsity_report(model.ae, model.params);
    for (const auto& row : report) {
      csv << kb.relation_vocab().name(row.relation);
      for (int j = 0; j < model.c; ++j) csv << ',' << detail::format_double(row.coding[j]);
      csv << "\n";
    }
  } else if (rc.analyze_kind == "constraints") {
    auto constraints = extract_constraints(kb);
    std::ofstream csv((analysis_dir / "constraints.csv").string());
    csv << "r1,r2,r3,support,jaccard\n";
    for (const auto& c : constraints) {
      csv << kb.relation_vocab().name(c.r1) << ',' << kb.relation_vocab().name(c.r2) << ','
          << kb.relation_vocab().name(c.r3) << ',' << c.support << ','
          << detail::format_double(c.jaccard) << "\n";
    }
    std::ofstream tsv((analysis_dir / "constraint_eval.tsv").string());
    tsv << "mode\tseed\tMR\tMRR\n";
    if (!constraints.empty()) {
      Rng rng(rc.train.seed);
      auto res = constraint_eval(model.params, constraints, ConstraintEvalMode::kModel, rng);
      tsv << "model\t" << rc.train.seed << '\t' << detail::format_double(res.mr) << '\t'
          << detail::format_double(res.mrr) << '\n';
      auto rnd = constraint_eval(model.params, constraints, ConstraintEvalMode::kRandomM2, rng);
      tsv << "random_m2\t" << rc.train.seed << '\t' << detail::format_double(rnd.mr) << '\t'
          << detail::format_double(rnd.mrr) << '\n';
    }
  } else if (rc.analyze_kind == "vectorizations") {
    std::ofstream csv((analysis_dir / "vectorizations.csv").string());
    csv << "relation,frequency";
    for (int j = 0; j < model.d * model.d; ++j) csv << ",m_" << j;
    csv << "\n";
    for (RelationId r = 0; r < kb.num_relations(); ++r) {
      Vec m = vectorize(model.params.M[r]);
      csv << kb.relation_vocab().name(r) << ',' << kb.relation_frequency(r);
      for (int j = 0; j < m.size(); ++j) csv << ',' << detail::format_double(m[j]);
      csv << "\n";
    }
  } else {
    throw std::runtime_error("unknown analyze kind: '" + rc.analyze_kind +
                             "' (expected codings, constraints, or vectorizations)");
  }
}

}  // namespace glim
