// glim — bilinear knowledge-base embeddings trained jointly with a relation
// autoencoder. Subcommands: train, eval, analyze.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "glim/run.hpp"

namespace {

std::string config_sink;  // consumed in the pre-pass below

void add_common_options(CLI::App* cmd, glim::RunConfig& rc) {
  cmd->add_option("--config", config_sink, "flat key=value config file; flags override it");
  cmd->add_option("--train", rc.train_path, "training triples (TSV)");
  cmd->add_option("--valid", rc.valid_path, "validation triples (TSV)");
  cmd->add_option("--test", rc.test_path, "test triples (TSV)");
  cmd->add_option("--model", rc.model_path, "model file (default: <out-dir>/model.bin)");
  cmd->add_option("--out-dir", rc.out_dir, "output directory");
  cmd->add_option("--seed", rc.train.seed, "RNG seed; fully determines single-threaded runs");
  cmd->add_option("--threads", rc.train.threads, "evaluation worker threads");
}

void add_train_options(CLI::App* cmd, glim::RunConfig& rc) {
  cmd->add_option("--d", rc.train.d, "entity embedding dimension");
  cmd->add_option("--c", rc.train.c, "coding dimension of the autoencoder");
  cmd->add_option("--eta1", rc.train.eta1, "initial learning rate, KB objective");
  cmd->add_option("--eta2", rc.train.eta2, "initial learning rate, reconstruction objective");
  cmd->add_option("--lambda1", rc.train.lambda1, "decay constant, KB objective");
  cmd->add_option("--lambda2", rc.train.lambda2, "decay constant, reconstruction objective");
  cmd->add_option("--k", rc.train.k, "noise tails per positive");
  cmd->add_option("--k-recon", rc.train.k_recon, "noise relations per reconstruction term");
  cmd->add_option("--rho", rc.train.rho, "orthogonality regularizer coefficient");
  cmd->add_option("--batch-size", rc.train.batch_size, "positives per shared-head batch");
  cmd->add_flag("--joint", rc.train.joint, "train jointly with the relation autoencoder");
  cmd->add_flag("--comp", rc.train.compositional, "compositional training over sampled paths");
  cmd->add_option("--poisson-mean", rc.train.poisson_mean,
                  "mean of the Poisson path-length distribution (paths have length 1+X)");
  cmd->add_option("--max-epochs", rc.train.max_epochs, "epoch budget");
  cmd->add_option("--eval-every", rc.train.eval_every, "validation cadence in epochs");
  cmd->add_option("--patience", rc.train.patience,
                  "stop after this many evaluations without MR or MRR improvement");
  cmd->add_flag_callback(
      "--no-normalize", [&rc] { rc.train.normalize = false; },
      "ablation: skip maintenance normalization of relation matrices");
  cmd->add_flag("--pure-gaussian", rc.train.pure_gaussian,
                "ablation: initialize matrices as G instead of (I+G)/2");
  cmd->add_flag("--unigram-noise", rc.train.unigram_noise,
                "ablation: frequency-proportional noise instead of uniform");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bilinear KB embeddings with a jointly trained relation autoencoder"};
  app.require_subcommand(1);

  glim::RunConfig rc;

  // config file first, flags second, so flags override file values
  try {
    for (int i = 1; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) {
        glim::load_config_file(rc, argv[i + 1]);
      } else if (arg.rfind("--config=", 0) == 0) {
        glim::load_config_file(rc, arg.substr(9));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App* train = app.add_subcommand("train", "train a model variant and save it");
  add_common_options(train, rc);
  add_train_options(train, rc);

  CLI::App* eval = app.add_subcommand("eval", "filtered-ranking evaluation of a saved model");
  add_common_options(eval, rc);
  eval->add_flag("--drop-oov", rc.drop_oov,
                 "drop triples with out-of-vocabulary entities instead of substituting");
  eval->add_flag("--dump-ranks", rc.dump_ranks, "also write per-query ranks.tsv");

  CLI::App* analyze = app.add_subcommand("analyze", "export codings/constraints/vectorizations");
  add_common_options(analyze, rc);
  analyze->add_option("kind", rc.analyze_kind, "codings | constraints | vectorizations")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      glim::TrainedModel trained = glim::cmd_train(rc);
      std::cout << "trained " << trained.epochs_run << " epochs (best epoch "
                << trained.best_epoch << "); model written to " << rc.model_file() << "\n";
    } else if (eval->parsed()) {
      glim::EvalOutput out = glim::cmd_eval(rc);
      std::cout << "split\tMR\tMRR\tH10\n";
      std::cout << "valid\t" << out.valid.mr << '\t' << out.valid.mrr << '\t' << out.valid.h10
                << "\n";
      std::cout << "test\t" << out.test.mr << '\t' << out.test.mrr << '\t' << out.test.h10
                << "\n";
    } else if (analyze->parsed()) {
      glim::cmd_analyze(rc);
      std::cout << "analysis written under " << rc.out_dir << "/analysis\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
