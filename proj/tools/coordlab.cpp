// coordlab command-line driver. Talks to the library exclusively through the
// C API.
#include <CLI11.hpp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "coordlab/capi.h"

namespace {

struct SessionDeleter {
  void operator()(coordlab_session* s) const { coordlab_session_free(s); }
};
using Session = std::unique_ptr<coordlab_session, SessionDeleter>;

int finish(coordlab_session* s, int code) {
  if (code != COORDLAB_OK)
    std::fprintf(stderr, "coordlab: %s\n", coordlab_last_error(s));
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coordlab: artificial-language communicative-efficiency workbench"};
  app.require_subcommand(1);

  std::string config_path, scale, out_dir;
  int workers = 0;
  long long seed = -1;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--scale", scale, "preset: smoke, desk, or full");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--seed", seed, "base random seed");
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* gen = app.add_subcommand("gen", "build a grammar and sample a corpus");
  int gen_order = 0, gen_replicate = 1;
  std::string gen_grammar, gen_corpus;
  gen->add_option("--order", gen_order, "word order id (0-63)")->required();
  gen->add_option("--replicate", gen_replicate, "corpus replicate index");
  gen->add_option("--grammar-out", gen_grammar, "grammar output path")->required();
  gen->add_option("--corpus-out", gen_corpus, "corpus output path")->required();

  auto* transform = app.add_subcommand("transform", "rewrite a corpus into a regime");
  std::string tr_regime, tr_in, tr_out;
  transform->add_option("--regime", tr_regime, "structure|none|linear")->required();
  transform->add_option("input", tr_in, "corpus in")->required();
  transform->add_option("output", tr_out, "corpus out")->required();

  auto* oracle = app.add_subcommand("oracle", "emit training action sequences");
  std::string or_in, or_out;
  oracle->add_option("input", or_in, "corpus in")->required();
  oracle->add_option("output", or_out, "oracle out")->required();

  auto* train = app.add_subcommand("train", "train the action n-gram model");
  std::string trn_oracle, trn_grammar, trn_model;
  train->add_option("oracle", trn_oracle, "oracle file")->required();
  train->add_option("grammar", trn_grammar, "grammar file (action vocabulary)")->required();
  train->add_option("model", trn_model, "model out")->required();

  auto* eval = app.add_subcommand("eval", "decode test sentences into measures");
  std::string ev_model, ev_corpus, ev_measures;
  eval->add_option("model", ev_model, "model file")->required();
  eval->add_option("corpus", ev_corpus, "corpus file")->required();
  eval->add_option("measures", ev_measures, "measures out")->required();

  auto* report = app.add_subcommand("report", "aggregate measures into the report");
  std::vector<std::string> rp_files;
  report->add_option("measures", rp_files, "measures files")->required();

  auto* pipeline = app.add_subcommand("pipeline", "run the full cached pipeline");
  auto* verify = app.add_subcommand("verify", "run the cross-module oracle checks");

  CLI11_PARSE(app, argc, argv);

  Session session(coordlab_session_new());
  coordlab_session* s = session.get();
  coordlab_set_verbose(s, quiet ? 0 : 1);

  if (!scale.empty() && finish(s, coordlab_config_preset(s, scale.c_str())))
    return COORDLAB_CONFIG_ERROR;
  if (!config_path.empty() && finish(s, coordlab_config_load(s, config_path.c_str())))
    return COORDLAB_CONFIG_ERROR;
  if (workers > 0 &&
      finish(s, coordlab_config_set(s, "workers", std::to_string(workers).c_str())))
    return COORDLAB_CONFIG_ERROR;
  if (seed >= 0 &&
      finish(s, coordlab_config_set(s, "seed", std::to_string(seed).c_str())))
    return COORDLAB_CONFIG_ERROR;

  if (gen->parsed()) {
    return finish(s, coordlab_gen(s, gen_order, gen_replicate, gen_grammar.c_str(),
                                  gen_corpus.c_str()));
  }
  if (transform->parsed()) {
    return finish(s, coordlab_transform(s, tr_in.c_str(), tr_regime.c_str(),
                                        tr_out.c_str()));
  }
  if (oracle->parsed()) {
    return finish(s, coordlab_oracle(s, or_in.c_str(), or_out.c_str()));
  }
  if (train->parsed()) {
    return finish(s, coordlab_train(s, trn_oracle.c_str(), trn_grammar.c_str(),
                                    trn_model.c_str()));
  }
  if (eval->parsed()) {
    return finish(s, coordlab_eval(s, ev_model.c_str(), ev_corpus.c_str(),
                                   ev_measures.c_str()));
  }
  if (report->parsed()) {
    if (out_dir.empty()) {
      std::fprintf(stderr, "coordlab: report needs --out DIR\n");
      return COORDLAB_CONFIG_ERROR;
    }
    std::vector<const char*> files;
    for (const auto& f : rp_files) files.push_back(f.c_str());
    return finish(s, coordlab_report(s, files.data(), files.size(), out_dir.c_str()));
  }
  if (pipeline->parsed()) {
    if (out_dir.empty()) {
      std::fprintf(stderr, "coordlab: pipeline needs --out DIR\n");
      return COORDLAB_CONFIG_ERROR;
    }
    return finish(s, coordlab_pipeline(s, out_dir.c_str()));
  }
  if (verify->parsed()) {
    std::string buffer(1 << 16, '\0');
    int code = coordlab_verify(s, buffer.data(), buffer.size());
    std::printf("%s", buffer.c_str());
    if (code != COORDLAB_OK && code != COORDLAB_VERIFY_ERROR)
      std::fprintf(stderr, "coordlab: %s\n", coordlab_last_error(s));
    return code;
  }
  return COORDLAB_ERROR;
}
