// Copyright 2026 The mlsumeval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mlsumeval: multilingual summarization evaluation from the command line.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mlsumeval/cli.hpp"

namespace {

std::string split_list_help(const char* what) {
  return std::string("comma-separated ") + what;
}

}  // namespace

int main(int argc, char** argv) {
  using mlsumeval::RunConfig;

  CLI::App app{"Multilingual summarization evaluation toolkit", "mlsumeval"};
  app.set_version_flag("--version", std::string(mlsumeval::kVersion));
  app.require_subcommand(1);

  RunConfig config;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--corpus", config.corpus, "corpus JSONL")->required();
    sub->add_option("--out", config.out, "output path")->required();
    sub->add_option("--jobs", config.jobs, "worker threads")
        ->check(CLI::PositiveNumber);
  };
  auto tokenizer = [&](CLI::App* sub) {
    sub->add_option("--tokenizer", config.tokenizer,
                    "whitespace|char|subword:<vocab>|pretok:surface|pretok:lemma");
    sub->add_flag("--lowercase", config.lowercase, "lowercase before tokenizing");
  };

  auto* score = app.add_subcommand("score", "score candidates against references");
  common(score);
  tokenizer(score);
  score->add_option("--metric", config.metrics,
                    split_list_help("metrics: rouge1 rouge2 rouge3 rougeL bleu "
                                    "bleu-lemma chrf bertscore moverscore"))
      ->delimiter(',')
      ->required();
  score->add_option("--sidecar", config.sidecar, "annotation sidecar JSONL");
  score->add_option("--embeddings", config.embeddings,
                    "embeddings JSONL path or http:// endpoint");
  score->add_option("--layer", config.layer, "embedding layer (endpoint only)");
  score->add_flag("--idf", config.idf, "IDF-weight embedding metrics");

  auto* corrupt = app.add_subcommand("corrupt", "corrupt a fraction of the corpus");
  common(corrupt);
  corrupt->add_option("--sidecar", config.sidecar, "annotation sidecar JSONL")
      ->required();
  corrupt->add_option("--seed", seed, "random seed")->required();
  corrupt->add_option("--fraction", config.fraction, "share of records to corrupt");
  corrupt->add_option("--lexicons", config.lexicons,
                      "directory of <lang>.txt conjunction lists");
  corrupt->add_option("--entity-mode", config.entity_mode, "swap|replace");
  corrupt->add_flag("--verbs-only", config.verbs_only, "lemmatize verbs only");
  corrupt->add_option("--replay", config.replay, "plan log to re-apply");

  auto* stats = app.add_subcommand("stats", "intrinsic summary statistics");
  common(stats);
  tokenizer(stats);

  auto* analyze = app.add_subcommand("analyze", "annotation agreement and Elo");
  common(analyze);
  analyze->add_option("--annotations", config.annotations, "annotations JSONL")
      ->required();
  analyze->add_option("--elo-shuffle", config.elo_shuffle_rounds,
                      "average Elo over this many seeded orderings");
  analyze->add_option("--seed", seed, "seed for Elo shuffling");

  auto* correlate = app.add_subcommand("correlate", "metric-human correlation");
  common(correlate);
  correlate->add_option("--annotations", config.annotations, "annotations JSONL")
      ->required();
  correlate->add_option("--scores", config.scores, "scores JSONL")->required();
  correlate->add_option("--group-by", config.group_by, "lang|family|resource");
  correlate->add_option("--method", config.method, "pearson|spearman");
  correlate->add_option("--criterion", config.criteria,
                        split_list_help("criteria: coherence completeness"))
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  config.command = app.get_subcommands().front()->get_name();
  for (auto* sub : {corrupt, analyze}) {
    if (sub->parsed() && sub->count("--seed") > 0) config.seed = seed;
  }

  try {
    const auto output = mlsumeval::run_command(config);
    for (const auto& w : output.diagnostics.warnings()) {
      std::cerr << "warning: " << w << "\n";
    }
    mlsumeval::write_outputs(output);
  } catch (const mlsumeval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
