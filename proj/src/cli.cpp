// Copyright (c) 2026, the sgdec authors.
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

#include "sgdec/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>

#include "sgdec/anchor.hpp"
#include "sgdec/composer.hpp"
#include "sgdec/dictionary.hpp"
#include "sgdec/errors.hpp"
#include "sgdec/eval.hpp"
#include "sgdec/rng.hpp"
#include "sgdec/sampler.hpp"
#include "sgdec/schema.hpp"
#include "sgdec/synth.hpp"
#include "sgdec/trainer.hpp"

namespace sgdec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::string fnv1a64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input for digest: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

// Collects the resolved flags, input digests and produced files of one run
// and writes them as <out>/manifest.json. Replaying the recorded args
// regenerates every artifact byte-identically.
class ManifestWriter {
 public:
  explicit ManifestWriter(const std::string& subcommand) {
    j_["tool"] = "sgdec";
    j_["version"] = kVersion;
    j_["subcommand"] = subcommand;
    j_["args"] = json::object();
    j_["inputs"] = json::object();
    j_["outputs"] = json::array();
  }

  template <typename T>
  void arg(const std::string& flag, const T& value) {
    j_["args"][flag] = value;
  }

  void input(const std::string& path) { j_["inputs"][path] = fnv1a64(path); }
  void output(const std::string& name) { j_["outputs"].push_back(name); }

  void write(const fs::path& out_dir) {
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw DataError("cannot write manifest in " + out_dir.string());
    out << j_.dump(2) << "\n";
  }

 private:
  json j_;
};

fs::path ensure_out_dir(const std::string& out) {
  if (out.empty()) throw DataError("--out directory is required");
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + out);
  return dir;
}

struct LoadedData {
  FeatureDims dims;
  Dataset dataset;
  EmbeddingTable embeddings;
  ComponentStore components{FeatureDims{}};
};

// Dimensions come from the files themselves: the VCF1 header gives the
// visual width and the embedding file the word width.
LoadedData load_bundle(const std::string& annotations, const std::string& features,
                       const std::string& embeddings_path) {
  LoadedData data;
  FeatureDims probe{peek_feature_dim(features), kSpatialDim, 1};
  Dataset bare = load_dataset(annotations, std::nullopt, probe);
  data.embeddings = load_embeddings(embeddings_path, bare.vocab);
  data.dims = FeatureDims{probe.visual, kSpatialDim, data.embeddings.dim};
  data.dataset = std::move(bare);
  load_features(data.dataset, features, data.dims);
  data.components = assemble_all(data.dataset, data.embeddings, data.dims);
  return data;
}

std::map<int, std::size_t> predicate_counts(const Dataset& ds) {
  std::map<int, std::size_t> counts;
  for (const auto& image : ds.images)
    for (const auto& triple : image.triples) ++counts[triple.predicate];
  return counts;
}

// Predicates ordered by descending training frequency (ties toward the
// smaller index), background excluded.
std::vector<int> by_descending_frequency(const Dataset& ds,
                                         const std::map<int, std::size_t>& counts) {
  std::vector<int> order;
  for (int p = 1; p < static_cast<int>(ds.vocab.predicates.size()); ++p)
    order.push_back(p);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const std::size_t ca = counts.count(a) ? counts.at(a) : 0;
    const std::size_t cb = counts.count(b) ? counts.at(b) : 0;
    return ca > cb;
  });
  return order;
}

// --- synth -------------------------------------------------------------------

struct SynthCmd {
  std::string out;
  SynthConfig cfg;
};

int run_synth(const SynthCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const SynthResult result = generate(cmd.cfg);

  save_dataset(result.train, (dir / "train.sgda").string());
  save_dataset(result.test, (dir / "test.sgda").string());
  save_features(result.train, (dir / "train.vcf").string(), cmd.cfg.d_visual);
  save_features(result.test, (dir / "test.vcf").string(), cmd.cfg.d_visual);
  save_embedding_file((dir / "embeddings.txt").string(), result.embedding_tokens,
                      result.embedding_vectors);
  {
    std::ofstream out(dir / "holdout.txt", std::ios::binary);
    out << "# held-out combinations: subject predicate object\n";
    for (const auto& combo : result.holdout_combos)
      out << result.train.vocab.object_categories[combo[0]] << " "
          << result.train.vocab.predicates[combo[1]] << " "
          << result.train.vocab.object_categories[combo[2]] << "\n";
  }

  ManifestWriter manifest("synth");
  manifest.arg("--out", cmd.out);
  manifest.arg("--seed", cmd.cfg.seed);
  manifest.arg("--train-images", cmd.cfg.n_train_images);
  manifest.arg("--test-images", cmd.cfg.n_test_images);
  manifest.arg("--objects", cmd.cfg.n_object_categories);
  manifest.arg("--predicates", cmd.cfg.n_predicates);
  manifest.arg("--zipf", cmd.cfg.zipf_exponent);
  manifest.arg("--d-visual", cmd.cfg.d_visual);
  manifest.arg("--d-word", cmd.cfg.d_word);
  manifest.arg("--feature-spread", cmd.cfg.feature_spread);
  manifest.arg("--geometry-noise", cmd.cfg.geometry_noise);
  manifest.arg("--group-size", cmd.cfg.group_size);
  manifest.arg("--min-instances", cmd.cfg.min_instances);
  manifest.arg("--max-instances", cmd.cfg.max_instances);
  manifest.arg("--holdout-per-predicate", cmd.cfg.holdout_per_predicate);
  manifest.arg("--holdout-predicates", cmd.cfg.predicates_with_holdout);
  for (const char* name :
       {"train.sgda", "test.sgda", "train.vcf", "test.vcf", "embeddings.txt",
        "holdout.txt"})
    manifest.output(name);
  manifest.write(dir);

  std::cout << "synth: " << result.train.images.size() << " train images, "
            << result.train.triple_count() << " train triples, "
            << result.test.images.size() << " test images, "
            << result.holdout_combos.size() << " held-out combinations\n";
  return 0;
}

// --- stats -------------------------------------------------------------------

struct StatsCmd {
  std::string annotations;
  std::string out;
};

int run_stats(const StatsCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const FeatureDims dims{1, kSpatialDim, 1};
  const Dataset ds = load_dataset(cmd.annotations, std::nullopt, dims);
  const auto counts = predicate_counts(ds);
  const double total = static_cast<double>(ds.triple_count());

  std::ofstream out(dir / "stats.csv", std::ios::binary);
  if (!out) throw DataError("cannot write stats.csv");
  out << "predicate,count,share\n";
  std::cout << "predicate frequency (" << ds.triple_count() << " triples)\n";
  for (const int p : by_descending_frequency(ds, counts)) {
    const std::size_t count = counts.count(p) ? counts.at(p) : 0;
    const double share = total > 0 ? count / total : 0.0;
    out << ds.vocab.predicates[p] << "," << count << "," << format_double(share)
        << "\n";
    std::cout << "  " << ds.vocab.predicates[p] << " " << count << "\n";
  }

  ManifestWriter manifest("stats");
  manifest.arg("--ann", cmd.annotations);
  manifest.arg("--out", cmd.out);
  manifest.input(cmd.annotations);
  manifest.output("stats.csv");
  manifest.write(dir);
  return 0;
}

// --- anchors -----------------------------------------------------------------

struct AnchorsCmd {
  std::string annotations;
  std::string out;
  double delta = 0.3;
};

int run_anchors(const AnchorsCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const FeatureDims dims{1, kSpatialDim, 1};
  const Dataset ds = load_dataset(cmd.annotations, std::nullopt, dims);

  AnchorScanStats stats;
  const auto anchors = scan_anchors(ds, cmd.delta, &stats);

  std::ofstream out(dir / "anchors.txt", std::ios::binary);
  if (!out) throw DataError("cannot write anchors.txt");
  out << "# image triple_index slot iou subject_area object_area subject object "
         "predicate\n";
  for (const auto& a : anchors) {
    out << a.triple.image_id << " " << a.triple_index << " "
        << (a.decomposed == AnchorOutcome::kSubject ? "subject" : "object") << " "
        << format_double(a.iou) << " " << format_double(a.subject_area) << " "
        << format_double(a.object_area) << " " << a.triple.subject << " "
        << a.triple.object << " " << ds.vocab.predicates[a.triple.predicate]
        << "\n";
  }

  std::cout << "anchors: " << stats.anchors << " of " << stats.triples
            << " triples (" << stats.rejected_overlap << " rejected by overlap, "
            << stats.rejected_equal_area << " equal-area ties)\n";

  ManifestWriter manifest("anchors");
  manifest.arg("--ann", cmd.annotations);
  manifest.arg("--out", cmd.out);
  manifest.arg("--delta", cmd.delta);
  manifest.input(cmd.annotations);
  manifest.output("anchors.txt");
  manifest.write(dir);
  return 0;
}

// --- dict-dump ---------------------------------------------------------------

struct DictDumpCmd {
  std::string annotations, features, embeddings, out;
  std::size_t capacity = 3000;
  std::uint64_t seed = 0;
};

int run_dict_dump(const DictDumpCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const LoadedData data = load_bundle(cmd.annotations, cmd.features, cmd.embeddings);

  ComponentDictionary dict(cmd.capacity, cmd.seed);
  for (const auto& image : data.dataset.images)
    for (const auto& inst : image.instances)
      dict.insert(data.components.of(inst.instance_id));

  std::ofstream out(dir / "dict.txt", std::ios::binary);
  if (!out) throw DataError("cannot write dict.txt");
  out << "# instance category x_t y_t x_b y_b\n";
  for (const VisualComponent* component : dict.entries_by_insertion()) {
    out << component->instance_id << " "
        << data.dataset.vocab.object_categories[component->category] << " "
        << format_double(component->box.x_t()) << " "
        << format_double(component->box.y_t()) << " "
        << format_double(component->box.x_b()) << " "
        << format_double(component->box.y_b()) << "\n";
  }
  std::cout << "dict-dump: " << dict.size() << " entries (capacity "
            << dict.capacity() << ")\n";

  ManifestWriter manifest("dict-dump");
  manifest.arg("--ann", cmd.annotations);
  manifest.arg("--features", cmd.features);
  manifest.arg("--emb", cmd.embeddings);
  manifest.arg("--out", cmd.out);
  manifest.arg("--capacity", static_cast<std::uint64_t>(cmd.capacity));
  manifest.arg("--seed", cmd.seed);
  manifest.input(cmd.annotations);
  manifest.input(cmd.features);
  manifest.input(cmd.embeddings);
  manifest.output("dict.txt");
  manifest.write(dir);
  return 0;
}

// --- compose -----------------------------------------------------------------

struct ComposeCmd {
  std::string annotations, features, embeddings, out;
  double delta = 0.3;
  std::size_t capacity = 3000;
  int neighbors = 3;
  double min_cosine = -1.0;
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  std::string profile = "desk";
};

int run_compose(const ComposeCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const LoadedData data = load_bundle(cmd.annotations, cmd.features, cmd.embeddings);

  const auto anchors = scan_anchors(data.dataset, cmd.delta);
  ComponentDictionary dict(cmd.capacity, mix_seed(cmd.seed, 0xD1));
  for (const auto& image : data.dataset.images)
    for (const auto& inst : image.instances)
      dict.insert(data.components.of(inst.instance_id));
  const CategoryNeighborIndex index =
      build_neighbor_index(data.embeddings, cmd.neighbors, cmd.min_cosine);

  const CorpusResult corpus =
      compose_corpus(data.dataset, data.components, anchors, dict, index,
                     data.embeddings, cmd.budget, cmd.seed);
  save_corpus(corpus.items, data.dataset, (dir / "corpus.sgdc").string());

  json stats;
  stats["anchors"] = anchors.size();
  stats["intra"] = corpus.stats.intra;
  stats["inter"] = corpus.stats.inter;
  stats["skipped_intra"] = corpus.stats.skipped_intra;
  stats["skipped_inter"] = corpus.stats.skipped_inter;
  json per_predicate = json::object();
  for (const auto& [predicate, count] : corpus.stats.per_predicate)
    per_predicate[data.dataset.vocab.predicates[predicate]] = count;
  stats["per_predicate"] = per_predicate;
  {
    std::ofstream out(dir / "compose_stats.json", std::ios::binary);
    out << stats.dump(2) << "\n";
  }

  std::cout << "compose: " << corpus.items.size() << " composed relations ("
            << corpus.stats.intra << " intra, " << corpus.stats.inter
            << " inter) from " << anchors.size() << " anchors\n";

  ManifestWriter manifest("compose");
  manifest.arg("--ann", cmd.annotations);
  manifest.arg("--features", cmd.features);
  manifest.arg("--emb", cmd.embeddings);
  manifest.arg("--out", cmd.out);
  manifest.arg("--delta", cmd.delta);
  manifest.arg("--capacity", static_cast<std::uint64_t>(cmd.capacity));
  manifest.arg("--neighbors", cmd.neighbors);
  manifest.arg("--min-cosine", cmd.min_cosine);
  manifest.arg("--budget", static_cast<std::uint64_t>(cmd.budget));
  manifest.arg("--seed", cmd.seed);
  manifest.input(cmd.annotations);
  manifest.input(cmd.features);
  manifest.input(cmd.embeddings);
  manifest.output("corpus.sgdc");
  manifest.output("compose_stats.json");
  manifest.write(dir);
  return 0;
}

// --- split -------------------------------------------------------------------

struct SplitCmd {
  std::string annotations, test_annotations, out;
  std::string kind = "few";
  int s = 5;
  std::uint64_t seed = 0;
};

int run_split(const SplitCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const FeatureDims dims{1, kSpatialDim, 1};
  const Dataset train = load_dataset(cmd.annotations, std::nullopt, dims);

  SplitSpec split;
  if (cmd.kind == "few") {
    split = few_shot_split(train, cmd.s, cmd.seed);
    std::cout << "split: few-shot S=" << cmd.s << " selected "
              << split.train_images.size() << " images\n";
  } else if (cmd.kind == "zero") {
    if (cmd.test_annotations.empty())
      throw DataError("zero-shot split needs --test-ann");
    const Dataset test = load_dataset(cmd.test_annotations, std::nullopt, dims);
    split = zero_shot_split(train, test);
    std::cout << "split: zero-shot selected " << split.test_triples.size()
              << " unseen triples\n";
  } else {
    throw DataError("unknown split kind '" + cmd.kind + "' (use few|zero)");
  }
  save_split(split, train, (dir / "split.sgds").string());

  ManifestWriter manifest("split");
  manifest.arg("--ann", cmd.annotations);
  manifest.arg("--out", cmd.out);
  manifest.arg("--kind", cmd.kind);
  manifest.arg("--s", cmd.s);
  manifest.arg("--seed", cmd.seed);
  manifest.input(cmd.annotations);
  if (!cmd.test_annotations.empty()) {
    manifest.arg("--test-ann", cmd.test_annotations);
    manifest.input(cmd.test_annotations);
  }
  manifest.output("split.sgds");
  manifest.write(dir);
  return 0;
}

// --- train -------------------------------------------------------------------

struct TrainCmd {
  std::string annotations, features, embeddings, out;
  std::string corpus_path, images_path;
  bool dec = false;
  double delta = 0.3;
  TrainConfig cfg;
  std::string profile = "desk";
};

int run_train(const TrainCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const LoadedData data = load_bundle(cmd.annotations, cmd.features, cmd.embeddings);

  std::vector<ComposedRelation> corpus;
  if (cmd.dec) {
    if (cmd.corpus_path.empty()) throw DataError("--dec needs --corpus");
    corpus = load_corpus(cmd.corpus_path, data.dataset, data.components,
                         data.embeddings, cmd.delta);
  }

  std::optional<std::vector<int>> filter;
  if (!cmd.images_path.empty()) {
    const SplitSpec split = load_split(cmd.images_path, data.dataset);
    if (split.kind != SplitSpec::Kind::kFewShot)
      throw DataError("--images expects a few-shot split file");
    filter = split.train_images;
  }

  TrainConfig cfg = cmd.cfg;
  cfg.balanced_sampling = cmd.dec;
  const TrainResult result =
      train(data.dataset, data.components, corpus,
            filter.has_value() ? &*filter : nullptr, cfg);

  std::map<std::string, std::string> echo;
  echo["dec"] = cmd.dec ? "true" : "false";
  echo["iterations"] = std::to_string(cfg.iterations);
  echo["learning_rate"] = format_double(cfg.learning_rate);
  echo["kl_weight"] = format_double(cfg.kl_weight);
  echo["seed"] = std::to_string(cfg.seed);
  echo["per_image_cap"] = std::to_string(cfg.per_image_cap);
  echo["negative_ratio"] = format_double(cfg.negative_ratio);
  echo["n_predicates"] = std::to_string(cfg.n_predicates);
  echo["k_images"] = std::to_string(cfg.k_images);
  echo["hidden_dim"] = std::to_string(cfg.hidden_dim);
  echo["d_visual"] = std::to_string(data.dims.visual);
  echo["d_word"] = std::to_string(data.dims.word);
  save_checkpoint(result.params, (dir / "checkpoint.sgc1").string(), echo);
  save_loss_trace(result.loss_trace, (dir / "loss_trace.txt").string());

  std::cout << "train: " << cfg.iterations << " iterations, final loss "
            << format_double(result.loss_trace.back()) << (cmd.dec ? " (dec)" : "")
            << "\n";

  ManifestWriter manifest("train");
  manifest.arg("--ann", cmd.annotations);
  manifest.arg("--features", cmd.features);
  manifest.arg("--emb", cmd.embeddings);
  manifest.arg("--out", cmd.out);
  manifest.arg("--dec", cmd.dec);
  manifest.arg("--delta", cmd.delta);
  manifest.arg("--lr", cfg.learning_rate);
  manifest.arg("--iterations", cfg.iterations);
  manifest.arg("--lambda", cfg.kl_weight);
  manifest.arg("--seed", cfg.seed);
  manifest.arg("--cap", cfg.per_image_cap);
  manifest.arg("--negative-ratio", cfg.negative_ratio);
  manifest.arg("--n", cfg.n_predicates);
  manifest.arg("--k", cfg.k_images);
  manifest.arg("--hidden", cfg.hidden_dim);
  manifest.input(cmd.annotations);
  manifest.input(cmd.features);
  manifest.input(cmd.embeddings);
  if (!cmd.corpus_path.empty()) {
    manifest.arg("--corpus", cmd.corpus_path);
    manifest.input(cmd.corpus_path);
  }
  if (!cmd.images_path.empty()) {
    manifest.arg("--images", cmd.images_path);
    manifest.input(cmd.images_path);
  }
  manifest.output("checkpoint.sgc1");
  manifest.output("loss_trace.txt");
  manifest.write(dir);
  return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalCmd {
  std::string annotations, features, embeddings, checkpoint, train_annotations;
  std::string zero_shot_path, out;
  bool include_absent = false;
};

struct EvalOutcome {
  std::vector<std::size_t> ks{20, 50, 100};
  std::map<std::size_t, double> recall;
  std::map<std::size_t, double> mean_recall;
  MeanRecallResult per_predicate_100;
  std::size_t images = 0;
  std::size_t gt_triples = 0;
};

EvalOutcome evaluate_checkpoint(const ClassifierParams& params,
                                const LoadedData& data,
                                const std::string& zero_shot_path,
                                bool include_absent) {
  if (params.config.feature_dim != data.dims.component())
    throw DataError("checkpoint expects pair elements of width " +
                    std::to_string(params.config.feature_dim) + ", data provides " +
                    std::to_string(data.dims.component()));
  if (params.config.n_classes !=
      static_cast<int>(data.dataset.vocab.predicates.size()))
    throw DataError("checkpoint class count does not match the vocabulary");

  std::vector<EvalRecord> records =
      predict_records(params, data.dataset, data.components);
  for (const auto& record : records) validate_record(record);
  if (!zero_shot_path.empty()) {
    const SplitSpec split = load_split(zero_shot_path, data.dataset);
    if (split.kind != SplitSpec::Kind::kZeroShot)
      throw DataError("--zero-shot expects a zero-shot split file");
    records = restrict_to_triples(std::move(records), split.test_triples);
  }

  EvalOutcome outcome;
  const int n_predicates = static_cast<int>(data.dataset.vocab.predicates.size());
  for (const std::size_t k : outcome.ks) {
    outcome.recall[k] = overall_recall_at_k(records, k);
    outcome.mean_recall[k] =
        mean_recall_at_k(records, k, n_predicates, include_absent).mean_recall;
  }
  outcome.per_predicate_100 =
      mean_recall_at_k(records, 100, n_predicates, include_absent);
  outcome.images = records.size();
  for (const auto& record : records) outcome.gt_triples += record.ground_truth.size();
  return outcome;
}

int run_eval(const EvalCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const LoadedData data = load_bundle(cmd.annotations, cmd.features, cmd.embeddings);
  const Checkpoint checkpoint = load_checkpoint(cmd.checkpoint);
  const FeatureDims bare{1, kSpatialDim, 1};
  const Dataset train =
      load_dataset(cmd.train_annotations, std::nullopt, bare, data.dataset.vocab);
  const auto train_counts = predicate_counts(train);

  const EvalOutcome outcome = evaluate_checkpoint(
      checkpoint.params, data, cmd.zero_shot_path, cmd.include_absent);

  json report;
  for (const std::size_t k : outcome.ks) {
    report["recall"]["R@" + std::to_string(k)] = outcome.recall.at(k);
    report["mean_recall"]["mR@" + std::to_string(k)] = outcome.mean_recall.at(k);
  }
  report["images"] = outcome.images;
  report["gt_triples"] = outcome.gt_triples;
  report["zero_shot"] = !cmd.zero_shot_path.empty();
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report.dump(2) << "\n";
  }
  {
    std::ofstream out(dir / "per_predicate.csv", std::ios::binary);
    out << "predicate,train_count,gt_count,recall_at_100\n";
    for (const int p : by_descending_frequency(data.dataset, train_counts)) {
      const auto& slot = outcome.per_predicate_100.per_predicate[p];
      out << data.dataset.vocab.predicates[p] << ","
          << (train_counts.count(p) ? train_counts.at(p) : 0) << "," << slot.gt_count
          << ",";
      if (slot.gt_count > 0) out << format_double(slot.recall);
      out << "\n";
    }
  }

  std::cout << "eval:";
  for (const std::size_t k : outcome.ks)
    std::cout << " R@" << k << "=" << format_double(outcome.recall.at(k)) << " mR@"
              << k << "=" << format_double(outcome.mean_recall.at(k));
  std::cout << "\n";

  ManifestWriter manifest("eval");
  manifest.arg("--ann", cmd.annotations);
  manifest.arg("--features", cmd.features);
  manifest.arg("--emb", cmd.embeddings);
  manifest.arg("--checkpoint", cmd.checkpoint);
  manifest.arg("--train-ann", cmd.train_annotations);
  manifest.arg("--out", cmd.out);
  manifest.arg("--include-absent", cmd.include_absent);
  manifest.input(cmd.annotations);
  manifest.input(cmd.features);
  manifest.input(cmd.embeddings);
  manifest.input(cmd.checkpoint);
  manifest.input(cmd.train_annotations);
  if (!cmd.zero_shot_path.empty()) {
    manifest.arg("--zero-shot", cmd.zero_shot_path);
    manifest.input(cmd.zero_shot_path);
  }
  manifest.output("report.json");
  manifest.output("per_predicate.csv");
  manifest.write(dir);
  return 0;
}

// --- report ------------------------------------------------------------------

struct ReportCmd {
  std::string baseline_checkpoint, dec_checkpoint;
  std::string annotations, features, embeddings, train_annotations, out;
  int tail = 15;
  int rarest = 5;
};

int run_report(const ReportCmd& cmd) {
  const fs::path dir = ensure_out_dir(cmd.out);
  const LoadedData data = load_bundle(cmd.annotations, cmd.features, cmd.embeddings);
  const FeatureDims bare{1, kSpatialDim, 1};
  const Dataset train =
      load_dataset(cmd.train_annotations, std::nullopt, bare, data.dataset.vocab);
  const auto train_counts = predicate_counts(train);

  const Checkpoint baseline = load_checkpoint(cmd.baseline_checkpoint);
  const Checkpoint dec = load_checkpoint(cmd.dec_checkpoint);
  const EvalOutcome outcome_a = evaluate_checkpoint(baseline.params, data, "", false);
  const EvalOutcome outcome_b = evaluate_checkpoint(dec.params, data, "", false);

  const auto order = by_descending_frequency(data.dataset, train_counts);
  {
    std::ofstream out(dir / "comparison.csv", std::ios::binary);
    out << "predicate,train_count,gt_count,r100_baseline,r100_dec\n";
    for (const int p : order) {
      const auto& slot_a = outcome_a.per_predicate_100.per_predicate[p];
      const auto& slot_b = outcome_b.per_predicate_100.per_predicate[p];
      out << data.dataset.vocab.predicates[p] << ","
          << (train_counts.count(p) ? train_counts.at(p) : 0) << ","
          << slot_a.gt_count << ",";
      if (slot_a.gt_count > 0) out << format_double(slot_a.recall);
      out << ",";
      if (slot_b.gt_count > 0) out << format_double(slot_b.recall);
      out << "\n";
    }
  }

  // Tail = the rarest `tail` predicates by training frequency; the mean
  // skips predicates absent from the test ground truth.
  const auto tail_mean = [&](const EvalOutcome& outcome,
                             const std::vector<int>& predicates) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (const int p : predicates) {
      const auto& slot = outcome.per_predicate_100.per_predicate[p];
      if (slot.gt_count == 0) continue;
      sum += slot.recall;
      ++counted;
    }
    return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
  };

  std::vector<int> tail_set(order.end() - std::min<std::size_t>(cmd.tail, order.size()),
                            order.end());
  std::vector<int> rarest_set(
      order.end() - std::min<std::size_t>(cmd.rarest, order.size()), order.end());

  const double tail_baseline = tail_mean(outcome_a, tail_set);
  const double tail_dec = tail_mean(outcome_b, tail_set);

  json summary;
  summary["tail_size"] = tail_set.size();
  json tail_names = json::array();
  for (const int p : tail_set) tail_names.push_back(data.dataset.vocab.predicates[p]);
  summary["tail_predicates"] = tail_names;
  summary["tail_mean_r100_baseline"] = tail_baseline;
  summary["tail_mean_r100_dec"] = tail_dec;
  summary["tail_margin"] = tail_dec - tail_baseline;
  summary["mr100_baseline"] = outcome_a.mean_recall.at(100);
  summary["mr100_dec"] = outcome_b.mean_recall.at(100);
  json rarest = json::array();
  bool all_rarest_nonzero = true;
  for (const int p : rarest_set) {
    const auto& slot = outcome_b.per_predicate_100.per_predicate[p];
    const bool nonzero = slot.gt_count > 0 && slot.hit_count > 0;
    all_rarest_nonzero = all_rarest_nonzero && nonzero;
    json entry;
    entry["predicate"] = data.dataset.vocab.predicates[p];
    entry["gt_count"] = slot.gt_count;
    entry["r100_dec"] = slot.gt_count > 0 ? slot.recall : 0.0;
    rarest.push_back(entry);
  }
  summary["rarest"] = rarest;
  summary["rarest_all_nonzero_dec"] = all_rarest_nonzero;
  {
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary.dump(2) << "\n";
  }

  std::cout << "report: tail(" << tail_set.size()
            << ") mean R@100 baseline=" << format_double(tail_baseline)
            << " dec=" << format_double(tail_dec)
            << " margin=" << format_double(tail_dec - tail_baseline)
            << " rarest_nonzero=" << (all_rarest_nonzero ? "yes" : "no") << "\n";

  ManifestWriter manifest("report");
  manifest.arg("--baseline", cmd.baseline_checkpoint);
  manifest.arg("--dec", cmd.dec_checkpoint);
  manifest.arg("--ann", cmd.annotations);
  manifest.arg("--features", cmd.features);
  manifest.arg("--emb", cmd.embeddings);
  manifest.arg("--train-ann", cmd.train_annotations);
  manifest.arg("--out", cmd.out);
  manifest.arg("--tail", cmd.tail);
  manifest.arg("--rarest", cmd.rarest);
  manifest.input(cmd.baseline_checkpoint);
  manifest.input(cmd.dec_checkpoint);
  manifest.input(cmd.annotations);
  manifest.input(cmd.features);
  manifest.input(cmd.embeddings);
  manifest.input(cmd.train_annotations);
  manifest.output("comparison.csv");
  manifest.output("summary.json");
  manifest.write(dir);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"scene-graph relation composition toolkit"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "read options from a key = value file");
  app.require_subcommand(1);

  SynthCmd synth_cmd;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--out", synth_cmd.out, "output directory")->required();
  synth->add_option("--seed", synth_cmd.cfg.seed, "generator seed");
  synth->add_option("--train-images", synth_cmd.cfg.n_train_images);
  synth->add_option("--test-images", synth_cmd.cfg.n_test_images);
  synth->add_option("--objects", synth_cmd.cfg.n_object_categories);
  synth->add_option("--predicates", synth_cmd.cfg.n_predicates);
  synth->add_option("--zipf", synth_cmd.cfg.zipf_exponent);
  synth->add_option("--d-visual", synth_cmd.cfg.d_visual);
  synth->add_option("--d-word", synth_cmd.cfg.d_word);
  synth->add_option("--feature-spread", synth_cmd.cfg.feature_spread);
  synth->add_option("--geometry-noise", synth_cmd.cfg.geometry_noise);
  synth->add_option("--group-size", synth_cmd.cfg.group_size);
  synth->add_option("--min-instances", synth_cmd.cfg.min_instances);
  synth->add_option("--max-instances", synth_cmd.cfg.max_instances);
  synth->add_option("--holdout-per-predicate", synth_cmd.cfg.holdout_per_predicate);
  synth->add_option("--holdout-predicates", synth_cmd.cfg.predicates_with_holdout);
  synth->callback([&]() { run_synth(synth_cmd); });

  StatsCmd stats_cmd;
  auto* stats = app.add_subcommand("stats", "predicate frequency table");
  stats->add_option("--ann", stats_cmd.annotations, "annotations file")->required();
  stats->add_option("--out", stats_cmd.out, "output directory")->required();
  stats->callback([&]() { run_stats(stats_cmd); });

  AnchorsCmd anchors_cmd;
  auto* anchors = app.add_subcommand("anchors", "list decomposable triples");
  anchors->add_option("--ann", anchors_cmd.annotations)->required();
  anchors->add_option("--out", anchors_cmd.out)->required();
  anchors->add_option("--delta", anchors_cmd.delta, "IoU threshold");
  anchors->callback([&]() { run_anchors(anchors_cmd); });

  DictDumpCmd dict_cmd;
  auto* dict = app.add_subcommand("dict-dump", "stream components and dump the pool");
  dict->add_option("--ann", dict_cmd.annotations)->required();
  dict->add_option("--features", dict_cmd.features)->required();
  dict->add_option("--emb", dict_cmd.embeddings)->required();
  dict->add_option("--out", dict_cmd.out)->required();
  dict->add_option("--capacity", dict_cmd.capacity);
  dict->add_option("--seed", dict_cmd.seed);
  dict->callback([&]() { run_dict_dump(dict_cmd); });

  ComposeCmd compose_cmd;
  auto* compose = app.add_subcommand("compose", "build a composed-relation corpus");
  compose->add_option("--ann", compose_cmd.annotations)->required();
  compose->add_option("--features", compose_cmd.features)->required();
  compose->add_option("--emb", compose_cmd.embeddings)->required();
  compose->add_option("--out", compose_cmd.out)->required();
  compose->add_option("--delta", compose_cmd.delta, "IoU threshold");
  compose->add_option("--capacity", compose_cmd.capacity, "dictionary capacity");
  compose->add_option("--neighbors", compose_cmd.neighbors, "neighbor categories");
  compose->add_option("--min-cosine", compose_cmd.min_cosine,
                      "minimum neighbor cosine");
  auto* compose_budget = compose->add_option("--budget", compose_cmd.budget);
  compose->add_option("--seed", compose_cmd.seed);
  compose->add_option("--profile", compose_cmd.profile, "desk|paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  compose->callback([&]() {
    if (compose_cmd.profile == "paper" && compose_budget->count() == 0)
      compose_cmd.budget = 600000;
    run_compose(compose_cmd);
  });

  SplitCmd split_cmd;
  auto* split = app.add_subcommand("split", "few-shot or zero-shot split");
  split->add_option("--ann", split_cmd.annotations, "training annotations")
      ->required();
  split->add_option("--out", split_cmd.out)->required();
  split->add_option("--kind", split_cmd.kind, "few|zero")
      ->check(CLI::IsMember({"few", "zero"}));
  split->add_option("--s", split_cmd.s, "images per predicate");
  split->add_option("--seed", split_cmd.seed);
  split->add_option("--test-ann", split_cmd.test_annotations);
  split->callback([&]() { run_split(split_cmd); });

  TrainCmd train_cmd;
  auto* train = app.add_subcommand("train", "train the predicate classifier");
  train->add_option("--ann", train_cmd.annotations)->required();
  train->add_option("--features", train_cmd.features)->required();
  train->add_option("--emb", train_cmd.embeddings)->required();
  train->add_option("--out", train_cmd.out)->required();
  train->add_flag("--dec", train_cmd.dec, "balanced sampling + composed corpus");
  train->add_option("--corpus", train_cmd.corpus_path, "corpus from `compose`");
  train->add_option("--images", train_cmd.images_path, "few-shot split file");
  train->add_option("--delta", train_cmd.delta, "IoU threshold for corpus checks");
  train->add_option("--lr", train_cmd.cfg.learning_rate);
  auto* train_iters = train->add_option("--iterations", train_cmd.cfg.iterations);
  train->add_option("--lambda", train_cmd.cfg.kl_weight);
  train->add_option("--seed", train_cmd.cfg.seed);
  train->add_option("--cap", train_cmd.cfg.per_image_cap, "triples per image");
  train->add_option("--negative-ratio", train_cmd.cfg.negative_ratio);
  train->add_option("--n", train_cmd.cfg.n_predicates, "predicates per batch");
  train->add_option("--k", train_cmd.cfg.k_images, "images per predicate");
  train->add_option("--hidden", train_cmd.cfg.hidden_dim, "refinement width");
  train->add_option("--profile", train_cmd.profile, "desk|paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  train->callback([&]() {
    if (train_cmd.profile == "paper" && train_iters->count() == 0)
      train_cmd.cfg.iterations = 130000;
    run_train(train_cmd);
  });

  EvalCmd eval_cmd;
  auto* eval = app.add_subcommand("eval", "constrained recall evaluation");
  eval->add_option("--ann", eval_cmd.annotations, "test annotations")->required();
  eval->add_option("--features", eval_cmd.features)->required();
  eval->add_option("--emb", eval_cmd.embeddings)->required();
  eval->add_option("--checkpoint", eval_cmd.checkpoint)->required();
  eval->add_option("--train-ann", eval_cmd.train_annotations,
                   "training annotations (frequency table)")
      ->required();
  eval->add_option("--out", eval_cmd.out)->required();
  eval->add_option("--zero-shot", eval_cmd.zero_shot_path, "zero-shot split file");
  eval->add_flag("--include-absent", eval_cmd.include_absent,
                 "count absent predicates as zero recall");
  eval->callback([&]() { run_eval(eval_cmd); });

  ReportCmd report_cmd;
  auto* report = app.add_subcommand("report", "compare two checkpoints");
  report->add_option("--baseline", report_cmd.baseline_checkpoint)->required();
  report->add_option("--dec", report_cmd.dec_checkpoint)->required();
  report->add_option("--ann", report_cmd.annotations, "test annotations")->required();
  report->add_option("--features", report_cmd.features)->required();
  report->add_option("--emb", report_cmd.embeddings)->required();
  report->add_option("--train-ann", report_cmd.train_annotations)->required();
  report->add_option("--out", report_cmd.out)->required();
  report->add_option("--tail", report_cmd.tail, "tail size by train frequency");
  report->add_option("--rarest", report_cmd.rarest, "rarest predicates to check");
  report->callback([&]() { run_report(report_cmd); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("sgdec");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sgdec::cli
