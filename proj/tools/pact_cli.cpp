// Copyright 2026 The pact Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: train, classify, eval, bench, synth, inspect-tree.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pact/pact.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

class IoError : public pact::Error {
 public:
  using pact::Error::Error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  const std::string s = read_text(path);
  return {s.begin(), s.end()};
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& data) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_raw_format(const std::string& format, const std::string& path) {
  if (format == "raw") return true;
  if (format == "csv") return false;
  return ends_with(path, ".bin") || ends_with(path, ".raw");
}

pact::SampleStream load_samples(const std::string& path, const std::string& format) {
  if (is_raw_format(format, path)) return {0, pact::read_samples_raw(read_bytes(path))};
  return pact::read_samples_csv(read_text(path));
}

std::shared_ptr<const pact::LikelihoodTree> load_tree(const std::string& path) {
  return std::make_shared<const pact::LikelihoodTree>(pact::deserialize_tree(read_bytes(path)));
}

// Options shared by the commands that run the filter bank.
struct SmootherOptions {
  double alpha = pact::kDefaultAlpha;
  std::vector<double> alphas;
  double threshold = pact::kDefaultThreshold;

  void add_to(CLI::App& app) {
    app.add_option("--alpha", alpha, "AR(1) coefficient for every class")->check(CLI::Range(0.0, 0.999999));
    app.add_option("--alphas", alphas, "Per-class coefficients: rest,walk,run,bike,other")
        ->delimiter(',')
        ->expected(5);
    app.add_option("--threshold", threshold, "Decision threshold")->check(CLI::Range(1e-9, 0.999999));
  }

  pact::ClassifierConfig config() const {
    pact::ClassifierConfig c;
    c.alpha.fill(alpha);
    if (!alphas.empty()) std::copy(alphas.begin(), alphas.end(), c.alpha.begin());
    c.threshold = threshold;
    c.smoother();  // validates
    return c;
  }
};


// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string input, labels, format = "auto", out;
  std::optional<std::uint64_t> corpus;
  std::size_t max_depth = pact::kMaxTreeDepth;
  std::size_t min_leaf = 8;
};

pact::synth::LabeledStream load_labeled(const std::string& input, const std::string& labels,
                                        const std::string& format) {
  pact::SampleStream s = load_samples(input, format);
  pact::LabelStream l = pact::read_labels_csv(read_text(labels));
  if (l.labels.size() != s.samples.size()) {
    throw pact::ParseError(pact::ParseErrc::kLengthMismatch, std::to_string(l.labels.size()) + " labels for " +
                                                                 std::to_string(s.samples.size()) + " samples");
  }
  return {std::move(s.samples), std::move(l.labels)};
}

int cmd_train(const TrainArgs& a) {
  pact::synth::LabeledStream stream = a.corpus ? pact::synth::corpus_stream(*a.corpus)
                                               : load_labeled(a.input, a.labels, a.format);
  const pact::TrainingSet set = pact::synth::build_training_set(stream);
  if (set.empty()) throw pact::InvalidInput("no labeled samples to train on");
  const pact::LikelihoodTree tree = pact::quantize_tree(pact::train_tree(set, {a.max_depth, a.min_leaf}));
  const auto bytes = pact::serialize_tree(tree);
  write_file(a.out, bytes);

  std::printf("training samples: %zu\n", set.size());
  std::printf("training accuracy: %.4f\n", pact::training_accuracy(tree, set));
  std::printf("tree: %zu nodes, %zu leaves, depth %zu, %zu bytes, crc %08x\n", tree.size(), tree.leaf_count(),
              tree.depth(), bytes.size(), pact::tree_id(tree));

  // Per-leaf routing of the training samples.
  std::vector<pact::ClassCounts> per_leaf(tree.size());
  pact::ClassCounts per_class{};
  for (const auto& s : set) {
    ++per_leaf[tree.route(s)][pact::index(s.label)];
    ++per_class[pact::index(s.label)];
  }
  std::printf("%-6s %8s", "leaf", "n");
  for (auto n : pact::kClassNames) std::printf(" %7s", std::string(n).c_str());
  std::printf("  majority\n");
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (!tree.nodes()[i].is_leaf()) continue;
    std::uint64_t n = 0;
    for (auto c : per_leaf[i]) n += c;
    std::printf("%-6zu %8llu", i, static_cast<unsigned long long>(n));
    for (auto c : per_leaf[i]) std::printf(" %7llu", static_cast<unsigned long long>(c));
    std::printf("  %s\n", std::string(pact::name(pact::argmax_class(tree.nodes()[i].likelihoods))).c_str());
  }
  std::printf("%-6s", "class");
  for (std::size_t c = 0; c < pact::kNumClasses; ++c) {
    std::printf(" %s=%llu", std::string(pact::kClassNames[c]).c_str(), static_cast<unsigned long long>(per_class[c]));
  }
  std::printf("\n");
  return kExitOk;
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string tree, input, format = "auto", backend = "float", out, dump_features;
  SmootherOptions smoothing;
};

template <typename C>
std::vector<pact::DecisionRecord> run_with_features(C& c, const pact::SampleStream& s, std::string* features) {
  std::vector<pact::DecisionRecord> out;
  out.reserve(s.samples.size());
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const pact::Decision d = c.step(s.samples[i]);
    out.push_back({d, c.probabilities()});
    if (features) {
      if constexpr (std::is_same_v<C, pact::Classifier>) {
        pact::append_feature_row(*features, s.first_index + i, c.features());
      } else {
        pact::append_feature_row(*features, s.first_index + i, c.features().to_float());
      }
    }
  }
  return out;
}

std::string decisions_csv(const std::vector<pact::DecisionRecord>& recs, std::uint64_t first) {
  std::string out;
  if (recs.empty()) return out;
  out += pact::kDecisionsHeader;
  out += '\n';
  for (std::size_t i = 0; i < recs.size(); ++i) pact::append_decision_row(out, first + i, recs[i]);
  return out;
}

int cmd_classify(const ClassifyArgs& a) {
  const auto tree = load_tree(a.tree);
  const pact::SampleStream s = load_samples(a.input, a.format);
  const pact::ClassifierConfig config = a.smoothing.config();
  std::string features;
  std::string* fp = a.dump_features.empty() ? nullptr : &features;
  if (fp && !s.samples.empty()) {
    features += pact::kFeaturesHeader;
    features += '\n';
  }

  std::vector<pact::DecisionRecord> recs;
  std::optional<pact::EquivalenceReport> report;
  if (a.backend == "fixed") {
    pact::FixedClassifier c(tree, config);
    recs = run_with_features(c, s, fp);
  } else {
    pact::Classifier c(tree, config);
    recs = run_with_features(c, s, fp);
    if (a.backend == "dual") report = pact::run_dual(tree, s.samples, config);
  }

  const std::string csv = decisions_csv(recs, s.first_index);
  if (a.out.empty() || a.out == "-") {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else {
    write_file(a.out, csv);
  }
  if (fp) write_file(a.dump_features, features);
  if (report) std::fprintf(stderr, "%s\n", report->to_json().c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string tree, input, labels, format = "auto", backend = "float";
  std::optional<std::uint64_t> corpus;
  SmootherOptions smoothing;
};

int cmd_eval(const EvalArgs& a) {
  const auto tree = load_tree(a.tree);
  const pact::synth::LabeledStream stream =
      a.corpus ? pact::synth::corpus_stream(pact::synth::eval_seed(*a.corpus))
               : load_labeled(a.input, a.labels, a.format);
  const pact::ClassifierConfig config = a.smoothing.config();
  std::vector<pact::Decision> decisions;
  if (a.backend == "fixed") {
    pact::FixedClassifier c(tree, config);
    decisions = c.run(stream.samples);
  } else {
    pact::Classifier c(tree, config);
    decisions = c.run(stream.samples);
  }
  const pact::ConfusionMatrix m = pact::evaluate(stream.labels, decisions);
  std::printf("%s", m.to_table().c_str());
  std::printf("labeled samples: %llu of %zu\n", static_cast<unsigned long long>(m.total()), stream.size());
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string tree, backend = "float";
  double minutes = 1.0;
  std::uint64_t iterations = 1000, seed = 1;
  bool json = false;
  SmootherOptions smoothing;
};

int cmd_bench(const BenchArgs& a) {
  pact::BenchOptions opt;
  opt.minutes = a.minutes;
  opt.iterations = a.iterations;
  opt.seed = a.seed;
  opt.backend = a.backend == "fixed" ? pact::Backend::kFixed : pact::Backend::kFloat;
  opt.config = a.smoothing.config();
  const pact::BenchReport r = pact::run_bench(load_tree(a.tree), opt);
  if (a.json) {
    std::printf("%s\n", r.to_json().c_str());
    return kExitOk;
  }
  std::printf("backend:          %s\n", a.backend == "fixed" ? "fixed" : "float");
  std::printf("stream:           %llu samples x %llu cycles\n", static_cast<unsigned long long>(r.stream_samples),
              static_cast<unsigned long long>(r.iterations));
  std::printf("mix:              rest %.3f walk %.3f run %.3f other %.3f\n", r.mix[0], r.mix[1], r.mix[2], r.mix[3]);
  std::printf("step time (ns):   mean %.1f  median %.1f  p99 %.1f\n", r.mean_ns, r.median_ns, r.p99_ns);
  std::printf("throughput:       %.0f samples/s\n", r.samples_per_second);
  std::printf("state size:       %zu bytes\n", r.state_bytes);
  std::printf("tree size:        %zu bytes\n", r.tree_bytes);
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string script, corpus, out, labels, format = "auto";
  std::vector<std::string> segments;
  std::uint64_t seed = 1;
  double seconds = 60.0;
};

pact::synth::SessionScript parse_segments(const std::vector<std::string>& specs, std::uint64_t seed) {
  pact::synth::SessionScript script;
  script.seed = seed;
  for (const auto& spec : specs) {
    const auto colon = spec.find(':');
    const auto label = pact::parse_truth(spec.substr(0, colon));
    const auto cls = label ? pact::trained_class(*label) : std::nullopt;
    if (colon == std::string::npos || !cls) throw CLI::ValidationError("--segment", "expected LABEL:SECONDS, got " + spec);
    double secs = 0;
    try {
      secs = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--segment", "bad duration in " + spec);
    }
    if (!(secs > 0)) throw CLI::ValidationError("--segment", "duration must be positive in " + spec);
    script.segments.push_back(pact::synth::default_segment(*cls, secs));
  }
  return script;
}

int cmd_synth(const SynthArgs& a) {
  namespace sy = pact::synth;
  sy::LabeledStream stream;
  if (!a.corpus.empty()) {
    stream = sy::corpus_stream(a.corpus == "eval" ? sy::eval_seed(a.seed) : a.seed);
  } else if (!a.segments.empty()) {
    stream = sy::gen_session(parse_segments(a.segments, a.seed));
  } else if (a.script == "staged") {
    stream = sy::gen_session(sy::staged_protocol_script(a.seed, a.seconds));
  } else if (a.script == "four") {
    stream = sy::gen_session(sy::four_activity_script(a.seed, a.seconds));
  } else if (a.script == "bench") {
    stream = sy::gen_session(sy::bench_script(a.seed, a.seconds / 60.0));
  } else {
    stream = sy::gen_session(parse_segments({a.script + ":" + std::to_string(a.seconds)}, a.seed));
  }
  if (is_raw_format(a.format, a.out)) {
    write_file(a.out, pact::write_samples_raw(stream.samples));
  } else {
    write_file(a.out, pact::write_samples_csv(stream.samples));
  }
  if (!a.labels.empty()) write_file(a.labels, pact::write_labels_csv(stream.labels));
  std::printf("%zu samples (%.1f s)\n", stream.size(), static_cast<double>(stream.size()) / pact::kSampleRateHz);
  return kExitOk;
}

// ---------------------------------------------------------------- inspect-tree

int cmd_inspect(const std::string& path) {
  const auto bytes = read_bytes(path);
  const pact::LikelihoodTree tree = pact::deserialize_tree(bytes);
  std::printf("format: PACT v%u, %zu bytes, crc %08x\n", pact::kTreeFormatVersion, bytes.size(),
              pact::crc32(std::span(bytes).first(bytes.size() - 4)));
  std::printf("nodes: %zu (%zu leaves), root %u, depth %zu\n", tree.size(), tree.leaf_count(), tree.root(),
              tree.depth());
  // Depth-first listing from the root.
  std::vector<std::pair<std::uint16_t, std::size_t>> stack{{tree.root(), 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    const pact::TreeNode& n = tree.nodes()[i];
    std::printf("%*s#%u ", static_cast<int>(2 * d), "", i);
    if (n.is_leaf()) {
      std::printf("leaf [");
      for (std::size_t c = 0; c < pact::kNumClasses; ++c) {
        std::printf("%s%s %.4f", c ? ", " : "", std::string(pact::kClassNames[c]).c_str(), n.likelihoods[c]);
      }
      std::printf("]\n");
    } else {
      std::printf("%s < %.6f ? #%u : #%u\n",
                  std::string(pact::kFeatureNames[static_cast<std::size_t>(n.feature)]).c_str(), n.threshold,
                  n.left, n.right);
      stack.push_back({n.right, d + 1});
      stack.push_back({n.left, d + 1});
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pact - streaming wrist-accelerometer activity classifier"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a likelihood tree and write a PACT tree file");
  auto* t_in = t->add_option("--input", train.input, "Sample stream (CSV or raw binary)");
  auto* t_lab = t->add_option("--labels", train.labels, "Label CSV aligned with the samples");
  auto* t_corpus = t->add_option("--corpus", train.corpus, "Train on the built-in synthetic corpus with this seed");
  t->add_option("--format", train.format, "Input format")->check(CLI::IsMember({"auto", "csv", "raw"}));
  t->add_option("--out,-o", train.out, "Tree file to write")->required();
  t->add_option("--max-depth", train.max_depth, "Maximum tree depth")->check(CLI::Range(0, 7));
  t->add_option("--min-leaf", train.min_leaf, "Split only nodes with at least 2x this many samples")
      ->check(CLI::PositiveNumber);
  t_in->needs(t_lab);
  t_lab->needs(t_in);
  t_corpus->excludes(t_in);
  t->callback([&] {
    if (!train.corpus && train.input.empty()) throw CLI::RequiredError("--input/--labels or --corpus");
  });

  ClassifyArgs cls;
  auto* c = app.add_subcommand("classify", "Classify a sample stream");
  c->add_option("--tree", cls.tree, "PACT tree file")->required();
  c->add_option("--input,-i", cls.input, "Sample stream (CSV or raw binary)")->required();
  c->add_option("--format", cls.format, "Input format")->check(CLI::IsMember({"auto", "csv", "raw"}));
  c->add_option("--backend", cls.backend, "Numeric backend")->check(CLI::IsMember({"float", "fixed", "dual"}));
  c->add_option("--out,-o", cls.out, "Decision CSV (default stdout)");
  c->add_option("--dump-features", cls.dump_features, "Write per-sample features to this CSV");
  cls.smoothing.add_to(*c);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Confusion matrix against ground-truth labels");
  e->add_option("--tree", ev.tree, "PACT tree file")->required();
  auto* e_in = e->add_option("--input,-i", ev.input, "Sample stream");
  auto* e_lab = e->add_option("--labels", ev.labels, "Label CSV aligned with the samples");
  auto* e_corpus = e->add_option("--corpus", ev.corpus, "Evaluate on the held-out synthetic corpus of this seed");
  e->add_option("--format", ev.format, "Input format")->check(CLI::IsMember({"auto", "csv", "raw"}));
  e->add_option("--backend", ev.backend, "Numeric backend")->check(CLI::IsMember({"float", "fixed"}));
  e_in->needs(e_lab);
  e_lab->needs(e_in);
  e_corpus->excludes(e_in);
  ev.smoothing.add_to(*e);
  e->callback([&] {
    if (!ev.corpus && ev.input.empty()) throw CLI::RequiredError("--input/--labels or --corpus");
  });

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Per-sample timing and memory footprint");
  b->add_option("--tree", bench.tree, "PACT tree file")->required();
  b->add_option("--minutes", bench.minutes, "Length of the looped test stream")->check(CLI::Range(0.05, 60.0));
  b->add_option("--iterations", bench.iterations, "Number of passes over the stream")->check(CLI::Range(1, 100000));
  b->add_option("--seed", bench.seed, "Stream seed");
  b->add_option("--backend", bench.backend, "Numeric backend")->check(CLI::IsMember({"float", "fixed"}));
  b->add_flag("--json", bench.json, "Print the report as one JSON line");
  bench.smoothing.add_to(*b);

  SynthArgs syn;
  auto* s = app.add_subcommand("synth", "Generate a synthetic labeled stream");
  s->add_option("--script", syn.script, "staged | four | bench | Rest | Walk | Run | Bike | Other");
  s->add_option("--segment", syn.segments, "LABEL:SECONDS, repeatable; overrides --script");
  s->add_option("--corpus", syn.corpus, "Emit the training or held-out corpus")->check(CLI::IsMember({"train", "eval"}));
  s->add_option("--seed", syn.seed, "Generator seed");
  s->add_option("--seconds", syn.seconds, "Duration of --script sessions")->check(CLI::Range(0.04, 86400.0));
  s->add_option("--out,-o", syn.out, "Sample file to write")->required();
  s->add_option("--labels", syn.labels, "Also write the sidecar label CSV");
  s->add_option("--format", syn.format, "Output format")->check(CLI::IsMember({"auto", "csv", "raw"}));
  s->callback([&] {
    if (syn.script.empty() && syn.segments.empty() && syn.corpus.empty()) {
      throw CLI::RequiredError("--script, --segment or --corpus");
    }
  });

  std::string inspect_path;
  auto* in = app.add_subcommand("inspect-tree", "Print the structure of a PACT tree file");
  in->add_option("tree", inspect_path, "PACT tree file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (t->parsed()) return cmd_train(train);
    if (c->parsed()) return cmd_classify(cls);
    if (e->parsed()) return cmd_eval(ev);
    if (b->parsed()) return cmd_bench(bench);
    if (s->parsed()) return cmd_synth(syn);
    if (in->parsed()) return cmd_inspect(inspect_path);
  } catch (const pact::Error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitData;
  } catch (const CLI::Error& err) {
    // bad option values found after parsing, e.g. a malformed --segment
    std::fprintf(stderr, "%s\n", err.what());
    return kExitUsage;
  }
  return kExitUsage;
}
