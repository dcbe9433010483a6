#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sgparse/sgparse.hpp"

using namespace sgparse;

namespace {

struct Common {
  std::string corpus;
  std::string lexicon;
  std::string checkpoint;
  std::string arc_rule = "left";
  std::string align_mode = "full";
  int epochs = 4;
  double lr = 0.001;
  double adam_eps = 0.01;
  std::uint64_t seed = 1;
  std::string out;

  ArcRule rule() const { return arc_rule == "right" ? ArcRule::RightArc : ArcRule::LeftArc; }
  AlignMode mode() const {
    if (align_mode == "all-syn") return AlignMode::AllSyn;
    if (align_mode == "no-syn") return AlignMode::NoSyn;
    return AlignMode::Full;
  }
  SynonymLexicon load_lexicon() const { return lexicon.empty() ? SynonymLexicon{} : SynonymLexicon::load(lexicon); }
  std::vector<RegionRecord> load_records(const std::string& path) const {
    if (path.empty()) throw ContractViolation("--corpus is required");
    CorpusStats st;
    auto records = load_corpus(path, &st);
    if (st.malformed) std::cerr << "skipped " << st.malformed << " malformed record(s) in " << path << "\n";
    return records;
  }
  nn::ModelParams load_model() const {
    if (checkpoint.empty()) throw ContractViolation("--checkpoint is required");
    return nn::load_checkpoint(checkpoint);
  }
};

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<RegionRecord> filter_ids(const std::vector<RegionRecord>& records, const std::string& ids_path) {
  if (ids_path.empty()) return records;
  const auto ids = load_id_list(ids_path);
  std::vector<RegionRecord> out;
  for (const auto& r : records) {
    if (ids.contains(r.image_id)) out.push_back(r);
  }
  return out;
}

int run_synth(const Common& c, std::size_t count, double synonym_rate) {
  SyntheticGrammar grammar;
  grammar.synonym_rate = synonym_rate;
  const auto lex = c.load_lexicon();
  Output out(c.out);
  save_corpus(out.stream(), generate_synthetic(count, c.seed, grammar, &lex));
  return 0;
}

int run_align(const Common& c) {
  const auto records = c.load_records(c.corpus);
  const auto lex = c.load_lexicon();
  const auto gold = derive_corpus_gold(records, lex, c.rule(), c.mode());
  if (!c.out.empty()) {
    Output out(c.out);
    write_gold(out.stream(), gold);
  }
  std::vector<SceneGraph> oracle;
  std::vector<SceneGraph> refs;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    oracle.push_back(oracle_graph(gold[i]));
    refs.push_back(records[i].graph);
  }
  const auto s = alignment_stats(gold);
  std::printf("arc_rule=%s\nalign_mode=%s\n", c.arc_rule.c_str(), c.align_mode.c_str());
  std::printf("regions=%zu\ntrainable=%zu\ncyclic=%zu\nalignment_conflicts=%zu\nnon_projective=%zu\n", s.regions,
              s.trainable, s.cyclic, s.conflicts, s.non_projective);
  std::printf("node_coverage=%.4f\noracle_f=%.4f\n", s.node_coverage(), corpus_f(oracle, refs, lex));
  return 0;
}

struct TrainArgs {
  std::string eval_corpus;
  std::string train_ids;
  std::string eval_ids;
  int embed = 200;
  int hidden = 256;
  int layers = 2;
  int mlp = 100;
  double dropout_alpha = 0.25;
};

int run_train(const Common& c, const TrainArgs& t) {
  if (c.checkpoint.empty()) throw ContractViolation("--checkpoint is required");
  const auto lex = c.load_lexicon();
  const auto all = c.load_records(c.corpus);
  const auto train_records = filter_ids(all, t.train_ids);
  std::vector<RegionRecord> eval_records;
  if (!t.eval_corpus.empty()) eval_records = filter_ids(c.load_records(t.eval_corpus), t.eval_ids);
  else if (!t.eval_ids.empty()) eval_records = filter_ids(all, t.eval_ids);
  if (!t.train_ids.empty() && !t.eval_ids.empty()) SplitSpec(load_id_list(t.train_ids), load_id_list(t.eval_ids));

  const auto gold = derive_corpus_gold(train_records, lex, c.rule(), c.mode());
  const auto data = training_instances(gold);
  std::vector<Tokens> sentences;
  for (const auto& d : data) sentences.push_back(d.tokens);
  auto params = nn::ModelParams::initialize({t.embed, t.hidden, t.layers, t.mlp}, nn::Vocabulary::build(sentences),
                                            c.rule(), c.seed);
  nn::TrainConfig cfg;
  cfg.learning_rate = c.lr;
  cfg.adam_epsilon = c.adam_eps;
  cfg.epochs = c.epochs;
  cfg.rng_seed = c.seed;
  cfg.word_dropout_alpha = t.dropout_alpha;
  nn::Trainer trainer(params, cfg);
  std::printf("train_regions=%zu trainable=%zu vocab=%zu\n", train_records.size(), data.size(), params.vocab.size());
  for (int e = 1; e <= cfg.epochs; ++e) {
    const auto st = trainer.train_epoch(data);
    std::printf("epoch %d loss=%.4f trained=%zu skipped=%zu", e, st.loss, st.trained, st.skipped);
    if (!eval_records.empty()) std::printf(" eval_f=%.4f", evaluate_parser(params, eval_records, lex).mean_f());
    std::printf("\n");
    std::fflush(stdout);
  }
  nn::save_checkpoint(c.checkpoint, params);
  return 0;
}

int run_parse(const Common& c) {
  const auto params = c.load_model();
  std::string line;
  while (std::getline(std::cin, line)) std::cout << graph_to_json(parse_graph(params, std::string_view(line))).dump() << "\n";
  return 0;
}

int run_eval(const Common& c) {
  const auto params = c.load_model();
  const auto records = c.load_records(c.corpus);
  std::cout << evaluate_parser(params, records, c.load_lexicon()).report();
  return 0;
}

int run_retrieve(const Common& c, bool oracle, std::size_t max_queries) {
  const auto records = c.load_records(c.corpus);
  const auto lex = c.load_lexicon();
  const auto index = build_index(records);
  std::vector<RetrievalQuery> queries;
  for (const auto& r : records) {
    if (max_queries && queries.size() >= max_queries) break;
    RetrievalQuery q{std::to_string(r.region_id), r.phrase, {}};
    for (const auto& img : index) {
      if (is_subgraph(r.graph, img, lex)) q.relevant.insert(img.image_id);
    }
    // oracle queries carry their region id and look the gold graph up by it
    if (oracle) q.description = q.id;
    queries.push_back(std::move(q));
  }
  GraphParser parser;
  std::optional<nn::ModelParams> params;
  if (oracle) {
    std::map<std::string, SceneGraph> gold;
    for (const auto& r : records) gold.emplace(std::to_string(r.region_id), r.graph);
    parser = [gold](const std::string& s) { return gold.at(s); };
  } else {
    params = c.load_model();
    parser = [&params](const std::string& s) { return parse_graph(*params, std::string_view(s)); };
  }
  Output out(c.out);
  export_retrieval(out.stream(), evaluate_retrieval(queries, parser, index, lex));
  return 0;
}

struct TraceArgs {
  std::string sentence;
  std::string graph_json;
  std::int64_t region_id = -1;
};

int run_trace(const Common& c, const TraceArgs& t) {
  std::string sentence = t.sentence;
  std::optional<SceneGraph> gold;
  if (!t.graph_json.empty()) {
    std::ifstream in(t.graph_json);
    if (!in) throw IoError("cannot read " + t.graph_json);
    const auto j = nlohmann::json::parse(in);
    gold = graph_from_json(j);
    if (sentence.empty() && j.contains("phrase")) sentence = j["phrase"].get<std::string>();
  } else if (t.region_id >= 0) {
    for (const auto& r : c.load_records(c.corpus)) {
      if (r.region_id == t.region_id) {
        gold = r.graph;
        if (sentence.empty()) sentence = r.phrase;
      }
    }
    if (!gold) throw ContractViolation("region " + std::to_string(t.region_id) + " not in corpus");
  }
  if (sentence.empty()) throw ContractViolation("no sentence given");
  const auto tokens = tokenize(sentence);
  std::vector<Action> actions;
  if (gold) {
    const int n = static_cast<int>(tokens.size());
    const auto derived = derive_gold(align(tokens, *gold, c.load_lexicon(), c.mode()), *gold, c.rule(), n);
    actions = oracle_parse(n, derived.arcs, derived.reduce_set, ActionInventory(c.rule()));
  } else {
    actions = nn::parse_with_actions(c.load_model(), tokens).actions;
  }
  Output out(c.out);
  out.stream() << format_trace(tokens, actions);
  return 0;
}

int run_gradcheck(const Common& c, int instances) {
  const auto records = generate_synthetic(static_cast<std::size_t>(instances), c.seed);
  const auto gold = derive_corpus_gold(records, SynonymLexicon{}, c.rule(), AlignMode::Full);
  const auto data = training_instances(gold);
  std::vector<Tokens> sentences;
  for (const auto& d : data) sentences.push_back(d.tokens);
  const auto params = nn::ModelParams::initialize(nn::gradcheck_dims(), nn::Vocabulary::build(sentences, 17),
                                                  c.rule(), c.seed);
  double worst = 0.0;
  std::string worst_tensor;
  for (const auto& inst : data) {
    const auto r = nn::grad_check(params, inst, 1e-5);
    if (r.max_relative_error > worst) {
      worst = r.max_relative_error;
      worst_tensor = r.worst_tensor;
    }
  }
  std::printf("instances=%zu\nmax_relative_error=%.3e\nworst_tensor=%s\n", data.size(), worst,
              worst_tensor.empty() ? "-" : worst_tensor.c_str());
  return worst < 1e-4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene graph parsing toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value file; command-line flags win");

  Common c;
  app.add_option("--corpus", c.corpus, "line-delimited region records");
  app.add_option("--lexicon", c.lexicon, "synonym lexicon (word<TAB>syn,syn)");
  app.add_option("--checkpoint", c.checkpoint, "model checkpoint path");
  app.add_option("--arc-rule", c.arc_rule)->check(CLI::IsMember({"left", "right"}));
  app.add_option("--align-mode", c.align_mode)->check(CLI::IsMember({"full", "all-syn", "no-syn"}));
  app.add_option("--epochs", c.epochs)->check(CLI::PositiveNumber);
  app.add_option("--lr", c.lr)->check(CLI::PositiveNumber);
  app.add_option("--adam-eps", c.adam_eps)->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed);
  app.add_option("-o,--out", c.out, "output file (stdout when omitted)");

  auto* synth = app.add_subcommand("synth", "emit a synthetic corpus");
  std::size_t count = 100;
  double synonym_rate = 0.0;
  synth->add_option("-n,--count", count);
  synth->add_option("--synonym-rate", synonym_rate)->check(CLI::Range(0.0, 1.0));

  auto* align_cmd = app.add_subcommand("align", "derive gold arcs and report alignment statistics");

  auto* train = app.add_subcommand("train", "train a parser and write a checkpoint");
  TrainArgs ta;
  train->add_option("--eval-corpus", ta.eval_corpus);
  train->add_option("--train-ids", ta.train_ids, "image ids, one per line");
  train->add_option("--eval-ids", ta.eval_ids, "image ids, one per line");
  train->add_option("--embed", ta.embed)->check(CLI::PositiveNumber);
  train->add_option("--hidden", ta.hidden)->check(CLI::PositiveNumber);
  train->add_option("--layers", ta.layers)->check(CLI::PositiveNumber);
  train->add_option("--mlp", ta.mlp)->check(CLI::PositiveNumber);
  train->add_option("--dropout-alpha", ta.dropout_alpha)->check(CLI::NonNegativeNumber);

  auto* parse_cmd = app.add_subcommand("parse", "parse stdin lines into scene graphs");
  auto* eval = app.add_subcommand("eval", "score a checkpoint on a corpus");

  auto* retrieve = app.add_subcommand("retrieve", "rank corpus images for every region description");
  bool oracle = false;
  std::size_t max_queries = 0;
  retrieve->add_flag("--oracle", oracle, "use gold graphs instead of a checkpoint");
  retrieve->add_option("--max-queries", max_queries);

  auto* trace = app.add_subcommand("trace", "print the transition sequence for one sentence");
  TraceArgs tr;
  trace->add_option("--sentence", tr.sentence);
  trace->add_option("--graph-json", tr.graph_json, "gold graph as one corpus record");
  trace->add_option("--region-id", tr.region_id, "take sentence and gold graph from --corpus");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check on a small model");
  int instances = 10;
  gradcheck->add_option("--instances", instances)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth) return run_synth(c, count, synonym_rate);
    if (*align_cmd) return run_align(c);
    if (*train) return run_train(c, ta);
    if (*parse_cmd) return run_parse(c);
    if (*eval) return run_eval(c);
    if (*retrieve) return run_retrieve(c, oracle, max_queries);
    if (*trace) return run_trace(c, tr);
    if (*gradcheck) return run_gradcheck(c, instances);
  } catch (const std::exception& e) {
    std::cerr << "sgparse: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
