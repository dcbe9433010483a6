#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgparse/errors.hpp"
#include "sgparse/lexicon.hpp"
#include "sgparse/scene_graph.hpp"
#include "sgparse/text.hpp"

namespace sgparse {

struct RegionRecord {
  std::int64_t image_id = 0;
  std::int64_t region_id = 0;
  std::string phrase;
  SceneGraph graph;

  friend bool operator==(const RegionRecord&, const RegionRecord&) = default;
};

// One record per line:
// {"image_id", "region_id", "phrase", "objects": [{"id","name"}],
//  "attributes": [{"object_id","attribute"}],
//  "relationships": [{"subject_id","predicate","object_id"}]}
inline nlohmann::json to_json(const RegionRecord& r) {
  nlohmann::json objects = nlohmann::json::array();
  for (std::size_t i = 0; i < r.graph.objects.size(); ++i) objects.push_back({{"id", i}, {"name", r.graph.objects[i]}});
  nlohmann::json attributes = nlohmann::json::array();
  for (const auto& a : r.graph.attributes) attributes.push_back({{"object_id", a.object}, {"attribute", a.label}});
  nlohmann::json relationships = nlohmann::json::array();
  for (const auto& x : r.graph.relations) {
    relationships.push_back({{"subject_id", x.subject}, {"predicate", x.label}, {"object_id", x.object}});
  }
  return {{"image_id", r.image_id},     {"region_id", r.region_id},   {"phrase", r.phrase},
          {"objects", objects},         {"attributes", attributes},   {"relationships", relationships}};
}

inline std::string serialize(const RegionRecord& r) { return to_json(r).dump(); }

// Graph-only JSON (same object/attribute/relationship layout), used for parse output.
inline nlohmann::json graph_to_json(const SceneGraph& g) {
  auto j = to_json(RegionRecord{0, 0, "", g});
  return {{"objects", j["objects"]}, {"attributes", j["attributes"]}, {"relationships", j["relationships"]}};
}

// Throws ContractViolation on any schema problem. Labels are normalized.
inline SceneGraph graph_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& why) -> SceneGraph { throw ContractViolation("bad record: " + why); };
  if (!j.is_object()) return fail("not an object");
  SceneGraph g;
  std::map<std::int64_t, std::size_t> index;
  auto label = [&](const nlohmann::json& v, const char* what) {
    if (!v.is_string()) throw ContractViolation(std::string("bad record: ") + what + " is not a string");
    auto s = normalize_label(v.get<std::string>());
    if (s.empty()) throw ContractViolation(std::string("bad record: empty ") + what);
    return s;
  };
  auto id_of = [&](const nlohmann::json& v, const char* what) -> std::size_t {
    if (!v.is_number_integer()) throw ContractViolation(std::string("bad record: ") + what + " is not an integer");
    auto it = index.find(v.get<std::int64_t>());
    if (it == index.end()) throw ContractViolation(std::string("bad record: unknown object id in ") + what);
    return it->second;
  };
  for (const auto& o : j.value("objects", nlohmann::json::array())) {
    if (!o.is_object() || !o.contains("id") || !o["id"].is_number_integer()) return fail("object without integer id");
    const auto id = o["id"].get<std::int64_t>();
    if (index.contains(id)) return fail("duplicate object id");
    index[id] = g.objects.size();
    g.objects.push_back(label(o.value("name", nlohmann::json()), "object name"));
  }
  for (const auto& a : j.value("attributes", nlohmann::json::array())) {
    if (!a.is_object()) return fail("attribute entry");
    g.attributes.push_back({id_of(a.value("object_id", nlohmann::json()), "attribute"),
                            label(a.value("attribute", nlohmann::json()), "attribute")});
  }
  for (const auto& r : j.value("relationships", nlohmann::json::array())) {
    if (!r.is_object()) return fail("relationship entry");
    const auto s = id_of(r.value("subject_id", nlohmann::json()), "relationship subject");
    const auto o = id_of(r.value("object_id", nlohmann::json()), "relationship object");
    g.relations.push_back({s, label(r.value("predicate", nlohmann::json()), "predicate"), o});
  }
  return g;
}

inline RegionRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ContractViolation("bad record: not an object");
  for (const char* k : {"image_id", "region_id"}) {
    if (!j.contains(k) || !j[k].is_number_integer()) throw ContractViolation(std::string("bad record: ") + k);
  }
  if (!j.contains("phrase") || !j["phrase"].is_string()) throw ContractViolation("bad record: phrase");
  RegionRecord r;
  r.image_id = j["image_id"].get<std::int64_t>();
  r.region_id = j["region_id"].get<std::int64_t>();
  r.phrase = j["phrase"].get<std::string>();
  r.graph = graph_from_json(j);
  return r;
}

struct CorpusStats {
  std::size_t lines = 0;
  std::size_t loaded = 0;
  std::size_t malformed = 0;
};

// Streams line-delimited records. Malformed lines (bad JSON, schema
// violations, duplicate region ids) are skipped and counted; more than 10%
// malformed raises CorpusCorrupt.
inline std::vector<RegionRecord> load_corpus(std::istream& in, CorpusStats* stats = nullptr) {
  std::vector<RegionRecord> out;
  CorpusStats st;
  std::set<std::int64_t> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++st.lines;
    try {
      auto r = record_from_json(nlohmann::json::parse(line));
      if (!seen.insert(r.region_id).second) throw ContractViolation("duplicate region id");
      out.push_back(std::move(r));
      ++st.loaded;
    } catch (const nlohmann::json::exception&) {
      ++st.malformed;
    } catch (const ContractViolation&) {
      ++st.malformed;
    }
  }
  if (stats) *stats = st;
  if (st.malformed * 10 > st.lines) {
    throw CorpusCorrupt(std::to_string(st.malformed) + " of " + std::to_string(st.lines) + " records malformed");
  }
  return out;
}

inline std::vector<RegionRecord> load_corpus(const std::string& path, CorpusStats* stats = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus " + path);
  return load_corpus(in, stats);
}

inline void save_corpus(std::ostream& out, const std::vector<RegionRecord>& records) {
  for (const auto& r : records) out << serialize(r) << "\n";
}

inline void save_corpus(const std::string& path, const std::vector<RegionRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus " + path);
  save_corpus(out, records);
}

class SplitSpec {
 public:
  SplitSpec(std::set<std::int64_t> train, std::set<std::int64_t> eval) : train_(std::move(train)), eval_(std::move(eval)) {
    for (auto id : train_) {
      if (eval_.contains(id)) throw ContractViolation("image " + std::to_string(id) + " is in both splits");
    }
  }
  const std::set<std::int64_t>& train() const { return train_; }
  const std::set<std::int64_t>& eval() const { return eval_; }

 private:
  std::set<std::int64_t> train_;
  std::set<std::int64_t> eval_;
};

// One image id per line.
inline std::set<std::int64_t> load_id_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read id list " + path);
  std::set<std::int64_t> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    try {
      ids.insert(std::stoll(t));
    } catch (const std::exception&) {
      throw IoError("bad image id '" + t + "' in " + path);
    }
  }
  return ids;
}

struct Splits {
  std::vector<RegionRecord> train;
  std::vector<RegionRecord> eval;
};

inline Splits make_splits(const std::vector<RegionRecord>& corpus, const SplitSpec& split) {
  Splits out;
  for (const auto& r : corpus) {
    if (split.train().contains(r.image_id)) {
      out.train.push_back(r);
    } else if (split.eval().contains(r.image_id)) {
      out.eval.push_back(r);
    }
  }
  return out;
}

// Knobs of the synthetic region grammar.
struct SyntheticGrammar {
  int max_attributes = 2;       // per noun phrase
  int max_relations = 2;        // length of the relation chain
  double determiner_rate = 0.5;
  double conjunction_rate = 0.15;  // "NP and NP" instead of a chain
  double synonym_rate = 0.0;    // replace an object word by a lexicon synonym
  int regions_per_image = 5;
};

namespace detail {

struct SyntheticVocabulary {
  std::vector<std::string> objects{"man",      "woman",         "dog",          "cat",         "table",
                                   "chair",    "car",           "tree",         "building",    "window",
                                   "shirt",    "hat",           "plate",        "cup",         "horse",
                                   "tennis racket", "traffic light", "fire hydrant", "street sign", "cell phone"};
  std::vector<std::string> attributes{"black", "white",   "red",      "blue",       "green",     "wooden",
                                      "large", "small",   "tall",     "striped",    "dark brown", "light blue"};
  std::vector<std::string> relations{"on",     "holding", "wearing",     "near",    "behind",
                                     "under",  "in front of", "next to", "on top of", "sitting on"};
  std::vector<std::string> determiners{"the", "a"};
};

}  // namespace detail

// Samples region descriptions with their exact scene graphs. With
// synonym_rate = 0 every node is recoverable by word-by-word alignment and
// the gold arcs are projective. Objects, attributes and relations are listed
// in sentence order.
inline std::vector<RegionRecord> generate_synthetic(std::size_t n, std::uint64_t seed,
                                                    const SyntheticGrammar& grammar = {},
                                                    const SynonymLexicon* lexicon = nullptr) {
  const detail::SyntheticVocabulary vocab;
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto count = [&](int max) { return std::uniform_int_distribution<int>(0, max)(rng); };

  std::vector<RegionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RegionRecord rec;
    rec.region_id = static_cast<std::int64_t>(i) + 1;
    rec.image_id = static_cast<std::int64_t>(i / static_cast<std::size_t>(std::max(1, grammar.regions_per_image))) + 1;
    Tokens words;
    auto noun_phrase = [&]() {
      if (coin(grammar.determiner_rate)) words.push_back(pick(vocab.determiners));
      const std::size_t obj = rec.graph.objects.size();
      std::vector<std::string> attrs;
      const int k = count(grammar.max_attributes);
      for (int a = 0; a < k; ++a) {
        const auto& label = pick(vocab.attributes);
        if (std::find(attrs.begin(), attrs.end(), label) == attrs.end()) attrs.push_back(label);
      }
      for (const auto& a : attrs) {
        rec.graph.attributes.push_back({obj, a});
        words.push_back(a);
      }
      const auto& noun = pick(vocab.objects);
      rec.graph.objects.push_back(noun);
      std::string surface = noun;
      if (lexicon && coin(grammar.synonym_rate)) {
        const auto syns = lexicon->lookup(noun);
        if (!syns.empty()) surface = *syns.begin();
      }
      for (auto& w : tokenize(surface)) words.push_back(w);
      return obj;
    };

    std::size_t head = noun_phrase();
    if (coin(grammar.conjunction_rate)) {
      words.push_back("and");
      noun_phrase();
    } else {
      const int rels = count(grammar.max_relations);
      for (int r = 0; r < rels; ++r) {
        const auto& rel = pick(vocab.relations);
        for (auto& w : tokenize(rel)) words.push_back(w);
        const std::size_t obj = noun_phrase();
        rec.graph.relations.push_back({head, rel, obj});
        head = obj;
      }
    }
    std::string phrase = join(words);
    if (!phrase.empty()) phrase[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(phrase[0])));
    rec.phrase = phrase + ".";
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace sgparse
