#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sgparse/corpus.hpp"
#include "sgparse/lexicon.hpp"
#include "sgparse/parallel.hpp"
#include "sgparse/scene_graph.hpp"
#include "sgparse/spice.hpp"

namespace sgparse {

struct ImageEntry {
  std::int64_t image_id = 0;
  SceneGraph graph;  // union of the region graphs, objects concatenated
  TupleBag tuples;
};

// Concatenates region graphs, re-indexing objects so every region keeps its
// own instances.
inline SceneGraph combine_graphs(const std::vector<SceneGraph>& regions) {
  SceneGraph out;
  for (const auto& g : regions) {
    const std::size_t offset = out.objects.size();
    out.objects.insert(out.objects.end(), g.objects.begin(), g.objects.end());
    for (const auto& a : g.attributes) out.attributes.push_back({a.object + offset, a.label});
    for (const auto& r : g.relations) out.relations.push_back({r.subject + offset, r.label, r.object + offset});
  }
  return out;
}

inline std::vector<ImageEntry> build_index(const std::vector<std::pair<std::int64_t, std::vector<SceneGraph>>>& images) {
  std::vector<ImageEntry> index;
  index.reserve(images.size());
  for (const auto& [id, regions] : images) {
    auto g = combine_graphs(regions);
    auto bag = extract_tuples(g);
    index.push_back({id, std::move(g), std::move(bag)});
  }
  return index;
}

// Groups corpus records by image id (ascending).
inline std::vector<ImageEntry> build_index(const std::vector<RegionRecord>& records) {
  std::map<std::int64_t, std::vector<SceneGraph>> by_image;
  for (const auto& r : records) by_image[r.image_id].push_back(r.graph);
  return build_index(std::vector<std::pair<std::int64_t, std::vector<SceneGraph>>>(by_image.begin(), by_image.end()));
}

// True when every query tuple can be matched one-to-one inside the image.
inline bool is_subgraph(const SceneGraph& query, const ImageEntry& image, const SynonymLexicon& lexicon) {
  const auto q = extract_tuples(query);
  return match_count(q, image.tuples, lexicon).total() == q.size();
}

inline std::vector<std::int64_t> rank_images(const SceneGraph& query, const std::vector<ImageEntry>& index,
                                             const SynonymLexicon& lexicon) {
  if (index.empty()) throw ContractViolation("rank_images: empty index");
  const auto q = extract_tuples(query);
  std::vector<std::pair<double, std::int64_t>> scored;
  scored.reserve(index.size());
  for (const auto& img : index) scored.emplace_back(f_score(q, img.tuples, lexicon).f, img.image_id);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::int64_t> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.second);
  return out;
}

struct RetrievalQuery {
  std::string id;
  std::string description;
  std::set<std::int64_t> relevant;
};

struct QueryOutcome {
  std::string id;
  std::vector<std::int64_t> ranking;
  int best_rank = 0;  // 1-based rank of the best relevant image
};

struct RetrievalResult {
  std::vector<QueryOutcome> queries;
  double recall_at_5 = 0.0;
  double recall_at_10 = 0.0;
  double median_rank = 0.0;
  std::vector<std::string> excluded;  // queries with no relevant image
};

// Median of the best ranks; the mean of the two middle values for an even count.
inline double median_rank(std::vector<int> ranks) {
  if (ranks.empty()) return 0.0;
  std::sort(ranks.begin(), ranks.end());
  const std::size_t m = ranks.size() / 2;
  if (ranks.size() % 2 == 1) return ranks[m];
  return (ranks[m - 1] + ranks[m]) / 2.0;
}

using GraphParser = std::function<SceneGraph(const std::string&)>;

// The parser must be safe to call concurrently.
inline RetrievalResult evaluate_retrieval(const std::vector<RetrievalQuery>& queries, const GraphParser& parser,
                                          const std::vector<ImageEntry>& index, const SynonymLexicon& lexicon) {
  RetrievalResult result;
  std::vector<const RetrievalQuery*> kept;
  for (const auto& q : queries) {
    if (q.relevant.empty()) {
      result.excluded.push_back(q.id);
    } else {
      kept.push_back(&q);
    }
  }
  result.queries = parallel_map(kept.size(), [&](std::size_t i) {
    const auto& q = *kept[i];
    QueryOutcome o{q.id, rank_images(parser(q.description), index, lexicon), 0};
    for (std::size_t r = 0; r < o.ranking.size(); ++r) {
      if (q.relevant.contains(o.ranking[r])) {
        o.best_rank = static_cast<int>(r) + 1;
        break;
      }
    }
    // relevant images absent from the index rank after everything else
    if (o.best_rank == 0) o.best_rank = static_cast<int>(o.ranking.size()) + 1;
    return o;
  });
  if (result.queries.empty()) return result;
  std::vector<int> ranks;
  std::size_t hit5 = 0;
  std::size_t hit10 = 0;
  for (const auto& o : result.queries) {
    ranks.push_back(o.best_rank);
    hit5 += o.best_rank <= 5;
    hit10 += o.best_rank <= 10;
  }
  const double n = static_cast<double>(result.queries.size());
  result.recall_at_5 = static_cast<double>(hit5) / n;
  result.recall_at_10 = static_cast<double>(hit10) / n;
  result.median_rank = median_rank(std::move(ranks));
  return result;
}

// One line per query: id, best rank, top-10 image ids; then a summary block.
inline void export_retrieval(std::ostream& out, const RetrievalResult& r) {
  for (const auto& q : r.queries) {
    out << q.id << "\t" << q.best_rank << "\t";
    for (std::size_t i = 0; i < std::min<std::size_t>(10, q.ranking.size()); ++i) {
      if (i) out << ",";
      out << q.ranking[i];
    }
    out << "\n";
  }
  out << "queries=" << r.queries.size() << "\n";
  out << "excluded=" << r.excluded.size() << "\n";
  out << "recall_at_5=" << r.recall_at_5 << "\n";
  out << "recall_at_10=" << r.recall_at_10 << "\n";
  out << "median_rank=" << r.median_rank << "\n";
}

}  // namespace sgparse
