#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "sgparse/corpus.hpp"
#include "sgparse/retrieval.hpp"
#include "sgparse/spice.hpp"

namespace testing_support {

using namespace sgparse;

inline SceneGraph barrier_graph() {
  SceneGraph g;
  g.objects = {"barrier", "person"};
  g.attributes = {{0, "black"}};
  g.relations = {{0, "in front of", 1}};
  return g;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int status = -1;
  std::string output;
};

// Runs a shell command, capturing stdout.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.output.append(buf.data(), n);
  const int raw = pclose(pipe.release());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

// A retrieval benchmark where every image holds `regions_per_image` regions
// of exactly `tuples_per_region` tuples, and each image has one region whose
// graph is a subgraph of that image only. Equal image sizes make the planted
// image the unique F-score maximum for its query.
struct PlantedIndex {
  std::vector<RegionRecord> records;
  std::vector<ImageEntry> index;
  std::vector<std::pair<std::int64_t, SceneGraph>> queries;  // image id, planted region graph
};

inline PlantedIndex planted_index(std::size_t images, std::uint64_t seed, std::size_t regions_per_image = 3,
                                  std::size_t tuples_per_region = 4) {
  std::vector<RegionRecord> pool;
  std::uint64_t pool_seed = seed;
  auto draw = [&]() {
    for (;;) {
      if (pool.empty()) {
        for (auto& r : generate_synthetic(512, pool_seed++)) {
          if (extract_tuples(r.graph).size() == tuples_per_region) pool.push_back(std::move(r));
        }
      }
      if (!pool.empty()) {
        auto r = std::move(pool.back());
        pool.pop_back();
        return r;
      }
    }
  };

  std::vector<std::vector<RegionRecord>> by_image(images);
  for (auto& regions : by_image) {
    for (std::size_t k = 0; k < regions_per_image; ++k) regions.push_back(draw());
  }
  const SynonymLexicon lex;
  auto entry = [&](std::size_t i) {
    std::vector<SceneGraph> gs;
    for (const auto& r : by_image[i]) gs.push_back(r.graph);
    return build_index({{static_cast<std::int64_t>(i) + 1, gs}}).front();
  };
  std::vector<ImageEntry> index;
  for (std::size_t i = 0; i < images; ++i) index.push_back(entry(i));

  // region 0 of each image is its query; resample until no other image contains it
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < images; ++i) {
      for (std::size_t j = 0; j < images; ++j) {
        if (i == j || !is_subgraph(by_image[i][0].graph, index[j], lex)) continue;
        by_image[i][0] = draw();
        index[i] = entry(i);
        changed = true;
        break;
      }
    }
  }

  PlantedIndex out;
  out.index = std::move(index);
  std::int64_t region_id = 1;
  for (std::size_t i = 0; i < images; ++i) {
    for (auto r : by_image[i]) {
      r.image_id = static_cast<std::int64_t>(i) + 1;
      r.region_id = region_id++;
      out.records.push_back(std::move(r));
    }
    out.queries.push_back({static_cast<std::int64_t>(i) + 1, by_image[i][0].graph});
  }
  return out;
}

}  // namespace testing_support
