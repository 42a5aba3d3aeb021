#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "ocgraph/errors.hpp"
#include "ocgraph/split.hpp"
#include "testutil.hpp"

using namespace ocgraph;
using namespace ocgraph::testutil;

namespace {

// Label-only fixture: first n_normal nodes class 0, next n_anomalous class 1,
// optionally a tail of unlabeled (-1) nodes. No edges; splitting ignores them.
AttributedGraph label_fixture(std::size_t n_normal, std::size_t n_anomalous,
                              std::size_t n_unlabeled = 0) {
  const std::size_t n = n_normal + n_anomalous + n_unlabeled;
  std::vector<int> labels(n, -1);
  for (std::size_t i = 0; i < n_normal; ++i) labels[i] = 0;
  for (std::size_t i = 0; i < n_anomalous; ++i) labels[n_normal + i] = 1;
  return make_graph(Matrix(n, 1, 0.0), {}, std::move(labels), {"normal", "anomaly"});
}

}  // namespace

TEST_CASE("split sizes follow floor / round-half-up / remainder") {
  // 818 normals at 60/15/25 gives 490 train, 123 + 123 val, 205 + 205 test.
  {
    AttributedGraph g = label_fixture(818, 400);
    OneClassSplit s = make_one_class_split(g, 0, SplitRatios{}, 7);
    CHECK(s.train_ids.size() == 490);
    CHECK(s.val_ids.size() == 246);
    CHECK(s.test_ids.size() == 410);
    CHECK(std::count(s.val_labels.begin(), s.val_labels.end(), 1) == 123);
    CHECK(std::count(s.test_labels.begin(), s.test_labels.end(), 1) == 205);
  }
  // 701 normals: floor(420.6) = 420, floor(105.15 + 0.5) = 105, rest 176.
  {
    AttributedGraph g = label_fixture(701, 300);
    OneClassSplit s = make_one_class_split(g, 0, SplitRatios{}, 7);
    CHECK(s.train_ids.size() == 420);
    CHECK(std::count(s.val_labels.begin(), s.val_labels.end(), 0) == 105);
    CHECK(std::count(s.test_labels.begin(), s.test_labels.end(), 0) == 176);
  }
}

TEST_CASE("split is pure, disjoint, and skips unlabeled nodes") {
  AttributedGraph g = label_fixture(40, 30, 10);
  OneClassSplit s = make_one_class_split(g, 0, SplitRatios{}, 3);
  validate_split(s, g);

  const auto& labels = *g.labels;
  for (NodeId id : s.train_ids) CHECK(labels[id] == 0);
  for (std::size_t i = 0; i < s.val_ids.size(); ++i)
    CHECK(labels[s.val_ids[i]] == (s.val_labels[i] ? 1 : 0));
  for (std::size_t i = 0; i < s.test_ids.size(); ++i)
    CHECK(labels[s.test_ids[i]] == (s.test_labels[i] ? 1 : 0));

  std::unordered_set<NodeId> seen;
  for (const auto* part : {&s.train_ids, &s.val_ids, &s.test_ids})
    for (NodeId id : *part) {
      CHECK(labels[id] != -1);  // unlabeled nodes never drawn
      CHECK(seen.insert(id).second);
    }
  // Every normal node is used exactly once across the three parts.
  std::size_t normals_used = s.train_ids.size();
  normals_used += static_cast<std::size_t>(std::count(s.val_labels.begin(), s.val_labels.end(), 0));
  normals_used +=
      static_cast<std::size_t>(std::count(s.test_labels.begin(), s.test_labels.end(), 0));
  CHECK(normals_used == 40);
}

TEST_CASE("split is deterministic per seed and varies across seeds") {
  AttributedGraph g = label_fixture(100, 60);
  OneClassSplit a = make_one_class_split(g, 0, SplitRatios{}, 42);
  OneClassSplit b = make_one_class_split(g, 0, SplitRatios{}, 42);
  CHECK(a.train_ids == b.train_ids);
  CHECK(a.val_ids == b.val_ids);
  CHECK(a.test_ids == b.test_ids);
  OneClassSplit c = make_one_class_split(g, 0, SplitRatios{}, 43);
  CHECK(a.train_ids != c.train_ids);
}

TEST_CASE("split save/load round-trips and resaves byte-identically") {
  AttributedGraph g = label_fixture(30, 20);
  OneClassSplit s = make_one_class_split(g, 0, SplitRatios{}, 9);
  const std::filesystem::path dir{make_temp_dir("split")};
  const std::string path = (dir / "split.json").string();
  save_split(s, path);

  OneClassSplit r = load_split(path);
  CHECK(r.train_ids == s.train_ids);
  CHECK(r.val_ids == s.val_ids);
  CHECK(r.test_ids == s.test_ids);
  CHECK(r.val_labels == s.val_labels);
  CHECK(r.test_labels == s.test_labels);
  CHECK(r.seed == s.seed);
  validate_split(r, g);

  const std::string path2 = (dir / "resaved.json").string();
  save_split(r, path2);
  CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("corrupt split files are reported as such") {
  const std::filesystem::path dir{make_temp_dir("badsplit")};
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name);
    out << text;
    return (dir / name).string();
  };
  CHECK_THROWS_AS(load_split((dir / "absent.json").string()), ValidationError);
  CHECK_THROWS_AS(load_split(write("trunc.json", R"({"train": [1, 2)")), CorruptFileError);
  CHECK_THROWS_AS(load_split(write("nokey.json", R"({"train": [], "val": [], "test": []})")),
                  CorruptFileError);
  CHECK_THROWS_AS(
      load_split(write("triple.json",
                       R"({"train": [], "val": [[1, 0, 0]], "test": [], "seed": 1})")),
      CorruptFileError);
  CHECK_THROWS_AS(
      load_split(write("label5.json", R"({"train": [], "val": [[1, 5]], "test": [], "seed": 1})")),
      CorruptFileError);
}

TEST_CASE("split input validation") {
  AttributedGraph unlabeled = make_graph(Matrix(4, 1, 0.0), {});
  CHECK_THROWS_AS(make_one_class_split(unlabeled, 0, SplitRatios{}, 1), ValidationError);

  AttributedGraph g = label_fixture(10, 10);
  CHECK_THROWS_AS(make_one_class_split(g, 5, SplitRatios{}, 1), ValidationError);
  CHECK_THROWS_AS(make_one_class_split(g, -1, SplitRatios{}, 1), ValidationError);
  CHECK_THROWS_AS(make_one_class_split(g, 0, SplitRatios{0.5, 0.5, 0.5}, 1), ValidationError);
  CHECK_THROWS_AS(make_one_class_split(g, 0, SplitRatios{1.0, -0.5, 0.5}, 1), ValidationError);

  // No node carries the normal class.
  std::vector<int> labels(6, 1);
  AttributedGraph empty_normal =
      make_graph(Matrix(6, 1, 0.0), {}, std::move(labels), {"normal", "anomaly"});
  CHECK_THROWS_AS(make_one_class_split(empty_normal, 0, SplitRatios{}, 1), ValidationError);
}

TEST_CASE("too few anomalies is a capacity error") {
  // 10 normals need 2 val + 2 test anomalies; only 3 exist.
  AttributedGraph g = label_fixture(10, 3);
  CHECK_THROWS_AS(make_one_class_split(g, 0, SplitRatios{}, 1), CapacityError);
}

TEST_CASE("validate_split rejects tampered splits") {
  AttributedGraph g = label_fixture(20, 15);
  const OneClassSplit good = make_one_class_split(g, 0, SplitRatios{}, 5);

  {
    OneClassSplit s = good;
    s.train_ids[0] = static_cast<NodeId>(g.num_nodes + 3);
    CHECK_THROWS_AS(validate_split(s, g), ValidationError);
  }
  {
    OneClassSplit s = good;
    s.val_ids[0] = s.train_ids[0];  // overlap
    CHECK_THROWS_AS(validate_split(s, g), ValidationError);
  }
  {
    OneClassSplit s = good;
    s.val_labels.pop_back();
    CHECK_THROWS_AS(validate_split(s, g), ValidationError);
  }
}
