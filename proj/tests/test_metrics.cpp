#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <filesystem>

#include "caddm/metrics.hpp"
#include "caddm/rng.hpp"

using namespace caddm;

namespace {

// Quadratic pair-counting oracle, ties half.
double auc_oracle(const std::vector<EvalRecord>& recs) {
  double wins = 0.0;
  size_t pairs = 0;
  for (const auto& p : recs) {
    if (p.label != 1) continue;
    for (const auto& n : recs) {
      if (n.label != 0) continue;
      ++pairs;
      if (p.score > n.score)
        wins += 1.0;
      else if (p.score == n.score)
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

std::vector<EvalRecord> random_records(size_t n, Rng& rng, int tie_grid = 0) {
  std::vector<EvalRecord> out;
  for (size_t i = 0; i < n; ++i) {
    double s = rng.uniform();
    if (tie_grid > 0) s = std::floor(s * tie_grid) / tie_grid;  // force ties
    out.push_back({s, static_cast<int>(rng.uniform_int(0, 1)), ""});
  }
  return out;
}

}  // namespace

TEST_CASE("auc of perfectly separated scores is 1") {
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back({0.8 + 0.01 * i, 1, ""});
  for (int i = 0; i < 10; ++i) recs.push_back({0.1 + 0.01 * i, 0, ""});
  CHECK(*roc_auc(recs) == doctest::Approx(1.0));
}

TEST_CASE("auc of constant scores is one half") {
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 20; ++i) recs.push_back({0.5, i % 2, ""});
  CHECK(*roc_auc(recs) == doctest::Approx(0.5));
}

TEST_CASE("auc is undefined for single-class input") {
  std::vector<EvalRecord> recs{{0.3, 1, ""}, {0.9, 1, ""}};
  CHECK_FALSE(roc_auc(recs).has_value());
}

TEST_CASE("auc matches the pair-counting oracle to 1e-12") {
  Rng rng(101);
  for (int trial = 0; trial < 5; ++trial) {
    const auto recs = random_records(200, rng, trial % 2 ? 25 : 0);
    const auto fast = roc_auc(recs);
    REQUIRE(fast.has_value());
    CHECK(std::abs(*fast - auc_oracle(recs)) < 1e-12);
  }
}

TEST_CASE("auc flips under label inversion and survives monotone transforms") {
  Rng rng(102);
  auto recs = random_records(150, rng, 10);
  const double base = *roc_auc(recs);

  auto flipped = recs;
  for (auto& r : flipped) r.label = 1 - r.label;
  CHECK(*roc_auc(flipped) == doctest::Approx(1.0 - base).epsilon(1e-12));

  auto cubed = recs;
  for (auto& r : cubed) r.score = r.score * r.score * r.score;
  CHECK(*roc_auc(cubed) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("accuracy counts the 0.5 boundary as a fake call") {
  std::vector<EvalRecord> recs{{0.5, 1, ""}, {0.5, 0, ""}, {0.2, 0, ""}, {0.9, 1, ""}};
  CHECK(accuracy(recs) == doctest::Approx(0.75));
  std::vector<EvalRecord> all_right{{0.9, 1, ""}, {0.1, 0, ""}};
  CHECK(accuracy(all_right) == doctest::Approx(1.0));
}

TEST_CASE("accuracy matches a direct count on random records") {
  Rng rng(103);
  const auto recs = random_records(100, rng);
  size_t correct = 0;
  for (const auto& r : recs)
    if ((r.score >= 0.5 ? 1 : 0) == r.label) ++correct;
  CHECK(accuracy(recs) == doctest::Approx(correct / 100.0));
}

TEST_CASE("video scores pass single frames through and average constants") {
  std::vector<EvalRecord> recs{{0.7, 1, "a"}, {0.2, 0, "b"}, {0.2, 0, "b"}, {0.2, 0, "b"}};
  const auto v = video_level_scores(recs);
  REQUIRE(v.size() == 2);
  CHECK(v[0].group == "a");
  CHECK(v[0].score == doctest::Approx(0.7));
  CHECK(v[1].score == doctest::Approx(0.2));
}

TEST_CASE("a 64-frame group selects every other frame") {
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 64; ++i) recs.push_back({i / 100.0, 1, "g"});
  const auto v = video_level_scores(recs, 32);
  REQUIRE(v.size() == 1);
  double expect = 0.0;
  for (int i = 0; i < 64; i += 2) expect += i / 100.0;
  expect /= 32.0;
  CHECK(v[0].score == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mixed labels within a group are rejected") {
  std::vector<EvalRecord> recs{{0.7, 1, "g"}, {0.2, 0, "g"}};
  CHECK_THROWS_AS(video_level_scores(recs), std::invalid_argument);
}

TEST_CASE("score files round trip") {
  Rng rng(104);
  auto recs = random_records(20, rng);
  for (size_t i = 0; i < recs.size(); ++i) recs[i].group = "v" + std::to_string(i / 4);
  const auto path =
      (std::filesystem::temp_directory_path() / "caddm_scores_test.jsonl").string();
  write_eval_records(path, recs);
  const auto back = read_eval_records(path);
  REQUIRE(back.size() == recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].score == recs[i].score);
    CHECK(back[i].label == recs[i].label);
    CHECK(back[i].group == recs[i].group);
  }
  std::filesystem::remove(path);
}
