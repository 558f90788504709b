#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "gsal/error.hpp"
#include "gsal/evaluation.hpp"
#include "gsal/synthetic.hpp"
#include "oracles.hpp"

using namespace gsal;

namespace {

struct Scored {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Scores drawn from a small set of levels so that ties are frequent.
Scored random_scored(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(0, 9);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution coin(0.4);
  Scored s;
  for (std::size_t i = 0; i < n; ++i) {
    s.scores.push_back(coin(rng) ? level(rng) * 0.1 : nd(rng));
    s.labels.push_back(coin(rng) ? 1 : -1);
  }
  s.labels[0] = 1;
  s.labels[1] = -1;
  return s;
}

}  // namespace

TEST_CASE("auc") {
  CHECK(auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, -1, -1}) == 1.0);
  CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{1, 1, -1, -1}) == 0.0);
  CHECK(auc(std::vector<double>(6, 0.3), std::vector<int>{1, -1, 1, -1, -1, 1}) == 0.5);

  SUBCASE("matches pair enumeration exactly") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto s = random_scored(200, seed);
      CHECK(auc(s.scores, s.labels) == oracle::auc_pairs(s.scores, s.labels));
    }
  }
  SUBCASE("invariant under increasing transforms") {
    const auto s = random_scored(150, 99);
    std::vector<double> t;
    for (double x : s.scores) t.push_back(std::exp(3.0 * x) + 7.0);
    CHECK(auc(t, s.labels) == auc(s.scores, s.labels));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}),
                    UndefinedMetricError);
    CHECK_THROWS_AS(auc(std::vector<double>{0.1}, std::vector<int>{1, -1}), DimensionError);
  }
}

TEST_CASE("tjur_r2") {
  const std::vector<int> labels{1, -1, 1, 1, -1};
  CHECK(tjur_r2(std::vector<double>(5, 0.5), labels) == 0.0);
  CHECK(tjur_r2(std::vector<double>{1, 0, 1, 1, 0}, labels) == 1.0);
  CHECK_THROWS_AS(tjur_r2(std::vector<double>{0.2, 0.3}, std::vector<int>{-1, -1}),
                  UndefinedMetricError);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u;
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = random_scored(80, 40 + rep);
    std::vector<double> probs;
    for (std::size_t i = 0; i < 80; ++i) probs.push_back(u(rng));
    // Independent path: two separate filtered vectors.
    std::vector<double> pos;
    std::vector<double> neg;
    for (std::size_t i = 0; i < 80; ++i) (s.labels[i] == 1 ? pos : neg).push_back(probs[i]);
    double mp = 0;
    double mn = 0;
    for (double p : pos) mp += p / pos.size();
    for (double p : neg) mn += p / neg.size();
    const double r2 = tjur_r2(probs, s.labels);
    CHECK(r2 == doctest::Approx(mp - mn).epsilon(1e-12));
    CHECK(r2 >= -1.0);
    CHECK(r2 <= 1.0);
  }
}

TEST_CASE("accuracy") {
  const Dimensions dims{4, 2};
  SUBCASE("a model that reproduces the labels") {
    auto model = GlobalSalienceModel::zeros(dims);
    model.w = {3.0, 1.0, -1.0, -3.0};
    std::vector<Trial> trials;
    for (int u = 0; u < 4; ++u) {
      for (int v = 0; v < 4; ++v) {
        if (u == v) continue;
        trials.push_back({u % 2, u, v, Side::none, Side::none,
                          v < u ? Outcome::right_first : Outcome::left_first});
      }
    }
    CHECK(accuracy(model, trials) == 1.0);
  }
  SUBCASE("zero model predicts right everywhere") {
    const auto model = GlobalSalienceModel::zeros(dims);
    std::vector<Trial> trials;
    std::size_t right = 0;
    std::mt19937_64 rng(2);
    std::bernoulli_distribution coin(0.37);
    for (int i = 0; i < 100; ++i) {
      const bool r = coin(rng);
      right += r;
      trials.push_back({i % 2, i % 4, (i + 1) % 4, Side::none, Side::none,
                        r ? Outcome::right_first : Outcome::left_first});
    }
    CHECK(accuracy(model, trials) == static_cast<double>(right) / 100.0);
  }
  SUBCASE("true model reaches the Bayes rate") {
    const Dimensions big{20, 5};
    const auto truth = synthetic::standard_normal_truth(big, 11);
    const auto sample = synthetic::sample_trials(truth, {1000, 0.5, 0.5}, 12);
    CHECK(std::abs(accuracy(truth, sample.trials) - synthetic::bayes_rate(sample.p_right)) <= 0.03);
  }
}

TEST_CASE("fold plans") {
  SUBCASE("4 subjects in 2 folds") {
    const std::vector<int> subjects{10, 11, 12, 13};
    const auto plan = make_leave2out_plan(subjects, 2);
    REQUIRE(plan.folds.size() == 2);
    for (const auto& f : plan.folds) {
      CHECK(f.test_subjects.size() == 2);
      CHECK(f.train_subjects.size() == 2);
    }
    std::set<int> all(plan.folds[0].test_subjects.begin(), plan.folds[0].test_subjects.end());
    all.insert(plan.folds[1].test_subjects.begin(), plan.folds[1].test_subjects.end());
    CHECK(all == std::set<int>(subjects.begin(), subjects.end()));
  }
  SUBCASE("49 subjects in 25 folds") {
    std::vector<int> subjects(49);
    std::iota(subjects.begin(), subjects.end(), 0);
    const auto plan = make_leave2out_plan(subjects, 25, 3);
    std::size_t pairs = 0;
    std::size_t singles = 0;
    for (const auto& f : plan.folds) {
      pairs += f.test_subjects.size() == 2;
      singles += f.test_subjects.size() == 1;
      CHECK(f.train_subjects.size() + f.test_subjects.size() == 49);
    }
    CHECK(pairs == 24);
    CHECK(singles == 1);
  }
  SUBCASE("partition property for arbitrary plans") {
    for (int n = 2; n < 30; ++n) {
      std::vector<int> subjects(static_cast<std::size_t>(n));
      std::iota(subjects.begin(), subjects.end(), 100);
      for (int k = 1; k <= n; k += 3) {
        const auto plan = make_subject_folds(subjects, k, static_cast<std::uint64_t>(n * k));
        std::multiset<int> seen;
        for (const auto& f : plan.folds) {
          seen.insert(f.test_subjects.begin(), f.test_subjects.end());
          for (int t : f.test_subjects) {
            CHECK(std::find(f.train_subjects.begin(), f.train_subjects.end(), t) ==
                  f.train_subjects.end());
          }
        }
        CHECK(seen == std::multiset<int>(subjects.begin(), subjects.end()));
      }
    }
  }
  SUBCASE("seeded and validated") {
    const std::vector<int> subjects{1, 2, 3, 4, 5, 6};
    CHECK(make_subject_folds(subjects, 3, 9).folds[0].test_subjects ==
          make_subject_folds(subjects, 3, 9).folds[0].test_subjects);
    CHECK_THROWS_AS(make_subject_folds(subjects, 0, 0), ProtocolError);
    CHECK_THROWS_AS(make_subject_folds(subjects, 7, 0), ProtocolError);
  }
  SUBCASE("no test trial enters training") {
    const auto truth = synthetic::standard_normal_truth({6, 8}, 1);
    const auto sample = synthetic::sample_trials(truth, {20, 0.5, 0.5}, 2);
    const auto plan = make_leave2out_plan(distinct_subjects(sample.trials), 4, 0);
    for (const auto& f : plan.folds) {
      const auto split = split_trials(sample.trials, f);
      CHECK(split.train.size() + split.test.size() == sample.trials.size());
      for (const auto& t : split.train) {
        CHECK(std::find(f.test_subjects.begin(), f.test_subjects.end(), t.subject_id) ==
              f.test_subjects.end());
      }
    }
  }
}

TEST_CASE("C grid and selection") {
  const auto grid = default_C_grid();
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(grid.back() == doctest::Approx(1e3).epsilon(1e-12));
  CHECK(grid[3] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::is_sorted(grid.begin(), grid.end()));

  const Dimensions dims{10, 6};
  const auto truth = synthetic::standard_normal_truth(dims, 3);
  const auto sample = synthetic::sample_trials(truth, {40, 0.5, 0.5}, 4);

  SUBCASE("single value grid") {
    const std::vector<double> one{0.7};
    CHECK(cv_select_C(sample.trials, dims, one).best_C == 0.7);
  }
  SUBCASE("too few subjects") {
    std::vector<Trial> few;
    for (const auto& t : sample.trials) {
      if (t.subject_id < 4) few.push_back(t);
    }
    CHECK_THROWS_AS(cv_select_C(few, dims, grid), ProtocolError);
  }
  SUBCASE("large C overfits a sparse design") {
    // Strong task effect, no image signal, two trials per subject: image
    // columns can only memorize noise.
    const Dimensions sparse{100, 50};
    auto gen = GlobalSalienceModel::zeros(sparse);
    gen.tau = 2.0;
    const auto data = synthetic::sample_trials(gen, {2, 1.0, 0.0}, 17);
    const auto sel = cv_select_C(data.trials, sparse, grid);
    MESSAGE("validation accuracy per C:");
    for (std::size_t c = 0; c < grid.size(); ++c) {
      MESSAGE(grid[c], " -> ", sel.mean_accuracy[c]);
    }
    CHECK(sel.best_C < grid.back());
    CHECK(sel.mean_accuracy.back() < *std::max_element(sel.mean_accuracy.begin(),
                                                       sel.mean_accuracy.end()));

    // Strong regularization leaves only the task coefficient in play, so
    // these two values tie and the smaller one wins.
    const std::vector<double> tied{2e-3, 1e-3};
    const auto tie = cv_select_C(data.trials, sparse, tied);
    REQUIRE(tie.mean_accuracy[0] == tie.mean_accuracy[1]);
    CHECK(tie.best_C == 1e-3);
  }
}

TEST_CASE("nested evaluation report") {
  const Dimensions dims{12, 8};
  const auto truth = synthetic::standard_normal_truth(dims, 21);
  const auto sample = synthetic::sample_trials(truth, {60, 0.5, 0.5}, 22);
  const auto plan = make_leave2out_plan(distinct_subjects(sample.trials), 4, 0);
  const std::vector<double> grid{0.01, 1.0, 100.0};
  const auto report = evaluate_nested(sample.trials, dims, plan, grid, {});
  CHECK(report.test.folds.size() == 4);
  CHECK(report.train.folds.size() == 4);
  CHECK(report.selected_C.size() == 4);
  CHECK(report.baseline_accuracy.size() == 4);
  CHECK(report.test.mean.auc > 0.5);
  CHECK(report.test.mean.accuracy >= 0.0);
  CHECK(report.test.mean.accuracy <= 1.0);
}

TEST_CASE("percentile bootstrap") {
  SUBCASE("degenerate sample") {
    const std::vector<double> fives(12, 5.0);
    const auto r = percentile_bootstrap(fives, 2000, 1);
    CHECK(r.ci_low == 5.0);
    CHECK(r.ci_high == 5.0);
    CHECK(r.p_value == 0.0);
    CHECK(r.standard_error == 0.0);
  }
  SUBCASE("symmetric about zero") {
    const std::vector<double> v{-3, -2, -1, -0.5, 0.5, 1, 2, 3};
    const auto r = percentile_bootstrap(v, 10000, 2);
    CHECK(r.p_value > 0.5);
    CHECK(r.ci_low < 0.0);
    CHECK(r.ci_high > 0.0);
  }
  SUBCASE("clearly positive") {
    const std::vector<double> v{0.8, 1.1, 0.9, 1.3, 1.0, 1.2};
    const auto r = percentile_bootstrap(v, 5000, 3);
    CHECK(r.p_value < 0.001);
    CHECK(r.mean == doctest::Approx(1.05));
  }
  SUBCASE("deterministic given the seed") {
    const std::vector<double> v{0.3, -0.1, 0.7, 0.2, 0.0};
    const auto a = percentile_bootstrap(v, 3000, 42);
    const auto b = percentile_bootstrap(v, 3000, 42);
    CHECK(a.resampled_means == b.resampled_means);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.p_value == b.p_value);
  }
  SUBCASE("percentiles are ordered") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd(0.2, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> v(static_cast<std::size_t>(3 + rep));
      for (double& x : v) x = nd(rng);
      const auto r = percentile_bootstrap(v, 1000, static_cast<std::uint64_t>(rep));
      CHECK(r.ci_low <= r.median);
      CHECK(r.median <= r.ci_high);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(percentile_bootstrap(std::vector<double>{}, 1000, 0), EmptyInputError);
    CHECK_THROWS_AS(percentile_bootstrap(std::vector<double>{1.0}, 0, 0), Error);
  }
}
