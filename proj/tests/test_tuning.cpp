#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "sfts/errors.hpp"
#include "sfts/simulate.hpp"
#include "sfts/tuning.hpp"

using namespace sfts;
using namespace sfts::test;

TEST_CASE("fold assignment") {
  std::vector<int> a = fold_assignment(57, 10, 5);
  std::vector<int> b = fold_assignment(57, 10, 5);
  std::vector<int> c = fold_assignment(57, 10, 6);
  CHECK(a == b);
  CHECK(a != c);

  // Balanced within one.
  std::vector<int> counts(10, 0);
  for (int f : a) counts[static_cast<std::size_t>(f)]++;
  for (int n : counts) CHECK(std::abs(n - 6) <= 1);

  CHECK_THROWS_AS(fold_assignment(5, 10, 1), InvalidArgument);
}

TEST_CASE("log-spaced candidates") {
  std::vector<double> g = log_spaced(0.02, 0.5, 10);
  CHECK(g.size() == 10);
  CHECK(g.front() == doctest::Approx(0.02));
  CHECK(g.back() == doctest::Approx(0.5));
  for (std::size_t i = 1; i < g.size(); ++i)
    CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-9));
}

TEST_CASE("mean bandwidth selection") {
  SUBCASE("flat losses resolve to the largest candidate") {
    // Local-linear smoothing is exact on linear data, so every candidate has
    // (numerically) zero loss and the tie rule picks the widest bandwidth.
    SparseFTSDataset data =
        random_dataset(30, 6, 3, [](int, double x) { return 2.0 * x - 0.5; });
    CVConfig cfg;
    cfg.candidates_mu = {0.1, 0.2, 0.4};
    SelectionResult sel = select_b_mu(data, cfg);
    CHECK(sel.selected == 0.4);
    for (double l : sel.losses) CHECK(l < 1e-12);
  }

  SUBCASE("selection attains the minimum loss") {
    SparseFTSDataset data = random_dataset(
        40, 6, 4, [](int, double x) { return std::sin(5.0 * x); }, 0.4);
    CVConfig cfg;
    SelectionResult sel = select_b_mu(data, cfg);
    double best = *std::min_element(sel.losses.begin(), sel.losses.end());
    std::size_t idx = 0;
    for (; idx < sel.candidates.size(); ++idx)
      if (sel.candidates[idx] == sel.selected) break;
    REQUIRE(idx < sel.candidates.size());
    CHECK(sel.losses[idx] <= best + 1e-9 * (1.0 + best));
    CHECK(std::find(sel.candidates.begin(), sel.candidates.end(), sel.selected) !=
          sel.candidates.end());
  }

  SUBCASE("matches an independent recomputation of the CV losses") {
    ProcessSpec proc = preset_process("FMA4");
    std::vector<Curve> path = simulate_path(proc, 30, 8);
    SparseFTSDataset data = sparse_sample(path, {30, 8, 9}, noise_variance(proc));
    CVConfig cfg;
    cfg.k_folds = 5;
    cfg.seed = 77;
    cfg.candidates_mu = {0.1, 0.25, 0.5};
    SelectionResult sel = select_b_mu(data, cfg);

    std::vector<int> fold = fold_assignment(data.horizon, cfg.k_folds, cfg.seed);
    for (std::size_t c = 0; c < cfg.candidates_mu.size(); ++c) {
      double loss = 0.0;
      for (int k = 0; k < cfg.k_folds; ++k) {
        SparseFTSDataset train;
        train.horizon = data.horizon;
        for (const Observation& r : data.records)
          if (fold[static_cast<std::size_t>(r.t - 1)] != k) train.records.push_back(r);
        MeanEstimate fit = estimate_mean(train, cfg.candidates_mu[c]);
        for (const Observation& r : data.records) {
          if (fold[static_cast<std::size_t>(r.t - 1)] != k) continue;
          double e = r.y - fit.curve(r.x);
          loss += e * e;
        }
      }
      CHECK(sel.losses[c] == doctest::Approx(loss / cfg.k_folds).epsilon(1e-12));
    }
  }
}

TEST_CASE("selection fails loudly when no candidate can fit") {
  SparseFTSDataset data = random_dataset(12, 2, 6, [](int, double x) { return x; });
  CVConfig cfg;
  cfg.k_folds = 3;
  cfg.candidates_mu = {1e-6};  // far below any inter-point spacing
  CHECK_THROWS_AS(select_b_mu(data, cfg), NumericFailure);
}

TEST_CASE("covariance and variance bandwidth selection") {
  ProcessSpec proc = preset_process("FMA2");
  std::vector<Curve> path = simulate_path(proc, 40, 21);
  SparseFTSDataset data = sparse_sample(path, {40, 8, 22}, noise_variance(proc));
  CVConfig cfg;
  cfg.k_folds = 5;
  cfg.candidates_r = {0.15, 0.3, 0.5};
  cfg.candidates_v = {0.1, 0.3};
  MeanEstimate mean = estimate_mean(data, 0.2);

  SelectionResult sel_r = select_b_r(data, mean, cfg);
  SelectionResult sel_v = select_b_v(data, mean, cfg);

  for (const SelectionResult* sel : {&sel_r, &sel_v}) {
    double best = *std::min_element(sel->losses.begin(), sel->losses.end());
    std::size_t idx = 0;
    for (; idx < sel->candidates.size(); ++idx)
      if (sel->candidates[idx] == sel->selected) break;
    REQUIRE(idx < sel->candidates.size());
    CHECK(sel->losses[idx] <= best + 1e-9 * (1.0 + best));
  }
}

TEST_CASE("span rule") {
  CHECK(bartlett_span_rule(300, 10.0) == 11);
  CHECK(bartlett_span_rule(150, 2.5) == 6);
  CHECK(bartlett_span_rule(1, 1.0) == 1);

  SUBCASE("full published table with n_bar = n_max / 2") {
    const int horizons[6] = {150, 300, 450, 600, 900, 1200};
    const int n_maxes[5] = {5, 10, 20, 30, 40};
    const int expected[6][5] = {
        {6, 7, 9, 10, 11},    // T = 150
        {8, 10, 11, 13, 14},  // T = 300
        {9, 11, 13, 15, 16},  // T = 450
        {10, 12, 14, 16, 17}, // T = 600
        {12, 14, 17, 19, 20}, // T = 900
        {13, 15, 18, 20, 22}, // T = 1200
    };
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 5; ++j)
        CHECK(bartlett_span_rule(horizons[i], n_maxes[j] / 2.0) == expected[i][j]);
  }

  SUBCASE("monotone in both arguments") {
    int prev = 0;
    for (int t : {10, 50, 100, 500, 2000}) {
      int s = bartlett_span_rule(t, 4.0);
      CHECK(s >= prev);
      prev = s;
    }
    prev = 0;
    for (double n : {0.5, 1.0, 5.0, 20.0, 80.0}) {
      int s = bartlett_span_rule(400, n);
      CHECK(s >= prev);
      prev = s;
    }
  }
}
