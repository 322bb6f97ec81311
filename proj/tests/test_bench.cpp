#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hdod/bench.hpp"
#include "hdod/error.hpp"

using namespace hdod;

namespace {

PopulationConstants id_strong() {
  return PopulationConstants{0.0, 1.0, 1.0, 1.0, 1.0};
}

}  // namespace

TEST_CASE("metrics") {
  std::vector<ReplicateOutcome> perfect(5, ReplicateOutcome{3, 0, 3, 27});
  SummaryRow row = metrics(perfect);
  REQUIRE(row.tpr);
  CHECK(*row.tpr == 1.0);
  CHECK(row.fpr == 0.0);
  CHECK(row.fwfp == 0.0);
  CHECK(row.replicates == 5);

  std::vector<ReplicateOutcome> one_fp(10, ReplicateOutcome{3, 0, 3, 27});
  one_fp[4].false_positives = 1;
  row = metrics(one_fp);
  CHECK(row.fwfp == doctest::Approx(0.1));
  CHECK(row.fpr == doctest::Approx(1.0 / 270.0));

  std::vector<ReplicateOutcome> null(4, ReplicateOutcome{0, 0, 0, 30});
  null[1].false_positives = 2;
  row = metrics(null);
  CHECK_FALSE(row.tpr);
  CHECK(row.fpr == doctest::Approx(2.0 / 120.0));

  CHECK_THROWS_AS(metrics(std::vector<ReplicateOutcome>{}), Error);
  std::vector<ReplicateOutcome> inconsistent{{1, 0, 3, 27}, {1, 0, 2, 28}};
  CHECK_THROWS_AS(metrics(inconsistent), Error);
  std::vector<ReplicateOutcome> impossible{{4, 0, 3, 27}};
  CHECK_THROWS_AS(metrics(impossible), Error);
}

TEST_CASE("metrics agrees with pooled-count arithmetic") {
  Rng rng(10);
  for (int rep = 0; rep < 200; ++rep) {
    const int n_out = static_cast<int>(rng.below(5));
    const int n_in = 1 + static_cast<int>(rng.below(40));
    std::vector<ReplicateOutcome> list(1 + rng.below(30));
    long tp_total = 0;
    long fp_total = 0;
    bool any_fp = false;
    int with_fp = 0;
    for (auto& o : list) {
      o = {static_cast<int>(rng.below(n_out + 1)), static_cast<int>(rng.below(n_in + 1) * (rng.uniform() < 0.3)),
           n_out, n_in};
      tp_total += o.true_positives;
      fp_total += o.false_positives;
      any_fp = any_fp || o.false_positives > 0;
      with_fp += o.false_positives > 0;
    }
    const double r = static_cast<double>(list.size());
    const SummaryRow row = metrics(list);
    if (n_out > 0) {
      REQUIRE(row.tpr);
      CHECK(*row.tpr == doctest::Approx(static_cast<double>(tp_total) / (r * n_out)).epsilon(1e-12));
    }
    CHECK(row.fpr == doctest::Approx(static_cast<double>(fp_total) / (r * n_in)).epsilon(1e-12));
    CHECK(row.fwfp == doctest::Approx(with_fp / r).epsilon(1e-12));
    CHECK((row.fwfp == 0.0) == !any_fp);
    CHECK(row.fpr >= 0.0);
    CHECK(row.fpr <= 1.0);
  }
}

TEST_CASE("lemma_constants") {
  const LemmaConstants zero_d = lemma_constants({0.0, 2.0, 1.5, 1.5, 0.0});
  CHECK(zero_d.alpha_d == doctest::Approx(0.0));
  CHECK(zero_d.beta_d == doctest::Approx(0.0));

  const LemmaConstants zero_g = lemma_constants({0.7, 0.7, 1.0, 3.0, 0.0});
  CHECK(zero_g.alpha_g == 0.0);
  CHECK(zero_g.beta_g == 0.0);

  const LemmaConstants id = lemma_constants(id_strong());
  CHECK(id.alpha_d == doctest::Approx(std::sqrt(2.0) - std::sqrt(3.0)));
  CHECK(id.beta_d == doctest::Approx(std::sqrt(3.0) - std::sqrt(2.0)));
  CHECK(id.alpha_g == 0.0);
  CHECK(id.beta_g == -1.0);
}

TEST_CASE("population_constants from the generator definitions") {
  SimScenario strong;
  const PopulationConstants a = population_constants(strong);
  CHECK(a.mu_in_sq == 0.0);
  CHECK(a.sigma_in_sq == 1.0);
  CHECK(a.mu_out_sq == 1.0);
  CHECK(a.delta_sq == 1.0);
  CHECK(a.sigma_out_sq == 1.0);

  SimScenario weak;
  weak.s_mu = 0.25;
  weak.s_sigma = 0.25;
  const PopulationConstants b = population_constants(weak);
  CHECK(b.mu_out_sq == doctest::Approx(1.0 / std::sqrt(500.0)));
  CHECK(b.sigma_out_sq == 0.25);
}

TEST_CASE("theoretical_gamma") {
  const MarginConstants g = theoretical_gamma(id_strong(), 30, 3);
  CHECK(g.gamma_d == doctest::Approx(std::abs(std::sqrt(3.0) - std::sqrt(2.0)) * std::sqrt(28.0)));
  CHECK(g.gamma_g == doctest::Approx(std::sqrt(2.0)));

  const MarginConstants one = theoretical_gamma(id_strong(), 30, 1);
  CHECK(one.gamma_d == doctest::Approx(std::abs(lemma_constants(id_strong()).alpha_d) * std::sqrt(28.0)));

  const MarginConstants none = theoretical_gamma({0.0, 0.0, 1.0, 1.0, 0.0}, 30, 3);
  CHECK(none.gamma_d == 0.0);
  CHECK(none.gamma_g == 0.0);

  CHECK_THROWS_AS(theoretical_gamma(id_strong(), 30, 0), Error);
  CHECK_THROWS_AS(theoretical_gamma(id_strong(), 30, 15), Error);

  double prev = 0.0;
  for (int n = 7; n < 200; ++n) {
    const double gd = theoretical_gamma({0.2, 1.3, 0.8, 2.1, 0.9}, n, 3).gamma_d;
    CHECK(gd >= prev);
    prev = gd;
  }
}

TEST_CASE("margin_probe") {
  SimScenario scn;
  scn.seed = 31;
  scn.p = 1600;
  const MarginProbe dod = margin_probe(scn, 50, StatisticKind::DOD);
  CHECK(dod.gaps.size() == 50);
  CHECK(dod.q10 <= dod.median);
  CHECK(dod.median <= dod.q90);
  CHECK(std::abs(dod.median - dod.gamma) < 0.2 * dod.gamma);

  double prev = -1e300;
  for (int p : {100, 400, 1600}) {
    scn.p = p;
    const double m = margin_probe(scn, 30, StatisticKind::DOD).median;
    CHECK(m > prev);
    prev = m;
  }

  scn.n_out = 0;
  try {
    margin_probe(scn, 5, StatisticKind::DOD);
    FAIL("expected InvalidCounts");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidCounts);
  }
}

TEST_CASE("default methods and validation") {
  for (MethodId id : kAllMethods) {
    const MethodSpec spec = default_method(id, 100);
    CHECK_NOTHROW(validate(spec));
    CHECK(parse_method_id(to_string(id)) == id);
  }
  const auto dod1 = std::get<ClusteringConfig>(default_method(MethodId::DOD1).config);
  CHECK(dod1.alpha_max == 0.3);
  CHECK(dod1.gap_threshold_coeff == 0.1);
  const auto dog2 = std::get<RotationConfig>(default_method(MethodId::DOG2).config);
  CHECK(dog2.alpha == 0.05);
  CHECK(dog2.rotations == 300);
  CHECK(dog2.kind == StatisticKind::DOG);
  const auto dod3 = std::get<RotationConfig>(default_method(MethodId::DOD3).config);
  CHECK(dod3.alpha == 0.7);
  CHECK(dod3.mode == RotationMode::FWER);

  MethodSpec wrong = default_method(MethodId::DOD2);
  wrong.config = ClusteringConfig{};
  CHECK_THROWS_AS(validate(wrong), Error);
  wrong = default_method(MethodId::DOG1);
  std::get<ClusteringConfig>(wrong.config).kind = StatisticKind::DOD;
  CHECK_THROWS_AS(validate(wrong), Error);
  wrong = default_method(MethodId::DOD3);
  std::get<RotationConfig>(wrong.config).mode = RotationMode::Pooled;
  CHECK_THROWS_AS(validate(wrong), Error);
  CHECK_THROWS_AS(parse_method_id("dod4"), Error);
}

TEST_CASE("run_grid") {
  SimScenario a;
  SimScenario b;
  b.structure = Structure::AR;
  b.n_out = 0;
  const std::vector<MethodSpec> methods{default_method(MethodId::DOD1), default_method(MethodId::DOG3, 10)};

  const std::vector<SimScenario> one{a};
  const std::vector<MethodSpec> single{methods[0]};
  const BenchSummary tiny = run_grid(one, single, 2, 5);
  REQUIRE(tiny.rows.size() == 1);
  CHECK(tiny.rows[0].outcomes.size() == 2);
  CHECK(tiny.rows[0].replicates == 2);

  const std::vector<SimScenario> ab{a, b};
  const std::vector<SimScenario> ba{b, a};
  const BenchSummary first = run_grid(ab, methods, 4, 99);
  const BenchSummary again = run_grid(ab, methods, 4, 99, GridOptions{3});
  const BenchSummary swapped = run_grid(ba, methods, 4, 99);
  REQUIRE(first.rows.size() == 4);

  std::ostringstream s1, s2;
  write_summary_csv(s1, first, false);
  write_summary_csv(s2, again, false);
  CHECK(s1.str() == s2.str());

  // Cell results do not depend on where the scenario sits in the grid.
  for (std::size_t m = 0; m < 2; ++m) {
    CHECK(first.rows[m].fpr == swapped.rows[2 + m].fpr);
    CHECK(first.rows[m].tpr == swapped.rows[2 + m].tpr);
    CHECK(first.rows[2 + m].fwfp == swapped.rows[m].fwfp);
  }

  for (const auto& row : first.rows) {
    CHECK(row.error.empty());
    CHECK(row.fpr >= 0.0);
    CHECK(row.fpr <= 1.0);
    CHECK(row.fwfp >= 0.0);
    CHECK(row.fwfp <= 1.0);
  }
  CHECK_FALSE(first.rows[2].tpr);  // n_out = 0
  CHECK(s1.str().find(",NA,") != std::string::npos);

  std::ostringstream jsonl;
  write_outcomes_jsonl(jsonl, first);
  const std::string lines = jsonl.str();
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 16);

  CHECK_THROWS_AS(run_grid(std::vector<SimScenario>{}, methods, 2, 0), Error);
  CHECK_THROWS_AS(run_grid(one, single, 0, 0), Error);
}
