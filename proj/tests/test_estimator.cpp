#include <algorithm>
#include <cmath>
#include <vector>

#include "cgpp/estimator.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cgpp;

TEST_CASE("type distribution helpers") {
  TypeDistribution u = TypeDistribution::uniform(4);
  for (double p : u.probs) CHECK(p == doctest::Approx(0.25));
  CHECK_NOTHROW(u.validate(4));
  CHECK_THROWS_AS(u.validate(3), std::invalid_argument);

  std::vector<long long> counts{2, 1, 2, 1};
  TypeDistribution d = TypeDistribution::from_counts(counts);
  CHECK(d.probs == std::vector<double>{1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0});

  Instance inst = fixtures::small_case1();  // sizes 2,3,4,5
  CHECK(d.mean_size(inst) == doctest::Approx((2 * 2 + 3 + 2 * 4 + 5) / 6.0));

  std::vector<long long> empty{0, 0};
  CHECK_THROWS_AS(TypeDistribution::from_counts(empty), std::invalid_argument);
  CHECK_THROWS_AS((TypeDistribution{{0.6, 0.6}}).validate(2), std::invalid_argument);
  CHECK_THROWS_AS((TypeDistribution{{1.2, -0.2}}).validate(2), std::invalid_argument);
}

TEST_CASE("memory window mechanics") {
  Instance inst = fixtures::small_case1();
  MemoryWindow window(2);
  CHECK(window.size() == 0);
  CHECK_THROWS_AS(silverman_bandwidth(window), std::invalid_argument);
  CHECK_THROWS_AS(estimate_distribution(window, inst, 1.0), std::invalid_argument);

  window.push(0, inst);  // size 2
  window.push(1, inst);  // size 3
  CHECK(window.full());
  CHECK(window.mean() == doctest::Approx(2.5));
  CHECK(window.stddev() == doctest::Approx(0.5));

  window.push(1, inst);  // evicts the size-2 item
  CHECK(window.size() == 2);
  CHECK(window.counts() == std::vector<long long>{0, 2, 0, 0});
  CHECK(window.mean() == doctest::Approx(3.0));
  CHECK(window.stddev() == doctest::Approx(0.0));

  CHECK_THROWS_AS(window.push(9, inst), std::invalid_argument);
  CHECK_THROWS_AS(MemoryWindow(0), std::invalid_argument);
}

TEST_CASE("bandwidth follows the rule of thumb with a floor of one") {
  Instance inst = fixtures::from_sizes(40, {10, 30});
  MemoryWindow window(32);
  for (int i = 0; i < 16; ++i) window.push(0, inst);
  for (int i = 0; i < 16; ++i) window.push(1, inst);
  // stddev is exactly 10 and 32^(1/5) = 2, so h = 1.06 * 10 / 2.
  CHECK(window.stddev() == doctest::Approx(10.0));
  CHECK(silverman_bandwidth(window) == doctest::Approx(5.3));

  MemoryWindow tiny(4);
  tiny.push(0, inst);
  CHECK(silverman_bandwidth(tiny) == 1.0);  // zero spread floors at one unit
}

TEST_CASE("estimates normalize and centre on the data") {
  Instance inst = fixtures::small_case1();
  MemoryWindow window(16);
  for (int i = 0; i < 10; ++i) window.push(2, inst);  // all size 4
  TypeDistribution d = estimate_distribution(window, inst, 1.5);
  double total = 0.0;
  for (double p : d.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*std::max_element(d.probs.begin(), d.probs.end()) == d.probs[2]);
}

TEST_CASE("well separated symmetric sizes split evenly") {
  Instance inst = fixtures::from_sizes(100, {10, 90});
  MemoryWindow window(20);
  for (int i = 0; i < 10; ++i) {
    window.push(0, inst);
    window.push(1, inst);
  }
  TypeDistribution d = estimate_distribution(window, inst, 1.0);
  CHECK(d.probs[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(d.probs[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("estimate depends only on the window contents") {
  Instance inst = fixtures::small_case2();
  MemoryWindow a(8);
  MemoryWindow b(8);
  // Same multiset pushed in different orders.
  for (int t : {0, 0, 1, 1, 2, 3, 3, 3}) a.push(t, inst);
  for (int t : {3, 1, 0, 3, 2, 1, 0, 3}) b.push(t, inst);
  CHECK(estimate_distribution(a, inst, 2.0).probs == estimate_distribution(b, inst, 2.0).probs);

  // Sliding forward reproduces a freshly filled window exactly.
  MemoryWindow slid(4);
  for (int t : {2, 2, 0, 1, 3, 0}) slid.push(t, inst);
  MemoryWindow fresh(4);
  for (int t : {0, 1, 3, 0}) fresh.push(t, inst);
  CHECK(estimate_distribution(slid, inst, silverman_bandwidth(slid)).probs ==
        estimate_distribution(fresh, inst, silverman_bandwidth(fresh)).probs);
}

TEST_CASE("uniform window recovers a near-uniform distribution") {
  std::vector<int> sizes;
  for (int s = 10; s <= 90; s += 10) sizes.push_back(s);
  Instance inst = fixtures::from_sizes(100, sizes);
  Rng rng(7);
  int good = 0;
  const int kSeeds = 40;
  for (int seed = 0; seed < kSeeds; ++seed) {
    MemoryWindow window(250);
    for (int i = 0; i < 250; ++i) window.push(rng.next_int(0, 8), inst);
    TypeDistribution d = estimate_distribution(window, inst, silverman_bandwidth(window));
    double worst = 0.0;
    for (double p : d.probs) worst = std::max(worst, std::fabs(p - 1.0 / 9.0));
    if (worst <= 0.1) good++;
  }
  CHECK(good >= kSeeds * 9 / 10);
}

TEST_CASE("kl divergence") {
  std::vector<double> p{1.0, 0.0};
  std::vector<double> q{0.5, 0.5};
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(kl_divergence(q, q) == doctest::Approx(0.0));
  CHECK(kl_divergence(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-3));
  CHECK(kl_divergence(p, q) != doctest::Approx(kl_divergence(q, p)));

  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(4), b(4);
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < 4; ++i) {
      a[i] = rng.next_unit();
      b[i] = rng.next_unit();
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 4; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    CHECK(kl_divergence(a, b) >= 0.0);
    CHECK(kl_divergence(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  }

  std::vector<double> shorter{1.0};
  CHECK_THROWS_AS(kl_divergence(shorter, q), std::invalid_argument);
  CHECK_THROWS_AS(kl_divergence(p, q, 0.0), std::invalid_argument);
}

TEST_CASE("demand forecasting") {
  TypeDistribution quarter = TypeDistribution::uniform(4);
  std::vector<double> q = forecast_demands(quarter, 1000, 200);
  for (double v : q) CHECK(v == doctest::Approx(200.0));

  q = forecast_demands(quarter, 1000, 1000);
  for (double v : q) CHECK(v == doctest::Approx(0.0));

  TypeDistribution skew{{0.7, 0.3}};
  q = forecast_demands(skew, 10, 0);
  CHECK(q[0] == doctest::Approx(7.0));
  CHECK(q[1] == doctest::Approx(3.0));

  CHECK_THROWS_AS(forecast_demands(skew, 10, 11), std::invalid_argument);
  CHECK_THROWS_AS(forecast_demands(skew, 10, -1), std::invalid_argument);
}
