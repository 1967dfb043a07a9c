#include "rbmfuse/distribution.hpp"
#include "rbmfuse/rbm.hpp"
#include "rbmfuse/sampler.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

using namespace rbmfuse;
using namespace testutil;

namespace {

Rbm one_by_one(double w, double a, double b) {
  Rbm m = Rbm::zeros(1, 1);
  m.weights(0, 0) = w;
  m.hidden_bias[0] = a;
  m.visible_bias[0] = b;
  return m;
}

}  // namespace

TEST_CASE("energy matches the bilinear form") {
  Rbm m = random_model(4, 3, 7);
  CHECK(energy(m, {Bits(4, 0), Bits(3, 0)}) == 0.0);

  Rbm tiny = one_by_one(2.0, -1.0, 0.5);
  CHECK(energy(tiny, {{1}, {1}}) == doctest::Approx(-1.5).epsilon(1e-15));

  // bias-only when the visible layer is off
  Bits h{1, 0, 1};
  CHECK(energy(m, {Bits(4, 0), h}) ==
        doctest::Approx(-(m.hidden_bias[0] + m.hidden_bias[2])));

  CHECK_THROWS_AS(energy(m, {Bits(3, 0), Bits(3, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(energy(m, {Bits(4, 0), Bits(2, 0)}), std::invalid_argument);
}

TEST_CASE("energy bilinearity: single flips move by exactly -w_ij") {
  Rbm m = random_model(5, 4, 11);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) {
      BinaryState off{Bits(5, 0), Bits(4, 0)};
      BinaryState on = off;
      on.visible[i] = 1;
      on.hidden[j] = 1;
      double delta = energy(m, on) - energy(m, off);
      CHECK(delta == doctest::Approx(-m.weights(i, j) - m.hidden_bias[j] -
                                     m.visible_bias[i])
                         .epsilon(1e-12));
    }
}

TEST_CASE("hidden activation") {
  SUBCASE("zero input and bias give one half") {
    Rbm m = Rbm::zeros(3, 5);
    Vector p = hidden_activation(m, Bits(3, 0));
    for (int j = 0; j < 5; ++j) CHECK(p[j] == doctest::Approx(0.5));
  }
  SUBCASE("cancellation gives one half") {
    Rbm m = Rbm::zeros(2, 1);
    m.weights(0, 0) = 1.0;
    m.weights(1, 0) = 1.0;
    m.hidden_bias[0] = -2.0;
    CHECK(hidden_activation(m, {1, 1})[0] == doctest::Approx(0.5));
  }
  SUBCASE("matches the enumeration oracle") {
    Rbm m = random_model(3, 2, 13);
    Bits v{1, 0, 1};
    Vector p = hidden_activation(m, v);
    for (int j = 0; j < 2; ++j)
      CHECK(p[j] == doctest::Approx(cond_hidden_oracle(m, v, j)).epsilon(1e-12));
  }
  SUBCASE("outputs stay in (0,1)") {
    Rbm m = random_model(6, 4, 17, 3.0, 2.0);
    Vector p = hidden_activation(m, Bits(6, 1));
    for (int j = 0; j < 4; ++j) {
      CHECK(p[j] > 0.0);
      CHECK(p[j] < 1.0);
    }
  }
}

TEST_CASE("visible activation") {
  SUBCASE("zero input and bias give one half") {
    Rbm m = Rbm::zeros(4, 2);
    Vector p = visible_activation(m, Bits(2, 0));
    for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(0.5));
  }
  SUBCASE("cancellation gives one half") {
    Rbm m = Rbm::zeros(1, 1);
    m.weights(0, 0) = 3.0;
    m.visible_bias[0] = -3.0;
    CHECK(visible_activation(m, {1})[0] == doctest::Approx(0.5));
  }
  SUBCASE("matches the enumeration oracle") {
    Rbm m = random_model(4, 3, 19);
    Bits h{0, 1, 1};
    Vector p = visible_activation(m, h);
    for (int i = 0; i < 4; ++i)
      CHECK(p[i] ==
            doctest::Approx(cond_visible_oracle(m, h, i)).epsilon(1e-12));
  }
}

TEST_CASE("conditional independence: p(v|h) factorizes") {
  Rbm m = random_model(6, 6, 23);
  Bits h{1, 0, 1, 1, 0, 0};
  Vector marg = visible_activation(m, h);
  // joint conditional by enumeration vs the product of per-unit marginals
  const std::uint64_t nvs = 1ull << 6;
  double z = 0.0;
  std::vector<double> joint(nvs);
  for (std::uint64_t v = 0; v < nvs; ++v) {
    joint[v] = std::exp(-energy(m, {bits_of(v, 6), h}));
    z += joint[v];
  }
  for (std::uint64_t v = 0; v < nvs; ++v) {
    double product = 1.0;
    for (int i = 0; i < 6; ++i)
      product *= ((v >> i) & 1u) ? marg[i] : 1.0 - marg[i];
    CHECK(std::abs(joint[v] / z - product) < 1e-12);
  }
}

TEST_CASE("free energy") {
  SUBCASE("all-zero model") {
    Rbm m = Rbm::zeros(3, 4);
    CHECK(free_energy(m, Bits(3, 0)) ==
          doctest::Approx(-4.0 * std::log(2.0)).epsilon(1e-15));
  }
  SUBCASE("hand-evaluated 1x1") {
    Rbm m = one_by_one(0.0, 0.0, 1.0);
    CHECK(free_energy(m, {1}) ==
          doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-15));
  }
  SUBCASE("normalized exp(-F) equals the enumerated visible marginal") {
    Rbm m = random_model(4, 3, 29);
    Distribution oracle = visible_marginal_oracle(m);
    Distribution viaF = exact_distribution(m, ClampPattern{});
    REQUIRE(viaF.support == oracle.support);
    for (int k = 0; k < oracle.probs.size(); ++k)
      CHECK(std::abs(viaF.probs[k] - oracle.probs[k]) < 1e-12);
  }
  SUBCASE("stable for large activations") {
    Rbm m = random_model(4, 3, 31, 200.0, 100.0);
    CHECK(std::isfinite(free_energy(m, Bits(4, 1))));
  }
}

TEST_CASE("exact distribution respects clamps and the guard") {
  Rbm m = random_model(5, 3, 37);
  ClampPattern clamps;
  clamps.pin(1, 1);
  clamps.pin(3, 0);
  Distribution d = exact_distribution(m, clamps);
  d.validate();
  CHECK(d.support.size() == 8);
  for (const auto& v : d.support) {
    CHECK(v[1] == 1);
    CHECK(v[3] == 0);
  }
  // conditional from the joint oracle
  Distribution full = visible_marginal_oracle(m);
  double z = 0.0;
  std::vector<double> expect;
  for (std::uint64_t k = 0; k < full.support.size(); ++k) {
    if (full.support[k][1] == 1 && full.support[k][3] == 0) {
      expect.push_back(full.probs[k]);
      z += full.probs[k];
    }
  }
  REQUIRE(expect.size() == 8);
  // enumeration order: free indices ascending, bit j of k toggles index j
  for (std::size_t k = 0; k < 8; ++k) {
    std::uint64_t v = value_of(d.support[k]);
    double got = d.probs[k];
    bool found = false;
    for (std::uint64_t f = 0; f < full.support.size(); ++f)
      if (value_of(full.support[f]) == v) {
        CHECK(std::abs(got - full.probs[f] / z) < 1e-12);
        found = true;
      }
    CHECK(found);
  }

  ClampPattern none;
  CHECK_THROWS_AS(exact_distribution(m, none, 4), std::invalid_argument);
  ClampPattern bad;
  bad.pin(5, 1);
  CHECK_THROWS_AS(exact_distribution(m, bad), std::invalid_argument);
}

TEST_CASE("kl divergence") {
  Rbm m = random_model(3, 2, 41);
  Distribution p = exact_distribution(m, ClampPattern{});
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));

  Distribution u, q;
  u.support = {Bits{0}, Bits{1}};
  u.probs = Vector(2);
  u.probs << 0.5, 0.5;
  q.support = u.support;
  q.probs = Vector(2);
  q.probs << 0.75, 0.25;
  CHECK(kl_divergence(u, q) ==
        doctest::Approx(std::log(2.0) - 0.5 * std::log(3.0)).epsilon(1e-12));

  SUBCASE("non-negative on random pairs") {
    Rng rng(43);
    for (int trial = 0; trial < 1000; ++trial) {
      int n = 2 + static_cast<int>(rng.word() % 7);
      Distribution a, b;
      double za = 0, zb = 0;
      a.probs = Vector(n);
      b.probs = Vector(n);
      for (int k = 0; k < n; ++k) {
        a.support.push_back(bits_of(k, 3));
        b.support.push_back(bits_of(k, 3));
        a.probs[k] = rng.uniform() + 1e-3;
        b.probs[k] = rng.uniform() + 1e-3;
        za += a.probs[k];
        zb += b.probs[k];
      }
      a.probs /= za;
      b.probs /= zb;
      CHECK(kl_divergence(a, b) >= 0.0);
    }
  }
  SUBCASE("error paths") {
    Distribution other;
    other.support = {Bits{1}, Bits{0}};
    other.probs = u.probs;
    CHECK_THROWS_AS(kl_divergence(u, other), std::invalid_argument);
    Distribution zero;
    zero.support = u.support;
    zero.probs = Vector(2);
    zero.probs << 1.0, 0.0;
    CHECK_THROWS_AS(kl_divergence(u, zero), std::invalid_argument);
    CHECK(kl_divergence(zero, u) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("gibbs step honors clamps") {
  Rbm m = random_model(4, 3, 47);
  ClampPattern clamps;
  for (int i = 0; i < 4; ++i) clamps.pin(i, i % 2);
  Rng rng(1);
  BinaryState s{Bits{1, 1, 1, 1}, Bits(3, 0)};
  for (int step = 0; step < 50; ++step) {
    s = gibbs_step(m, s, clamps, rng);
    CHECK(s.visible == Bits{0, 1, 0, 1});
  }
}

TEST_CASE("gibbs step on the all-zero model is a fair coin per unit") {
  Rbm m = Rbm::zeros(3, 2);
  ClampPattern none;
  GibbsChain chain(m, none, 99);
  const int n = 100000;
  std::array<int, 3> ones{};
  for (int s = 0; s < n; ++s) {
    const Bits& v = chain.step();
    for (int i = 0; i < 3; ++i) ones[i] += v[i];
  }
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(ones[i] / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("chain and gibbs_step agree draw for draw") {
  Rbm m = random_model(5, 4, 53);
  ClampPattern clamps;
  clamps.pin(2, 1);
  GibbsChain chain(m, clamps, 1234);
  // replay the chain by hand: the constructor draws init coins for free
  // units in index order, then each step consumes hidden + free visible
  Rng rng(1234);
  BinaryState s{Bits(5, 0), Bits(4, 0)};
  for (int i = 0; i < 5; ++i)
    s.visible[i] = clamps.is_pinned(i)
                       ? static_cast<std::uint8_t>(clamps.value(i))
                       : (rng.coin(0.5) ? 1 : 0);
  CHECK(chain.visible() == s.visible);
  for (int step = 0; step < 200; ++step) {
    s = gibbs_step(m, s, clamps, rng);
    CHECK(chain.step() == s.visible);
  }
}

TEST_CASE("sampled distribution converges to the exact one") {
  Rbm m = random_model(2, 2, 59, 1.0, 0.5);
  ClampPattern none;
  Distribution exact = exact_distribution(m, none);
  auto samples = sample_chain(m, none, 1000000, 7);
  Distribution emp = empirical_distribution(samples, exact);
  CHECK(total_variation(emp, exact) < 0.01);
}

TEST_CASE("sample_chain contracts") {
  Rbm m = random_model(3, 2, 61);
  ClampPattern all;
  all.pin(0, 1);
  all.pin(1, 0);
  all.pin(2, 1);
  auto s = sample_chain(m, all, 1, 5);
  REQUIRE(s.size() == 1);
  CHECK(s[0] == Bits{1, 0, 1});

  ClampPattern none;
  CHECK(sample_chain(m, none, 500, 42) == sample_chain(m, none, 500, 42));

  auto a = sample_chain(m, none, 100, 1);
  auto b = sample_chain(m, none, 100, 2);
  CHECK(a != b);

  CHECK_THROWS_AS(sample_chain(m, none, 0, 1), std::invalid_argument);
}

TEST_CASE("clamped units never change over long runs") {
  Rbm m = random_model(6, 4, 67, 1.5, 1.0);
  ClampPattern clamps;
  clamps.pin(0, 1);
  clamps.pin(4, 0);
  GibbsChain chain(m, clamps, 3);
  for (int s = 0; s < 20000; ++s) {
    const Bits& v = chain.step();
    REQUIRE(v[0] == 1);
    REQUIRE(v[4] == 0);
  }
}

TEST_CASE("model validation catches bad inputs") {
  Rbm m = random_model(3, 2, 71);
  m.visible_labels[1] = m.visible_labels[0];
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  Rbm nan = random_model(3, 2, 73);
  nan.weights(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(nan.validate(), std::invalid_argument);
  Rbm shape = random_model(3, 2, 79);
  shape.visible_bias = Vector::Zero(4);
  CHECK_THROWS_AS(shape.validate(), std::invalid_argument);
}
