#include "rbmfuse/quantize.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

#include <set>

using namespace rbmfuse;
using namespace testutil;

TEST_CASE("quantize_value basics") {
  QuantGrid grid{8, 3};  // step 0.125, range [-16, 15.875]
  CHECK(quantize_value(0.37, grid) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(quantize_value(0.0, grid) == 0.0);
  CHECK(quantize_value(-1.5, grid) == doctest::Approx(-1.5));
  // idempotence on every representable point
  for (std::int32_t q = grid.min_q(); q <= grid.max_q(); ++q) {
    double x = grid.dequantize(q);
    CHECK(quantize_value(x, grid) == x);
  }
  // saturation
  CHECK(quantize_value(1e9, grid) == doctest::Approx(grid.max_value()));
  CHECK(quantize_value(-1e9, grid) == doctest::Approx(grid.min_value()));
}

TEST_CASE("quantization error and non-expansiveness") {
  QuantGrid grid{6, 4};  // step 1/16, range [-2, 2 - 1/16]
  Rng rng(5);
  for (int trial = 0; trial < 5000; ++trial) {
    double x = (rng.uniform() - 0.5) * 4.2;
    double qx = quantize_value(x, grid);
    if (x >= grid.min_value() && x <= grid.max_value())
      CHECK(std::abs(x - qx) <= grid.step() / 2 + 1e-15);
    double y = (rng.uniform() - 0.5) * 4.2;
    double qy = quantize_value(y, grid);
    CHECK(std::abs(qx - qy) <= std::abs(x - y) + grid.step() + 1e-15);
  }
}

TEST_CASE("grid validation and sizing") {
  CHECK_THROWS_AS((QuantGrid{1, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((QuantGrid{17, 5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((QuantGrid{8, 8}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((QuantGrid{8, -1}.validate()), std::invalid_argument);

  // the max-weight constraint maps to full scale
  QuantGrid g2 = grid_for_magnitude(8, 2.0);
  CHECK(g2.frac_bits == 6);
  CHECK(g2.max_value() == doctest::Approx(2.0 - g2.step()));
  QuantGrid g1 = grid_for_magnitude(6, 1.0);
  CHECK(g1.frac_bits == 5);
  QuantGrid g5 = grid_for_magnitude(8, 5.0);
  CHECK(g5.frac_bits == 4);  // range [-8, 8)

  Rbm m = random_model(4, 3, 9, 1.2, 0.8);
  QuantGrid ag = auto_grid(m, 8);
  double mag = std::max({m.weights.cwiseAbs().maxCoeff(),
                         m.visible_bias.cwiseAbs().maxCoeff(),
                         m.hidden_bias.cwiseAbs().maxCoeff()});
  CHECK(ag.max_value() + ag.step() >= mag);
}

TEST_CASE("sigmoid LUT") {
  SigmoidLutConfig cfg;
  cfg.compare_bits = 16;
  cfg.frac_bits = 5;
  cfg.saturation = 8;
  SigmoidLut lut = build_sigmoid_lut(cfg);
  CHECK(lut.entries.size() == 512);
  CHECK(lut.input_bits() == 9);

  SUBCASE("zero input is exactly half scale") {
    CHECK(lut.entry(0) == (1u << 15));
  }
  SUBCASE("saturates toward one at large inputs") {
    CHECK(lut.entry(lut.max_input()) >= 65510);
    CHECK(lut.entry(1 << 20) == lut.entry(lut.max_input()));
    CHECK(lut.entry(-(1 << 20)) == lut.entry(lut.min_input()));
    CHECK(lut.entry(lut.min_input()) <= 25);
  }
  SUBCASE("monotone over the whole domain") {
    for (std::size_t k = 1; k < lut.entries.size(); ++k)
      CHECK(lut.entries[k] >= lut.entries[k - 1]);
  }
  SUBCASE("approximation error is within half an output ulp") {
    const double scale = 65536.0;
    for (std::int64_t q = lut.min_input(); q <= lut.max_input(); ++q) {
      double err = std::abs(lut.entry(q) / scale - sigmoid(lut.input_value(q)));
      CHECK(err <= 1.0 / scale);  // half ulp of rounding + the cap at 2^c - 1
    }
  }
}

TEST_CASE("quantize_model") {
  Rbm m = random_model(5, 4, 21, 1.1, 0.9);
  QuantGrid grid{6, 3};
  SigmoidLutConfig lut_cfg;
  FixedRbm f = quantize_model(m, grid, lut_cfg, 77);
  f.validate();

  SUBCASE("elementwise quantization error") {
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) {
        double w = m.weights(i, j);
        double wq = grid.dequantize(f.w_row[i * 4 + j]);
        if (w >= grid.min_value() && w <= grid.max_value())
          CHECK(std::abs(w - wq) <= grid.step() / 2 + 1e-12);
        else
          CHECK((wq == grid.min_value() || wq == grid.max_value()));
      }
  }
  SUBCASE("round trip is exact for on-grid models") {
    Rbm deq = f.dequantize();
    FixedRbm again = quantize_model(deq, grid, lut_cfg, 77);
    CHECK(again.w_row == f.w_row);
    CHECK(again.visible_bias_q == f.visible_bias_q);
    CHECK(again.hidden_bias_q == f.hidden_bias_q);
  }
  SUBCASE("deterministic given the master seed") {
    FixedRbm g = quantize_model(m, grid, lut_cfg, 77);
    CHECK(g.w_row == f.w_row);
    CHECK(g.lfsr_seeds == f.lfsr_seeds);
    FixedRbm h = quantize_model(m, grid, lut_cfg, 78);
    CHECK(h.lfsr_seeds != f.lfsr_seeds);
  }
  SUBCASE("seeds are nonzero and pairwise distinct") {
    std::set<std::uint32_t> seen;
    for (auto s : f.lfsr_seeds) {
      CHECK(s != 0);
      CHECK(seen.insert(s).second);
    }
    CHECK(seen.size() == 9);
  }
}
