#include "rbmfuse/quantize.hpp"

#include <cmath>
#include <set>

namespace rbmfuse {

void QuantGrid::validate() const {
  if (total_bits < 2 || total_bits > 16)
    throw std::invalid_argument("grid total_bits must be in [2, 16]");
  if (frac_bits < 0 || frac_bits >= total_bits)
    throw std::invalid_argument("grid frac_bits must be in [0, total_bits)");
}

std::int32_t QuantGrid::quantize_int(double x) const {
  double scaled = x * std::ldexp(1.0, frac_bits);
  // round to nearest, ties away from zero; saturate at the range ends
  long long q = std::llround(scaled);
  if (q < min_q()) return min_q();
  if (q > max_q()) return max_q();
  return static_cast<std::int32_t>(q);
}

double quantize_value(double x, const QuantGrid& grid) {
  return grid.dequantize(grid.quantize_int(x));
}

QuantGrid grid_for_magnitude(int total_bits, double magnitude) {
  if (magnitude <= 0) magnitude = 1.0;
  int int_bits = static_cast<int>(std::ceil(std::log2(magnitude)));
  int frac = total_bits - 1 - int_bits;
  frac = std::max(0, std::min(frac, total_bits - 1));
  QuantGrid g{total_bits, frac};
  g.validate();
  return g;
}

QuantGrid auto_grid(const Rbm& model, int total_bits) {
  double mag = std::max({model.weights.cwiseAbs().maxCoeff(),
                         model.visible_bias.cwiseAbs().maxCoeff(),
                         model.hidden_bias.cwiseAbs().maxCoeff(), 1e-9});
  return grid_for_magnitude(total_bits, mag);
}

int SigmoidLut::input_bits() const {
  int span = 2 * saturation << frac_bits;
  int bits = 0;
  while ((1 << bits) < span) ++bits;
  return bits;
}

std::int64_t SigmoidLut::min_input() const {
  return -(static_cast<std::int64_t>(saturation) << frac_bits);
}

std::int64_t SigmoidLut::max_input() const {
  return (static_cast<std::int64_t>(saturation) << frac_bits) - 1;
}

std::uint32_t SigmoidLut::entry(std::int64_t pre_activation) const {
  // saturate rather than wrap: wrapping would invert the sigmoid tails
  std::int64_t x = pre_activation;
  if (x < min_input()) x = min_input();
  if (x > max_input()) x = max_input();
  return entries[static_cast<std::size_t>(x - min_input())];
}

double SigmoidLut::input_value(std::int64_t pre_activation) const {
  return static_cast<double>(pre_activation) * std::ldexp(1.0, -frac_bits);
}

SigmoidLut build_sigmoid_lut(const SigmoidLutConfig& cfg) {
  if (cfg.compare_bits < 2 || cfg.compare_bits > 30)
    throw std::invalid_argument("compare_bits must be in [2, 30]");
  if (cfg.frac_bits < 0 || cfg.frac_bits > 20)
    throw std::invalid_argument("LUT frac_bits must be in [0, 20]");
  if (cfg.saturation < 1 || cfg.saturation > 64)
    throw std::invalid_argument("LUT saturation must be in [1, 64]");
  SigmoidLut lut;
  lut.compare_bits = cfg.compare_bits;
  lut.frac_bits = cfg.frac_bits;
  lut.saturation = cfg.saturation;
  const double scale = std::ldexp(1.0, cfg.compare_bits);
  const std::uint32_t cap = static_cast<std::uint32_t>(scale) - 1u;
  const std::int64_t lo = lut.min_input(), hi = lut.max_input();
  lut.entries.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t q = lo; q <= hi; ++q) {
    double p = sigmoid(lut.input_value(q));
    auto e = static_cast<std::uint64_t>(std::llround(p * scale));
    lut.entries.push_back(static_cast<std::uint32_t>(std::min<std::uint64_t>(e, cap)));
  }
  return lut;
}

void LfsrSpec::validate() const {
  if (width < 2 || width > 32)
    throw std::invalid_argument("LFSR width must be in [2, 32]");
  if ((taps & state_mask()) == 0)
    throw std::invalid_argument("LFSR tap mask selects no state bits");
}

void FixedRbm::validate() const {
  grid.validate();
  lfsr.validate();
  if (n_visible <= 0 || n_hidden <= 0)
    throw std::invalid_argument("fixed model must have units");
  auto sz = [](std::size_t got, std::size_t want, const char* what) {
    if (got != want)
      throw std::invalid_argument(std::string(what) + " has wrong size");
  };
  const auto nv = static_cast<std::size_t>(n_visible);
  const auto nh = static_cast<std::size_t>(n_hidden);
  sz(w_row.size(), nv * nh, "w_row");
  sz(w_col.size(), nv * nh, "w_col");
  sz(visible_bias_q.size(), nv, "visible_bias_q");
  sz(hidden_bias_q.size(), nh, "hidden_bias_q");
  sz(lfsr_seeds.size(), nv + nh, "lfsr_seeds");
  sz(visible_labels.size(), nv, "visible_labels");
  for (auto w : w_row)
    if (w < grid.min_q() || w > grid.max_q())
      throw std::invalid_argument("quantized weight out of grid range");
  for (int j = 0; j < n_hidden; ++j)
    for (int i = 0; i < n_visible; ++i)
      if (w_col[j * n_visible + i] != w_row[i * n_hidden + j])
        throw std::invalid_argument("w_col is not the transpose of w_row");
  std::set<std::uint32_t> seen;
  for (auto s : lfsr_seeds) {
    if ((s & lfsr.state_mask()) == 0)
      throw std::invalid_argument("LFSR seed reduces to zero");
    if (!seen.insert(s).second)
      throw std::invalid_argument("duplicate LFSR seed");
  }
  // the emulator accumulates in 64-bit; make sure that is always enough
  int units = std::max(n_visible, n_hidden);
  int need = grid.total_bits;
  while ((1 << (need - grid.total_bits)) < units + 1) ++need;
  if (need + 1 > 63)
    throw std::invalid_argument("model too large for 64-bit accumulation");
}

void FixedRbm::rebuild_transpose() {
  w_col.assign(static_cast<std::size_t>(n_visible) * n_hidden, 0);
  for (int i = 0; i < n_visible; ++i)
    for (int j = 0; j < n_hidden; ++j)
      w_col[j * n_visible + i] = w_row[i * n_hidden + j];
}

Rbm FixedRbm::dequantize() const {
  Rbm m = Rbm::zeros(n_visible, n_hidden);
  for (int i = 0; i < n_visible; ++i)
    for (int j = 0; j < n_hidden; ++j)
      m.weights(i, j) = grid.dequantize(w_row[i * n_hidden + j]);
  for (int i = 0; i < n_visible; ++i)
    m.visible_bias[i] = grid.dequantize(visible_bias_q[i]);
  for (int j = 0; j < n_hidden; ++j)
    m.hidden_bias[j] = grid.dequantize(hidden_bias_q[j]);
  m.visible_labels = visible_labels;
  return m;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<std::uint32_t> derive_seeds(std::uint64_t master_seed, int count,
                                        const LfsrSpec& spec) {
  spec.validate();
  std::vector<std::uint32_t> seeds;
  seeds.reserve(count);
  std::set<std::uint32_t> seen;
  std::uint64_t state = master_seed;
  while (static_cast<int>(seeds.size()) < count) {
    auto candidate =
        static_cast<std::uint32_t>(splitmix64(state)) & spec.state_mask();
    if (candidate == 0 || !seen.insert(candidate).second) continue;
    seeds.push_back(candidate);
  }
  return seeds;
}

FixedRbm quantize_model(const Rbm& model, const QuantGrid& grid,
                        const SigmoidLutConfig& lut_cfg,
                        std::uint64_t master_seed, LfsrSpec lfsr_spec) {
  model.validate();
  grid.validate();
  FixedRbm f;
  f.grid = grid;
  f.n_visible = model.n_visible();
  f.n_hidden = model.n_hidden();
  f.w_row.resize(static_cast<std::size_t>(f.n_visible) * f.n_hidden);
  for (int i = 0; i < f.n_visible; ++i)
    for (int j = 0; j < f.n_hidden; ++j)
      f.w_row[i * f.n_hidden + j] = grid.quantize_int(model.weights(i, j));
  f.rebuild_transpose();
  f.visible_bias_q.resize(f.n_visible);
  for (int i = 0; i < f.n_visible; ++i)
    f.visible_bias_q[i] = grid.quantize_int(model.visible_bias[i]);
  f.hidden_bias_q.resize(f.n_hidden);
  for (int j = 0; j < f.n_hidden; ++j)
    f.hidden_bias_q[j] = grid.quantize_int(model.hidden_bias[j]);

  SigmoidLutConfig cfg = lut_cfg;
  cfg.frac_bits = grid.frac_bits;  // LUT input shares the grid's binary point
  f.lut = build_sigmoid_lut(cfg);
  f.lfsr = lfsr_spec;
  f.lfsr_seeds = derive_seeds(master_seed, f.n_visible + f.n_hidden, lfsr_spec);
  f.visible_labels = model.visible_labels;
  f.validate();
  return f;
}

}  // namespace rbmfuse
