#include "rbmfuse/fixsim.hpp"

namespace rbmfuse {

Lfsr::Lfsr(std::uint32_t seed, LfsrSpec spec) : state_(seed), spec_(spec) {
  spec_.validate();
  state_ &= spec_.state_mask();
  if (state_ == 0)
    throw std::invalid_argument("LFSR seed must be nonzero");
}

std::uint32_t Lfsr::step_word(int out_bits) {
  std::uint32_t fb =
      static_cast<std::uint32_t>(__builtin_parity(state_ & spec_.taps));
  state_ = ((state_ << 1) | fb) & spec_.state_mask();
  return state_ >> (spec_.width - out_bits);
}

std::int64_t masked_accumulate(std::span<const std::int32_t> weights,
                               std::span<const std::uint8_t> nodes) {
  if (weights.size() != nodes.size())
    throw std::invalid_argument("masked_accumulate length mismatch");
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    acc += static_cast<std::int64_t>(weights[i]) &
           -static_cast<std::int64_t>(nodes[i]);
  return acc;
}

std::uint8_t node_update(std::span<const std::int32_t> weights_row,
                         std::int32_t bias,
                         std::span<const std::uint8_t> nodes,
                         const SigmoidLut& lut, Lfsr& lfsr) {
  std::int64_t pre = masked_accumulate(weights_row, nodes) + bias;
  std::uint32_t threshold = lut.entry(pre);
  std::uint32_t word = lfsr.step_word(lut.compare_bits);
  return word < threshold ? 1 : 0;
}

namespace {

std::vector<Lfsr> make_bank(const FixedRbm& model,
                            const std::vector<std::uint32_t>& seeds) {
  if (seeds.size() !=
      static_cast<std::size_t>(model.n_visible + model.n_hidden))
    throw std::invalid_argument("seed bank size must be n_visible + n_hidden");
  std::vector<Lfsr> bank;
  bank.reserve(seeds.size());
  for (auto s : seeds) bank.emplace_back(s, model.lfsr);
  return bank;
}

}  // namespace

FixedEngine::FixedEngine(const FixedRbm& model, ClampPattern clamps)
    : FixedEngine(model, std::move(clamps), model.lfsr_seeds) {}

FixedEngine::FixedEngine(const FixedRbm& model, ClampPattern clamps,
                         std::vector<std::uint32_t> seed_bank)
    : model_(&model),
      clamp_(clamps.dense(model.n_visible)),
      vbits_(model.n_visible, 0),
      hbits_(model.n_hidden, 0),
      bank_(make_bank(model, seed_bank)) {
  model.validate();
  const std::uint32_t half = 1u << (model.lut.compare_bits - 1);
  for (int i = 0; i < model_->n_visible; ++i) {
    if (clamp_[i] >= 0)
      vbits_[i] = static_cast<std::uint8_t>(clamp_[i]);
    else
      vbits_[i] = bank_[i].step_word(model.lut.compare_bits) < half ? 1 : 0;
  }
}

const Bits& FixedEngine::step() {
  const FixedRbm& m = *model_;
  const int nv = m.n_visible, nh = m.n_hidden;
  const SigmoidLut& lut = m.lut;
  for (int j = 0; j < nh; ++j) {
    const std::int32_t* row = m.weight_col(j);
    std::int64_t acc = m.hidden_bias_q[j];
    for (int i = 0; i < nv; ++i)
      acc += static_cast<std::int64_t>(row[i]) &
             -static_cast<std::int64_t>(vbits_[i]);
    std::uint32_t word = bank_[nv + j].step_word(lut.compare_bits);
    hbits_[j] = word < lut.entry(acc) ? 1 : 0;
  }
  for (int i = 0; i < nv; ++i) {
    if (clamp_[i] >= 0) continue;
    const std::int32_t* row = m.weight_row(i);
    std::int64_t acc = m.visible_bias_q[i];
    for (int j = 0; j < nh; ++j)
      acc += static_cast<std::int64_t>(row[j]) &
             -static_cast<std::int64_t>(hbits_[j]);
    std::uint32_t word = bank_[i].step_word(lut.compare_bits);
    vbits_[i] = word < lut.entry(acc) ? 1 : 0;
  }
  ++counter_;
  return vbits_;
}

SamplerFactory fixed_engine_factory(const FixedRbm& model) {
  return [&model](const ClampPattern& clamps, std::uint64_t seed) {
    auto seeds =
        derive_seeds(seed, model.n_visible + model.n_hidden, model.lfsr);
    return std::make_unique<FixedEngine>(model, clamps, std::move(seeds));
  };
}

std::vector<Bits> run_fixed(const FixedRbm& model, const ClampPattern& clamps,
                            int n_samples) {
  return run_fixed(model, clamps, n_samples, model.lfsr_seeds);
}

std::vector<Bits> run_fixed(const FixedRbm& model, const ClampPattern& clamps,
                            int n_samples, std::vector<std::uint32_t> seeds) {
  if (n_samples < 1)
    throw std::invalid_argument("n_samples must be at least 1");
  FixedEngine engine(model, clamps, std::move(seeds));
  std::vector<Bits> out;
  out.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) out.push_back(engine.step());
  return out;
}

}  // namespace rbmfuse
