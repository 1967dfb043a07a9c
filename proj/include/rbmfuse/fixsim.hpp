#pragma once

#include "rbmfuse/quantize.hpp"
#include "rbmfuse/sampler.hpp"

#include <span>

namespace rbmfuse {

/// Fibonacci LFSR over a nonzero state. step() shifts once, feeding back the
/// XOR of the tapped bits, and returns the top `out_bits` of the new state.
class Lfsr {
 public:
  Lfsr(std::uint32_t seed, LfsrSpec spec = LfsrSpec{});

  std::uint32_t step_word(int out_bits);
  std::uint32_t state() const { return state_; }
  const LfsrSpec& spec() const { return spec_; }

 private:
  std::uint32_t state_;
  LfsrSpec spec_;
};

/// Sum of the weights whose node bit is set, in a 64-bit accumulator. The
/// binary mask stands in for the hardware mux bank: no multiplies.
std::int64_t masked_accumulate(std::span<const std::int32_t> weights,
                               std::span<const std::uint8_t> nodes);

/// One hardware node update: masked weight accumulation, bias add,
/// saturation into the sigmoid LUT input domain, then a compare of the LUT
/// threshold against one fresh LFSR word. Returns the new node bit; the
/// LFSR advances exactly once.
std::uint8_t node_update(std::span<const std::int32_t> weights_row,
                         std::int32_t bias,
                         std::span<const std::uint8_t> nodes,
                         const SigmoidLut& lut, Lfsr& lfsr);

/// Bit-exact emulator of the fixed-point sampling datapath. Layer update
/// order matches the float engine (hidden from visible, then free visible
/// from hidden) so the two engines are comparable chain-for-chain.
///
/// LFSR bank layout: visible units 0..n-1 own lanes 0..n-1, hidden units
/// own lanes n..n+r-1. Initialization: each free visible unit draws one
/// word from its own lane and starts at 1 iff the word falls below half
/// scale; pinned units are set from the clamps and consume no randomness;
/// hidden starts at zero. Pinned units never advance their lane afterwards.
class FixedEngine final : public VisibleSampler {
 public:
  FixedEngine(const FixedRbm& model, ClampPattern clamps);
  FixedEngine(const FixedRbm& model, ClampPattern clamps,
              std::vector<std::uint32_t> seed_bank);

  const Bits& step() override;
  const Bits& visible() const override { return vbits_; }
  const Bits& hidden() const { return hbits_; }
  std::uint64_t samples_taken() const { return counter_; }
  const std::vector<Lfsr>& bank() const { return bank_; }

 private:
  const FixedRbm* model_;
  std::vector<std::int8_t> clamp_;
  Bits vbits_, hbits_;
  std::vector<Lfsr> bank_;
  std::uint64_t counter_ = 0;
};

/// Factory with seeds taken from the model (chain k reuses the model's seed
/// bank advanced by a per-chain splitmix of `seed`).
SamplerFactory fixed_engine_factory(const FixedRbm& model);

/// Runs the emulator and materializes n_samples visible vectors.
std::vector<Bits> run_fixed(const FixedRbm& model, const ClampPattern& clamps,
                            int n_samples);
std::vector<Bits> run_fixed(const FixedRbm& model, const ClampPattern& clamps,
                            int n_samples, std::vector<std::uint32_t> seeds);

}  // namespace rbmfuse
