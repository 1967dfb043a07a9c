#pragma once

#include "rbmfuse/rbm.hpp"

#include <functional>
#include <memory>
#include <random>

namespace rbmfuse {

/// Reference RNG for the floating-point engine. Long-period generator,
/// independent of the fixed-point engine's per-unit LFSRs. Uniform doubles
/// are produced from the top 53 bits so streams are reproducible bit-for-bit
/// for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t word() { return eng_(); }
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }
  bool coin(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

/// One full block-Gibbs update: all hidden units are resampled from
/// p(h | v), then all free visible units from p(v | h); pinned visible units
/// are copied through unchanged. Draw order is hidden 0..r-1 then free
/// visible 0..n-1 (pinned units consume no randomness).
BinaryState gibbs_step(const Rbm& model, const BinaryState& state,
                       const ClampPattern& clamps, Rng& rng);

/// Anything that emits visible samples one full Gibbs step at a time.
/// Both the float engine and the fixed-point emulator implement this, so
/// task-level code is engine-agnostic.
class VisibleSampler {
 public:
  virtual ~VisibleSampler() = default;
  virtual const Bits& step() = 0;
  virtual const Bits& visible() const = 0;
};

/// Builds a fresh chain for a clamp pattern and seed.
using SamplerFactory = std::function<std::unique_ptr<VisibleSampler>(
    const ClampPattern&, std::uint64_t seed)>;

/// Floating-point reference chain. Free visible units are initialized by
/// fair coin flips from the seeded RNG (in index order), pinned units from
/// the clamps, and the hidden layer to zero; each step() performs one full
/// gibbs_step and returns the visible state. No burn-in is applied; callers
/// discard samples explicitly.
class GibbsChain final : public VisibleSampler {
 public:
  GibbsChain(const Rbm& model, ClampPattern clamps, std::uint64_t seed);

  const Bits& step() override;
  const Bits& visible() const override { return vbits_; }
  const Bits& hidden() const { return hbits_; }

 private:
  const Rbm* model_;
  std::vector<std::int8_t> clamp_;  // -1 free, else pinned value
  Vector v_, h_;                    // 0/1 as doubles for fast matvecs
  Bits vbits_, hbits_;
  Rng rng_;
};

SamplerFactory float_engine_factory(const Rbm& model);

/// Runs a fresh chain and materializes n_samples visible vectors.
/// Deterministic given (model, clamps, seed).
std::vector<Bits> sample_chain(const Rbm& model, const ClampPattern& clamps,
                               int n_samples, std::uint64_t seed);

}  // namespace rbmfuse
