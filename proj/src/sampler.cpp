#include "rbmfuse/sampler.hpp"

namespace rbmfuse {

BinaryState gibbs_step(const Rbm& model, const BinaryState& state,
                       const ClampPattern& clamps, Rng& rng) {
  detail::check_bits(state.visible, model.n_visible(), "visible state");
  detail::check_bits(state.hidden, model.n_hidden(), "hidden state");
  clamps.validate_for(model.n_visible());

  BinaryState next = state;
  Vector hp = hidden_activation(model, state.visible);
  for (int j = 0; j < model.n_hidden(); ++j)
    next.hidden[j] = rng.coin(hp[j]) ? 1 : 0;
  Vector vp = visible_activation(model, next.hidden);
  for (int i = 0; i < model.n_visible(); ++i) {
    if (clamps.is_pinned(i))
      next.visible[i] = static_cast<std::uint8_t>(clamps.value(i));
    else
      next.visible[i] = rng.coin(vp[i]) ? 1 : 0;
  }
  return next;
}

GibbsChain::GibbsChain(const Rbm& model, ClampPattern clamps,
                       std::uint64_t seed)
    : model_(&model),
      clamp_(clamps.dense(model.n_visible())),
      v_(model.n_visible()),
      h_(Vector::Zero(model.n_hidden())),
      vbits_(model.n_visible(), 0),
      hbits_(model.n_hidden(), 0),
      rng_(seed) {
  model.validate();
  for (int i = 0; i < model_->n_visible(); ++i) {
    std::uint8_t b = clamp_[i] >= 0 ? static_cast<std::uint8_t>(clamp_[i])
                                    : (rng_.coin(0.5) ? 1 : 0);
    vbits_[i] = b;
    v_[i] = b;
  }
}

const Bits& GibbsChain::step() {
  const Rbm& m = *model_;
  Vector act = m.weights.transpose() * v_ + m.hidden_bias;
  for (int j = 0; j < m.n_hidden(); ++j) {
    std::uint8_t b = rng_.coin(sigmoid(act[j])) ? 1 : 0;
    hbits_[j] = b;
    h_[j] = b;
  }
  act.noalias() = m.weights * h_;
  act += m.visible_bias;
  for (int i = 0; i < m.n_visible(); ++i) {
    if (clamp_[i] >= 0) continue;
    std::uint8_t b = rng_.coin(sigmoid(act[i])) ? 1 : 0;
    vbits_[i] = b;
    v_[i] = b;
  }
  return vbits_;
}

SamplerFactory float_engine_factory(const Rbm& model) {
  return [&model](const ClampPattern& clamps, std::uint64_t seed) {
    return std::make_unique<GibbsChain>(model, clamps, seed);
  };
}

std::vector<Bits> sample_chain(const Rbm& model, const ClampPattern& clamps,
                               int n_samples, std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("n_samples must be at least 1");
  GibbsChain chain(model, clamps, seed);
  std::vector<Bits> out;
  out.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) out.push_back(chain.step());
  return out;
}

}  // namespace rbmfuse
