#include "rbmfuse/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace rbmfuse {

void Distribution::validate() const {
  if (static_cast<std::size_t>(probs.size()) != support.size())
    throw std::invalid_argument("distribution support/probs size mismatch");
  double sum = 0.0;
  for (int k = 0; k < probs.size(); ++k) {
    if (probs[k] < 0) throw std::invalid_argument("negative probability");
    sum += probs[k];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("probabilities do not sum to 1");
}

namespace {

struct FreeEnumeration {
  std::vector<int> free_indices;
  Bits base;  // pinned values filled in, free units 0
};

FreeEnumeration prepare(const Rbm& model, const ClampPattern& clamps,
                        int max_free_units) {
  clamps.validate_for(model.n_visible());
  FreeEnumeration e;
  e.base.assign(model.n_visible(), 0);
  for (int i = 0; i < model.n_visible(); ++i) {
    if (clamps.is_pinned(i))
      e.base[i] = static_cast<std::uint8_t>(clamps.value(i));
    else
      e.free_indices.push_back(i);
  }
  if (static_cast<int>(e.free_indices.size()) > max_free_units)
    throw std::invalid_argument(
        "exact enumeration over " + std::to_string(e.free_indices.size()) +
        " free units exceeds the guard of " + std::to_string(max_free_units));
  return e;
}

void apply_assignment(Bits& v, const std::vector<int>& free_indices,
                      std::uint64_t k) {
  for (std::size_t j = 0; j < free_indices.size(); ++j)
    v[free_indices[j]] = static_cast<std::uint8_t>((k >> j) & 1u);
}

}  // namespace

Distribution exact_distribution(const Rbm& model, const ClampPattern& clamps,
                                int max_free_units) {
  model.validate();
  auto e = prepare(model, clamps, max_free_units);
  const std::uint64_t count = 1ull << e.free_indices.size();

  Distribution d;
  d.support.reserve(count);
  std::vector<double> logp(count);
  double max_logp = -std::numeric_limits<double>::infinity();
  Bits v = e.base;
  for (std::uint64_t k = 0; k < count; ++k) {
    apply_assignment(v, e.free_indices, k);
    d.support.push_back(v);
    logp[k] = -free_energy(model, v);
    max_logp = std::max(max_logp, logp[k]);
  }
  double z = 0.0;
  for (auto& lp : logp) z += std::exp(lp - max_logp);
  d.probs.resize(count);
  for (std::uint64_t k = 0; k < count; ++k)
    d.probs[k] = std::exp(logp[k] - max_logp) / z;
  return d;
}

double kl_divergence(const Distribution& p, const Distribution& q) {
  if (p.support.size() != q.support.size())
    throw std::invalid_argument("KL divergence requires identical supports");
  for (std::size_t k = 0; k < p.support.size(); ++k)
    if (p.support[k] != q.support[k])
      throw std::invalid_argument("KL divergence requires identical supports");
  double kl = 0.0;
  for (int k = 0; k < p.probs.size(); ++k) {
    if (p.probs[k] == 0.0) continue;
    if (q.probs[k] <= 0.0)
      throw std::invalid_argument("q must be positive on the support of p");
    kl += p.probs[k] * std::log(p.probs[k] / q.probs[k]);
  }
  return kl;
}

double total_variation(const Distribution& p, const Distribution& q) {
  if (p.support.size() != q.support.size())
    throw std::invalid_argument("total variation requires identical supports");
  double tv = 0.0;
  for (int k = 0; k < p.probs.size(); ++k)
    tv += std::abs(p.probs[k] - q.probs[k]);
  return 0.5 * tv;
}

std::uint64_t exact_answer_mode(const Rbm& model, const ClampPattern& clamps,
                                const std::vector<int>& answer_bits,
                                int max_free_units) {
  auto e = prepare(model, clamps, max_free_units);
  const std::uint64_t count = 1ull << e.free_indices.size();

  // log-sum-exp accumulated per answer key
  std::unordered_map<std::uint64_t, double> mass;
  std::vector<double> logp(count);
  double max_logp = -std::numeric_limits<double>::infinity();
  Bits v = e.base;
  for (std::uint64_t k = 0; k < count; ++k) {
    apply_assignment(v, e.free_indices, k);
    logp[k] = -free_energy(model, v);
    max_logp = std::max(max_logp, logp[k]);
  }
  Bits w = e.base;
  for (std::uint64_t k = 0; k < count; ++k) {
    apply_assignment(w, e.free_indices, k);
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < answer_bits.size(); ++j)
      key |= static_cast<std::uint64_t>(w[answer_bits[j]] & 1u) << j;
    mass[key] += std::exp(logp[k] - max_logp);
  }
  std::uint64_t best_key = 0;
  double best_mass = -1.0;
  for (const auto& [key, m] : mass) {
    if (m > best_mass || (m == best_mass && key < best_key)) {
      best_mass = m;
      best_key = key;
    }
  }
  return best_key;
}

}  // namespace rbmfuse
