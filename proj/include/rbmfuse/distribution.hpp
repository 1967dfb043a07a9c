#pragma once

#include "rbmfuse/rbm.hpp"

namespace rbmfuse {

/// Explicit distribution over visible configurations. `support[k]` is a full
/// visible vector and `probs[k]` its probability; probs sum to 1.
struct Distribution {
  std::vector<Bits> support;
  Vector probs;

  void validate() const;  // probs >= 0, sum within 1e-12 of 1, sizes match
};

/// Brute-force visible marginal under optional clamps. Enumerates every
/// assignment of the free visible units (hidden units are marginalized
/// analytically through free_energy), scores and normalizes in log space.
///
/// Free-unit assignment k maps bit j of k to the j-th free index in
/// ascending order, so the support is ordered and deterministic.
/// Throws if the number of free units exceeds `max_free_units`.
Distribution exact_distribution(const Rbm& model, const ClampPattern& clamps,
                                int max_free_units = 24);

/// sum_k p_k log(p_k / q_k). Supports must be identical (same order);
/// q must be strictly positive wherever p is.
double kl_divergence(const Distribution& p, const Distribution& q);

/// 0.5 * sum_k |p_k - q_k| over a shared support (same order required).
double total_variation(const Distribution& p, const Distribution& q);

/// Exact mode of the marginal over a subset of visible units (`answer_bits`,
/// little-endian: bit j of the returned key is the unit answer_bits[j]).
/// Probability mass of each key is accumulated over all free assignments.
std::uint64_t exact_answer_mode(const Rbm& model, const ClampPattern& clamps,
                                const std::vector<int>& answer_bits,
                                int max_free_units = 24);

}  // namespace rbmfuse
