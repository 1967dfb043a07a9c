#pragma once

#include "rbmfuse/rbm.hpp"

namespace rbmfuse {

/// Visible-unit identifications between two models. Each side of a pair may
/// appear at most once per merge.
struct MergeSpec {
  std::vector<std::pair<std::string, std::string>> pairs;  // (label in A, label in B)

  std::size_t count() const { return pairs.size(); }
  void validate(const Rbm& a, const Rbm& b) const;
};

/// Fuses B into A along the paired visible units. The result has
/// n_A + n_B - d visible units (A's units in order, then B's unmerged units)
/// and r_A + r_B hidden units; merged rows carry both blocks' weight rows,
/// merged visible biases add, hidden biases concatenate. Energies add
/// exactly: E(merged) = E_A + E_B under the induced index maps, so the
/// merged distribution is the normalized product of the parts.
///
/// Merged units keep A's label. Unmerged labels must not collide.
Rbm merge(const Rbm& a, const Rbm& b, const MergeSpec& spec);

/// Pins a visible unit to a constant and eliminates it from the model. For
/// bit = 0 the unit's row simply disappears; for bit = 1 its weight row
/// folds into the hidden biases. Exact: the remaining units' joint equals
/// the original conditional distribution given the pin.
Rbm tie_visible(const Rbm& model, const std::string& label, int bit);

}  // namespace rbmfuse
