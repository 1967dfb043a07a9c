#include "rbmfuse/merge.hpp"

#include <map>
#include <set>

namespace rbmfuse {

void MergeSpec::validate(const Rbm& a, const Rbm& b) const {
  std::set<std::string> seen_a, seen_b;
  for (const auto& [la, lb] : pairs) {
    a.label_index(la);  // throws if absent
    b.label_index(lb);
    if (!seen_a.insert(la).second)
      throw std::invalid_argument("unit '" + la +
                                  "' merged more than once on side A");
    if (!seen_b.insert(lb).second)
      throw std::invalid_argument("unit '" + lb +
                                  "' merged more than once on side B");
  }
}

Rbm merge(const Rbm& a, const Rbm& b, const MergeSpec& spec) {
  a.validate();
  b.validate();
  spec.validate(a, b);

  const int n = a.n_visible(), m = b.n_visible();
  const int r = a.n_hidden(), s = b.n_hidden();
  const int d = static_cast<int>(spec.count());

  std::map<int, int> b_to_a;  // visible index in B -> merged partner in A
  for (const auto& [la, lb] : spec.pairs)
    b_to_a[b.label_index(lb)] = a.label_index(la);

  Rbm out = Rbm::zeros(n + m - d, r + s);
  out.weights.topLeftCorner(n, r) = a.weights;
  out.visible_bias.head(n) = a.visible_bias;
  out.hidden_bias.head(r) = a.hidden_bias;
  out.hidden_bias.tail(s) = b.hidden_bias;
  for (int i = 0; i < n; ++i) out.visible_labels[i] = a.visible_labels[i];

  int next = n;
  for (int j = 0; j < m; ++j) {
    auto merged = b_to_a.find(j);
    if (merged != b_to_a.end()) {
      // fused unit: B's row moves into A's row, biases add
      out.weights.row(merged->second).tail(s) = b.weights.row(j);
      out.visible_bias[merged->second] += b.visible_bias[j];
    } else {
      out.weights.row(next).tail(s) = b.weights.row(j);
      out.visible_bias[next] = b.visible_bias[j];
      out.visible_labels[next] = b.visible_labels[j];
      ++next;
    }
  }
  out.validate();  // catches label collisions between the unmerged parts
  return out;
}

Rbm tie_visible(const Rbm& model, const std::string& label, int bit) {
  model.validate();
  if (bit != 0 && bit != 1)
    throw std::invalid_argument("tie value must be 0 or 1");
  const int k = model.label_index(label);
  const int n = model.n_visible(), r = model.n_hidden();

  Rbm out = Rbm::zeros(n - 1, r);
  out.hidden_bias = model.hidden_bias;
  if (bit == 1) out.hidden_bias += model.weights.row(k).transpose();
  int next = 0;
  for (int i = 0; i < n; ++i) {
    if (i == k) continue;
    out.weights.row(next) = model.weights.row(i);
    out.visible_bias[next] = model.visible_bias[i];
    out.visible_labels[next] = model.visible_labels[i];
    ++next;
  }
  out.validate();
  return out;
}

}  // namespace rbmfuse
