#include "rbmfuse/rbm.hpp"

#include <cmath>
#include <set>

namespace rbmfuse {

namespace detail {

void check_bits(const Bits& bits, int expected, const char* what) {
  if (static_cast<int>(bits.size()) != expected)
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(expected) + ", got " +
                                std::to_string(bits.size()));
  for (auto b : bits)
    if (b > 1)
      throw std::invalid_argument(std::string(what) +
                                  ": entries must be 0 or 1");
}

}  // namespace detail

int Rbm::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < visible_labels.size(); ++i)
    if (visible_labels[i] == label) return static_cast<int>(i);
  throw std::invalid_argument("no visible unit named '" + label + "'");
}

bool Rbm::has_label(const std::string& label) const {
  for (const auto& l : visible_labels)
    if (l == label) return true;
  return false;
}

void Rbm::validate() const {
  if (visible_bias.size() != weights.rows())
    throw std::invalid_argument("visible_bias length does not match weights");
  if (hidden_bias.size() != weights.cols())
    throw std::invalid_argument("hidden_bias length does not match weights");
  if (static_cast<int>(visible_labels.size()) != n_visible())
    throw std::invalid_argument("visible_labels length does not match weights");
  std::set<std::string> seen;
  for (const auto& l : visible_labels)
    if (!seen.insert(l).second)
      throw std::invalid_argument("duplicate visible label '" + l + "'");
  if (!weights.allFinite() || !visible_bias.allFinite() ||
      !hidden_bias.allFinite())
    throw std::invalid_argument("model parameters must be finite");
}

Rbm Rbm::zeros(int n_visible, int n_hidden) {
  Rbm m;
  m.weights = Matrix::Zero(n_visible, n_hidden);
  m.visible_bias = Vector::Zero(n_visible);
  m.hidden_bias = Vector::Zero(n_hidden);
  m.visible_labels.reserve(n_visible);
  for (int i = 0; i < n_visible; ++i)
    m.visible_labels.push_back("v" + std::to_string(i));
  return m;
}

void ClampPattern::pin(int index, int bit) {
  if (index < 0) throw std::invalid_argument("pinned index must be >= 0");
  if (bit != 0 && bit != 1)
    throw std::invalid_argument("pinned value must be 0 or 1");
  pins_[index] = static_cast<std::uint8_t>(bit);
}

void ClampPattern::pin(const Rbm& model, const std::string& label, int bit) {
  pin(model.label_index(label), bit);
}

void ClampPattern::validate_for(int n_visible) const {
  if (!pins_.empty() && pins_.rbegin()->first >= n_visible)
    throw std::invalid_argument("pinned index " +
                                std::to_string(pins_.rbegin()->first) +
                                " out of range for " +
                                std::to_string(n_visible) + " visible units");
}

std::vector<std::int8_t> ClampPattern::dense(int n_visible) const {
  validate_for(n_visible);
  std::vector<std::int8_t> out(n_visible, -1);
  for (const auto& [i, b] : pins_) out[i] = static_cast<std::int8_t>(b);
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double energy(const Rbm& model, const BinaryState& state) {
  detail::check_bits(state.visible, model.n_visible(), "visible state");
  detail::check_bits(state.hidden, model.n_hidden(), "hidden state");
  double e = 0.0;
  for (int j = 0; j < model.n_hidden(); ++j) {
    if (!state.hidden[j]) continue;
    e -= model.hidden_bias[j];
    for (int i = 0; i < model.n_visible(); ++i)
      if (state.visible[i]) e -= model.weights(i, j);
  }
  for (int i = 0; i < model.n_visible(); ++i)
    if (state.visible[i]) e -= model.visible_bias[i];
  return e;
}

namespace {

Vector bits_to_vec(const Bits& bits) {
  Vector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) v[i] = bits[i] ? 1.0 : 0.0;
  return v;
}

}  // namespace

Vector hidden_activation(const Rbm& model, const Bits& visible) {
  detail::check_bits(visible, model.n_visible(), "visible state");
  Vector act =
      model.weights.transpose() * bits_to_vec(visible) + model.hidden_bias;
  return act.unaryExpr([](double x) { return sigmoid(x); });
}

Vector visible_activation(const Rbm& model, const Bits& hidden) {
  detail::check_bits(hidden, model.n_hidden(), "hidden state");
  Vector act = model.weights * bits_to_vec(hidden) + model.visible_bias;
  return act.unaryExpr([](double x) { return sigmoid(x); });
}

double free_energy(const Rbm& model, const Bits& visible) {
  detail::check_bits(visible, model.n_visible(), "visible state");
  Vector v = bits_to_vec(visible);
  Vector act = model.weights.transpose() * v + model.hidden_bias;
  double f = -model.visible_bias.dot(v);
  for (int j = 0; j < act.size(); ++j) f -= softplus(act[j]);
  return f;
}

}  // namespace rbmfuse
