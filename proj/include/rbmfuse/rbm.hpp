#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbmfuse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Bits = std::vector<std::uint8_t>;

/// Dense binary RBM with named visible units.
///
/// Energy convention: E(v, h) = -v^T W h - a^T h - b^T v, where `weights` is
/// W (n_visible x n_hidden), `hidden_bias` is a and `visible_bias` is b.
/// States are {0,1}-valued.
struct Rbm {
  Matrix weights;                           // n_visible x n_hidden
  Vector visible_bias;                      // n_visible
  Vector hidden_bias;                       // n_hidden
  std::vector<std::string> visible_labels;  // unique unit names

  int n_visible() const { return static_cast<int>(weights.rows()); }
  int n_hidden() const { return static_cast<int>(weights.cols()); }

  /// Index of a visible unit by label; throws std::invalid_argument if absent.
  int label_index(const std::string& label) const;
  bool has_label(const std::string& label) const;

  /// Checks dimension consistency, label uniqueness and parameter finiteness.
  void validate() const;

  /// All-zero model with default labels v0..v{n-1}.
  static Rbm zeros(int n_visible, int n_hidden);
};

/// One joint configuration of an RBM.
struct BinaryState {
  Bits visible;
  Bits hidden;
};

/// Per-visible-unit optional pins. Free units are absent from the map.
class ClampPattern {
 public:
  ClampPattern() = default;

  void pin(int index, int bit);
  void pin(const Rbm& model, const std::string& label, int bit);
  bool is_pinned(int index) const { return pins_.count(index) != 0; }
  int value(int index) const { return pins_.at(index); }
  const std::map<int, std::uint8_t>& pins() const { return pins_; }
  std::size_t n_pinned() const { return pins_.size(); }
  bool empty() const { return pins_.empty(); }

  /// Throws if any pinned index is out of range for an n-visible model.
  void validate_for(int n_visible) const;

  /// Dense view: entry i is 0/1 if pinned, -1 if free.
  std::vector<std::int8_t> dense(int n_visible) const;

 private:
  std::map<int, std::uint8_t> pins_;
};

double sigmoid(double x);
double softplus(double x);  // log(1 + e^x), overflow-safe

/// E(v, h) = -v^T W h - a^T h - b^T v.
double energy(const Rbm& model, const BinaryState& state);

/// Element j is p(h_j = 1 | v) = sigmoid((W^T v + a)_j).
Vector hidden_activation(const Rbm& model, const Bits& visible);

/// Element i is p(v_i = 1 | h) = sigmoid((W h + b)_i).
Vector visible_activation(const Rbm& model, const Bits& hidden);

/// -b^T v - sum_j softplus((W^T v + a)_j); exp(-F(v)) is proportional to the
/// marginal p(v).
double free_energy(const Rbm& model, const Bits& visible);

namespace detail {
void check_bits(const Bits& bits, int expected, const char* what);
}

}  // namespace rbmfuse
