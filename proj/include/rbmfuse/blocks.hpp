#pragma once

#include "rbmfuse/dataset.hpp"

#include <functional>

namespace rbmfuse {

/// A named group of visible units forming one integer field. Bit order is
/// little-endian across the label list: labels[j] carries bit j.
struct FieldSpec {
  std::string name;
  bool is_input = false;
  std::vector<std::string> labels;

  int width() const { return static_cast<int>(labels.size()); }
};
using FieldMap = std::vector<FieldSpec>;

const FieldSpec& find_field(const FieldMap& fields, const std::string& name);

/// Visible indices of a field in a model, in bit order.
std::vector<int> field_indices(const Rbm& model, const FieldSpec& field);

struct Port {
  std::string name;
  int width = 1;
  bool is_input = true;
};

/// A reusable logic block: port structure plus the Boolean function it
/// computes. The RBM realizing a block is trained separately and shipped as
/// a fixture; BlockDef supplies the ground truth used for datasets,
/// validation and circuit evaluation.
///
/// Visible labels are derived from ports in declaration order: a width-1
/// port "cin" yields the label "cin", a width-w port "a" yields a0..a{w-1}
/// (bit 0 first).
struct BlockDef {
  std::string name;
  std::vector<Port> ports;
  int default_hidden = 8;
  /// Maps input port values (in input-port order) to output port values
  /// (in output-port order).
  std::function<std::vector<std::uint64_t>(const std::vector<std::uint64_t>&)>
      eval;

  int n_visible() const;
  int input_bits() const;
  std::vector<std::string> labels() const;
  FieldMap fields() const;
  const Port& port(const std::string& name) const;

  /// Full visible row for an input assignment (little-endian across the
  /// concatenated input ports).
  Bits expand(std::uint64_t input) const;
  CircuitFunction function() const;
};

/// Built-in block library: gates (not1, and2, or2, xor2), half/full adders
/// (hadd, fadd), ripple-width adders add2/add4/add6 (a + b + cin -> s, with
/// s carrying the carry-out in its top bit) and multipliers mul2/mul4
/// (a * b -> p, names refer to the product width).
const std::vector<BlockDef>& standard_blocks();
const BlockDef& block_def(const std::string& name);
bool has_block_def(const std::string& name);

/// Parametric constructors behind the standard library.
BlockDef adder_block(int operand_bits);      // a[n] + b[n] + cin -> s[n+1]
BlockDef multiplier_block(int product_bits);  // a[p/2] * b[p/2] -> p[p]

}  // namespace rbmfuse
