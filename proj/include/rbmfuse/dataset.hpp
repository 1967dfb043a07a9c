#pragma once

#include "rbmfuse/rbm.hpp"

#include <functional>

namespace rbmfuse {

/// Training rows: full visible vectors for a target model.
struct Dataset {
  std::vector<Bits> rows;
  std::string description;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
};

/// A deterministic combinational function presented as full visible rows.
/// `row(k)` expands input assignment k (little-endian over the input bits)
/// into the complete visible vector, inputs and outputs included.
struct CircuitFunction {
  std::string name;
  int input_bits = 0;
  int visible_bits = 0;
  std::function<Bits(std::uint64_t)> row;
};

/// Exhaustive truth table when 2^input_bits <= max_rows, otherwise a uniform
/// random sample of input assignments (with replacement, seeded). Every row
/// satisfies the generating function by construction.
Dataset generate_truth_table(const CircuitFunction& fn, std::uint64_t max_rows,
                             std::uint64_t seed);

}  // namespace rbmfuse
