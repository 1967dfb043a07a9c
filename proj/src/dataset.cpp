#include "rbmfuse/dataset.hpp"

#include "rbmfuse/sampler.hpp"

namespace rbmfuse {

Dataset generate_truth_table(const CircuitFunction& fn, std::uint64_t max_rows,
                             std::uint64_t seed) {
  if (!fn.row) throw std::invalid_argument("circuit function has no row map");
  if (fn.input_bits < 0 || fn.input_bits > 62)
    throw std::invalid_argument("unsupported input width");
  Dataset d;
  const std::uint64_t total = 1ull << fn.input_bits;
  if (total <= max_rows) {
    d.rows.reserve(total);
    for (std::uint64_t k = 0; k < total; ++k) d.rows.push_back(fn.row(k));
    d.description = fn.name + " (exhaustive, " + std::to_string(total) + " rows)";
  } else {
    Rng rng(seed);
    d.rows.reserve(max_rows);
    for (std::uint64_t k = 0; k < max_rows; ++k) {
      // rejection-free since total is a power of two
      std::uint64_t input = rng.word() & (total - 1);
      d.rows.push_back(fn.row(input));
    }
    d.description = fn.name + " (sampled " + std::to_string(max_rows) +
                    " of " + std::to_string(total) + ")";
  }
  for (const auto& r : d.rows)
    detail::check_bits(r, fn.visible_bits, "dataset row");
  return d;
}

}  // namespace rbmfuse
