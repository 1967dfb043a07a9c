#pragma once

#include "rbmfuse/rbm.hpp"

namespace rbmfuse {

/// Signed two's-complement fixed-point grid: values q * 2^-frac_bits with
/// q in [-2^(total_bits-1), 2^(total_bits-1) - 1].
struct QuantGrid {
  int total_bits = 8;
  int frac_bits = 5;

  void validate() const;
  double step() const { return std::ldexp(1.0, -frac_bits); }
  std::int32_t min_q() const { return -(1 << (total_bits - 1)); }
  std::int32_t max_q() const { return (1 << (total_bits - 1)) - 1; }
  double min_value() const { return min_q() * step(); }
  double max_value() const { return max_q() * step(); }

  /// Nearest representable integer code, saturating at the range ends.
  std::int32_t quantize_int(double x) const;
  double dequantize(std::int32_t q) const { return q * step(); }
};

/// Q(x): nearest grid value, saturating. |x - Q(x)| <= step/2 in range.
double quantize_value(double x, const QuantGrid& grid);

/// Picks frac_bits for a total width so that `magnitude` (e.g. the trained
/// max-weight constraint, or the largest parameter) maps to full scale.
QuantGrid grid_for_magnitude(int total_bits, double magnitude);
QuantGrid auto_grid(const Rbm& model, int total_bits);

struct SigmoidLutConfig {
  int compare_bits = 16;  // PRNG comparison width; entries scale 2^compare_bits
  int frac_bits = 5;      // binary point of the pre-activation input
  int saturation = 8;     // input domain is [-saturation, saturation)
};

/// Precomputed sigmoid table. entry(x) = round(sigmoid(x * step) * 2^c),
/// capped at 2^c - 1; a node fires when the PRNG word compares below the
/// entry. Inputs outside the domain saturate to the nearest end.
struct SigmoidLut {
  int compare_bits = 16;
  int frac_bits = 5;
  int saturation = 8;
  std::vector<std::uint32_t> entries;  // 2 * saturation * 2^frac_bits entries

  int input_bits() const;
  std::int64_t min_input() const;  // inclusive, in pre-activation units
  std::int64_t max_input() const;  // inclusive
  std::uint32_t entry(std::int64_t pre_activation) const;
  double input_value(std::int64_t pre_activation) const;
};

SigmoidLut build_sigmoid_lut(const SigmoidLutConfig& cfg);

/// LFSR polynomial, Fibonacci form. `taps` is a bitmask over state bits;
/// the defaults are maximal-length.
struct LfsrSpec {
  int width = 32;
  std::uint32_t taps = 0x80200003u;  // x^32 + x^22 + x^2 + x + 1

  void validate() const;
  std::uint32_t state_mask() const {
    return width == 32 ? 0xffffffffu : ((1u << width) - 1u);
  }
};

inline constexpr std::uint32_t kLfsr32Taps = 0x80200003u;
inline constexpr std::uint32_t kLfsr8Taps = 0xb8u;  // x^8 + x^6 + x^5 + x^4 + 1

/// Quantized integer model for the fixed-point sampling engine. Weights are
/// kept in both row-major (per visible unit) and column-major (per hidden
/// unit) layouts so either layer update walks contiguous memory.
struct FixedRbm {
  QuantGrid grid;
  int n_visible = 0;
  int n_hidden = 0;
  std::vector<std::int32_t> w_row;  // [n_visible][n_hidden]
  std::vector<std::int32_t> w_col;  // [n_hidden][n_visible]
  std::vector<std::int32_t> visible_bias_q;
  std::vector<std::int32_t> hidden_bias_q;
  SigmoidLut lut;
  LfsrSpec lfsr;
  std::vector<std::uint32_t> lfsr_seeds;  // visible units then hidden units
  std::vector<std::string> visible_labels;
  std::string provenance;

  void validate() const;
  const std::int32_t* weight_row(int i) const { return &w_row[i * n_hidden]; }
  const std::int32_t* weight_col(int j) const { return &w_col[j * n_visible]; }
  void rebuild_transpose();  // refresh w_col from w_row
  Rbm dequantize() const;
};

/// Distinct nonzero per-unit seeds from one master seed (splitmix64-based).
std::vector<std::uint32_t> derive_seeds(std::uint64_t master_seed, int count,
                                        const LfsrSpec& spec);

/// Quantizes all parameters onto the grid, builds the sigmoid LUT for the
/// grid's binary point and assigns per-unit LFSR seeds. Deterministic given
/// the master seed.
FixedRbm quantize_model(const Rbm& model, const QuantGrid& grid,
                        const SigmoidLutConfig& lut_cfg,
                        std::uint64_t master_seed,
                        LfsrSpec lfsr_spec = LfsrSpec{});

}  // namespace rbmfuse
