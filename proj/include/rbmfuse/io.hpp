#pragma once

#include "rbmfuse/blocks.hpp"
#include "rbmfuse/quantize.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>

namespace rbmfuse {

/// On-disk model container: float parameters, fixed-point parameters, or
/// both, plus task metadata (field map, bit order). The binary layout is
/// documented in docs/model_format.md; files whose path ends in ".json" use
/// the JSON interchange form instead. Saving is byte-deterministic.
struct ModelFile {
  std::optional<Rbm> rbm;
  std::optional<FixedRbm> fixed;
  FieldMap fields;
  std::string bit_order = "little";

  const Rbm& require_rbm() const;
  const FixedRbm& require_fixed() const;
};

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

nlohmann::json model_to_json(const ModelFile& file);
ModelFile model_from_json(const nlohmann::json& j);

/// Packed visible-sample stream: small header (count, width) then one
/// bit-packed row per sample, bit k of a row stored at byte k/8, bit k%8.
void save_samples(const std::string& path, int width_bits,
                  const std::vector<Bits>& rows);
std::vector<Bits> load_samples(const std::string& path);

/// Golden trace for bit-exact regression: the LFSR bank configuration and
/// seeds, a hash of the quantized parameters, and the first N visible
/// samples of a run.
struct GoldenTrace {
  LfsrSpec lfsr;
  int compare_bits = 16;
  std::vector<std::uint32_t> seeds;
  std::uint64_t params_hash = 0;
  int width_bits = 0;
  std::vector<Bits> samples;
};

void save_trace(const std::string& path, const GoldenTrace& trace);
GoldenTrace load_trace(const std::string& path);

/// FNV-1a over the quantized parameters and grid; identifies the model a
/// trace belongs to.
std::uint64_t fixed_params_hash(const FixedRbm& model);

/// CSV with a leading "# {json config}" comment line so every emitted file
/// carries the exact configuration and seeds needed to replay it.
void write_csv(const std::string& path, const nlohmann::json& config,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string fmt_double(double value);  // round-trip precision

}  // namespace rbmfuse
