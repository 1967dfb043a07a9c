#pragma once

#include "rbmfuse/blocks.hpp"
#include "rbmfuse/dataset.hpp"
#include "rbmfuse/quantize.hpp"
#include "rbmfuse/sampler.hpp"

#include <functional>
#include <optional>

namespace rbmfuse {

/// Piecewise-constant lambda(epoch) for the quantization pull. Empty means
/// lambda = 0 throughout.
struct LambdaSchedule {
  std::vector<std::pair<int, double>> points;  // (first epoch, lambda)

  double at(int epoch) const;
  bool empty() const { return points.empty(); }
  void validate() const;  // epochs increasing, lambdas >= 0 and non-decreasing

  /// Geometric ramp to lambda_max over the final third of training.
  static LambdaSchedule geometric_ramp(int epochs, double lambda_max,
                                       int steps = 12);
};

struct TrainConfig {
  int cd_k = 1;
  double learning_rate = 0.05;
  int batch_size = 32;
  int epochs = 0;
  std::optional<double> max_weight;  // clip magnitude for weights and biases
  LambdaSchedule lambda_schedule;
  double quant_rate = -1.0;  // step scale of the quantization pull; < 0 means
                             // "use learning_rate"
  std::uint64_t seed = 1;
  int validation_interval = 1;
  bool resample_per_epoch = false;  // redraw sampled datasets every epoch

  double effective_quant_rate() const {
    return quant_rate < 0 ? learning_rate : quant_rate;
  }
};

/// Task-based validation: clamp some units, take the exact marginal mode
/// over the answer units, ask the predicate whether it is a correct answer.
struct ValidationInstance {
  ClampPattern clamps;
  std::vector<int> answer_bits;
  std::function<bool(std::uint64_t)> accept;
};
struct ValidationTask {
  std::vector<ValidationInstance> instances;
};

/// Fraction of validation instances whose exact conditional mode is
/// accepted. Deterministic; no sampling involved.
double evaluate_validation(const Rbm& model, const ValidationTask& task);

/// Training-time validation hook: any p_correct-style score of the current
/// model. exact_validator wraps evaluate_validation; sampled_validator (see
/// tasks.hpp) scores by running chains, for models too large to enumerate.
using Validator = std::function<double(const Rbm&)>;
Validator exact_validator(ValidationTask task);

/// A model's intended function expressed over its task fields: `forward`
/// maps the packed input-field bits to the packed output-field bits.
struct FieldTask {
  FieldMap fields;
  std::function<std::uint64_t(std::uint64_t)> forward;

  int input_bits() const;
  int output_bits() const;
};

FieldTask block_field_task(const BlockDef& def);

/// One validation direction: the named fields are left free (they carry the
/// answer), everything else is clamped from a ground-truth row. Free
/// outputs with all inputs clamped is the forward task; free inputs is the
/// reverse task; freeing a single operand gives solve-for-one-field tasks
/// like subtraction or division.
struct ValidationDirection {
  std::vector<std::string> free_fields;
};

/// forward task (all outputs free) + reverse task (all inputs free)
std::vector<ValidationDirection> default_directions(const FieldTask& task);

/// Builds `n_per_direction` instances per direction from ground-truth rows
/// of the task (enumerated when the input space is small, sampled
/// otherwise). An instance is accepted when the decoded free fields are
/// consistent with the clamped ones under the task function.
ValidationTask validation_from_task(const Rbm& model, const FieldTask& task,
                                    const std::vector<ValidationDirection>& directions,
                                    int n_per_direction, std::uint64_t seed);

struct EpochLog {
  int epoch = 0;
  double recon_error = 0;    // mean |v - p(v|h1)| over the epoch
  double val_p_correct = -1; // -1 when not evaluated this epoch
  double lambda = 0;
};

struct TrainResult {
  Rbm model;  // best-validation checkpoint (final model when no validation)
  std::vector<EpochLog> log;
  int best_epoch = -1;
};

/// One CD-k parameter update over a batch: positive statistics from the
/// data, negative statistics from k Gibbs steps seeded at the data, then
/// the optional quantization pull and max-weight clip. Returns the mean
/// one-step reconstruction error.
double cd_update(Rbm& model, const std::vector<Bits>& batch,
                 const TrainConfig& config, double lambda,
                 const QuantGrid* grid, Rng& rng);

/// Shuffled mini-batch CD over `config.epochs` epochs with per-epoch
/// validation; returns the best-validation checkpoint and the log.
/// `resampler` (optional) regenerates sampled datasets between epochs.
TrainResult train(const Rbm& model, const Dataset& data,
                  const TrainConfig& config,
                  const Validator* validation = nullptr,
                  const CircuitFunction* resampler = nullptr);

/// train() plus the L1 quantization pull toward the grid: each update also
/// moves every weight and bias by quant_rate * lambda toward its quantized
/// value (never past it; sign(0) = 0 leaves grid points fixed), with lambda
/// following the schedule.
TrainResult quant_aware_retrain(const Rbm& model, const Dataset& data,
                                const TrainConfig& config,
                                const QuantGrid& grid,
                                const Validator* validation = nullptr);

/// Fresh model: zero-mean Gaussian weights (std 0.01), zero biases.
Rbm random_init(int n_visible, int n_hidden,
                const std::vector<std::string>& labels, std::uint64_t seed);

}  // namespace rbmfuse
