#pragma once

#include "rbmfuse/blocks.hpp"
#include "rbmfuse/circuit.hpp"
#include "rbmfuse/sampler.hpp"
#include "rbmfuse/train.hpp"

#include <optional>
#include <unordered_map>

namespace rbmfuse {

enum class TaskKind { multiply, divide, factor, sat };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& s);

struct SatClause {
  int lits[3] = {0, 0, 0};  // 1-based variable ids, negative = negated
};

/// One problem posed to a model by clamping. Arithmetic kinds use the a/b/p
/// fields (operand widths and the values to pin); sat uses clauses over
/// n_vars variables with the circuit output pinned true.
struct TaskInstance {
  TaskKind kind = TaskKind::factor;
  int width_a = 0, width_b = 0, width_p = 0;
  std::uint64_t a = 0, b = 0, p = 0;
  int n_vars = 0;
  std::vector<SatClause> clauses;
  std::optional<std::vector<std::uint64_t>> expected;  // packed answer keys

  void validate() const;
};

/// A task lowered onto a concrete model: the clamps to apply, the visible
/// units carrying the answer (little-endian key order) and the answer
/// predicate. `expected` lists every correct key when enumerable.
struct EncodedTask {
  ClampPattern clamps;
  std::vector<int> answer_bits;
  std::vector<std::pair<std::string, int>> answer_fields;  // (name, width)
  std::function<bool(std::uint64_t)> accept;
  std::optional<std::vector<std::uint64_t>> expected;

  std::uint64_t key_of(const Bits& visible) const;
  std::uint64_t field_value(const std::string& name, std::uint64_t key) const;
};

/// Lowers an instance onto a model's field map: multiply pins both factors,
/// divide pins the product and one factor, factor pins the product only,
/// sat pins the circuit output to 1. Throws on width mismatches or values
/// that do not fit their field.
EncodedTask encode(const TaskInstance& instance, const FieldMap& fields,
                   const Rbm& model);

/// Histogram over decoded answer keys plus per-run trace summaries.
struct RunStats {
  struct Cell {
    std::uint64_t count = 0;
    double free_energy = 0;  // of the first full sample seen with this key
  };
  std::unordered_map<std::uint64_t, Cell> histogram;
  std::uint64_t total = 0;
  std::optional<std::uint64_t> first_hit;  // 0-based sample index
  std::uint64_t running_mode = 0;
  std::uint64_t last_mode_change = 0;  // sample index of the last change
};

/// Streams samples into RunStats. The free energy of each key's first full
/// sample is recorded when a model is supplied (used to break decode ties);
/// the hit predicate, when set, fills first_hit. The running mode switches
/// only when another key's count strictly exceeds it, which makes the
/// last_mode_change index a mode-stabilization proxy.
class StatsAccumulator {
 public:
  StatsAccumulator(std::vector<int> answer_bits, const Rbm* fe_model = nullptr,
                   std::function<bool(std::uint64_t)> hit = nullptr);

  void add(const Bits& visible);
  const RunStats& stats() const { return stats_; }
  std::uint64_t key_of(const Bits& visible) const;

 private:
  std::vector<int> answer_bits_;
  const Rbm* fe_model_;
  std::function<bool(std::uint64_t)> hit_;
  RunStats stats_;
  std::uint64_t best_count_ = 0;
};

/// Histogram argmax; ties broken by lowest recorded free energy, then by
/// lowest key. Throws when the histogram is empty.
std::uint64_t decode_mode(const RunStats& stats);

struct PCorrectPoint {
  std::uint64_t samples = 0;
  double value = 0;
  int n_runs = 0;
};

/// Fraction of instance runs whose decoded mode is accepted, measured at
/// each sample count (cumulative within one chain per instance). `discard`
/// drops that many leading samples from every chain before counting.
/// Instance k runs with seed seed_base + k.
std::vector<PCorrectPoint> p_correct_curve(
    const SamplerFactory& factory, const std::vector<EncodedTask>& tasks,
    const std::vector<std::uint64_t>& sample_counts, std::uint64_t seed_base,
    const Rbm* fe_model = nullptr, std::uint64_t discard = 0);

/// Index of the first sample satisfying the predicate, or nullopt.
std::optional<std::uint64_t> hitting_time(
    VisibleSampler& sampler, const std::function<bool(const Bits&)>& predicate,
    std::uint64_t max_samples);

struct EarlyStopResult {
  std::uint64_t answer_key = 0;
  std::uint64_t samples_used = 0;
  bool verified = false;  // false means the mode fallback was used
};

/// Streams samples and checks each one with the task's (polynomial-time)
/// answer predicate; returns at the first verified answer or falls back to
/// the histogram mode after max_samples. max_samples must be >= 1.
EarlyStopResult verify_early_stop(VisibleSampler& sampler,
                                  const EncodedTask& task,
                                  std::uint64_t max_samples,
                                  const Rbm* fe_model = nullptr);

/// Distinct products representable in width_p with at least one factor pair
/// where both factors are >= 2 and fit the operand widths (ascending).
std::vector<std::uint64_t> composite_products(int width_a, int width_b,
                                              int width_p);

/// Uniform draws over composite_products; excludes 0 and 1 by construction.
std::vector<TaskInstance> random_factor_instances(int width_a, int width_b,
                                                  int width_p, int count,
                                                  std::uint64_t seed);
std::vector<TaskInstance> random_multiply_instances(int width_a, int width_b,
                                                    int width_p, int count,
                                                    std::uint64_t seed);
std::vector<TaskInstance> random_divide_instances(int width_a, int width_b,
                                                  int width_p, int count,
                                                  std::uint64_t seed);

/// Plain-text instance files, one instance per line:
///   multiply wa=2 wb=2 wp=4 a=3 b=2 [expect=6]
///   divide   wa=2 wb=2 wp=4 p=6 a=2 [expect=3]
///   factor   wa=2 wb=2 wp=4 p=9 [expect=3:3,...]
///   sat      vars=3 clauses=1,-2,3;2,3,-1
std::vector<TaskInstance> parse_instances(const std::string& text);
std::vector<TaskInstance> load_instances(const std::string& path);
std::string instances_to_text(const std::vector<TaskInstance>& instances);

/// Validation by sampling, for models too large to enumerate: each
/// instance runs a float-engine chain for n_samples and is scored by
/// whether the decoded mode is accepted.
Validator sampled_validator(ValidationTask task, std::uint64_t n_samples,
                            std::uint64_t seed, std::uint64_t discard = 0);

/// Gate-level circuit for a 3SAT instance: variables become input nets
/// x1..xn, each clause an OR tree (with NOT blocks on negated literals) and
/// the clause outputs feed an AND tree whose root is the "sat" output
/// field. Repeated literals are deduplicated; tautological clauses are
/// rejected.
CircuitSpec sat_to_circuit(const TaskInstance& instance);
bool sat_satisfied(const TaskInstance& instance, std::uint64_t assignment);

}  // namespace rbmfuse
