#include "rbmfuse/train.hpp"

#include "rbmfuse/distribution.hpp"

#include <algorithm>
#include <cmath>

namespace rbmfuse {

double LambdaSchedule::at(int epoch) const {
  double lambda = 0.0;
  for (const auto& [e, l] : points) {
    if (e > epoch) break;
    lambda = l;
  }
  return lambda;
}

void LambdaSchedule::validate() const {
  int last_epoch = std::numeric_limits<int>::min();
  double last_lambda = 0.0;
  for (const auto& [e, l] : points) {
    if (e <= last_epoch)
      throw std::invalid_argument("lambda schedule epochs must increase");
    if (l < last_lambda)
      throw std::invalid_argument("lambda schedule must be non-decreasing");
    last_epoch = e;
    last_lambda = l;
  }
}

LambdaSchedule LambdaSchedule::geometric_ramp(int epochs, double lambda_max,
                                              int steps) {
  LambdaSchedule s;
  if (epochs <= 0 || lambda_max <= 0) return s;
  steps = std::max(2, std::min(steps, epochs));
  const int start = epochs - epochs / 3;
  const double lambda_start = lambda_max / 100.0;
  const double ratio =
      std::pow(lambda_max / lambda_start, 1.0 / (steps - 1));
  for (int k = 0; k < steps; ++k) {
    int epoch = start + static_cast<int>((epochs - 1 - start) *
                                         static_cast<double>(k) / (steps - 1));
    double lambda = lambda_start * std::pow(ratio, k);
    if (!s.points.empty() && s.points.back().first == epoch)
      s.points.back().second = lambda;
    else
      s.points.emplace_back(epoch, lambda);
  }
  s.points.back().second = lambda_max;
  s.validate();
  return s;
}

double evaluate_validation(const Rbm& model, const ValidationTask& task) {
  if (task.instances.empty())
    throw std::invalid_argument("validation task has no instances");
  int correct = 0;
  for (const auto& inst : task.instances) {
    std::uint64_t mode = exact_answer_mode(model, inst.clamps, inst.answer_bits);
    if (inst.accept(mode)) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(task.instances.size());
}

Validator exact_validator(ValidationTask task) {
  return [task = std::move(task)](const Rbm& model) {
    return evaluate_validation(model, task);
  };
}

int FieldTask::input_bits() const {
  int n = 0;
  for (const auto& f : fields)
    if (f.is_input) n += f.width();
  return n;
}

int FieldTask::output_bits() const {
  int n = 0;
  for (const auto& f : fields)
    if (!f.is_input) n += f.width();
  return n;
}

FieldTask block_field_task(const BlockDef& def) {
  FieldTask task;
  task.fields = def.fields();
  BlockDef copy = def;
  task.forward = [copy](std::uint64_t input) {
    std::vector<std::uint64_t> in_vals;
    int shift = 0;
    for (const auto& p : copy.ports) {
      if (!p.is_input) continue;
      in_vals.push_back((input >> shift) & ((1ull << p.width) - 1));
      shift += p.width;
    }
    auto out_vals = copy.eval(in_vals);
    std::uint64_t out = 0;
    int out_shift = 0;
    std::size_t oi = 0;
    for (const auto& p : copy.ports) {
      if (p.is_input) continue;
      out |= out_vals[oi++] << out_shift;
      out_shift += p.width;
    }
    return out;
  };
  return task;
}

namespace {

std::vector<int> group_indices(const Rbm& model, const FieldMap& fields,
                               bool inputs) {
  std::vector<int> idx;
  for (const auto& f : fields) {
    if (f.is_input != inputs) continue;
    for (const auto& label : f.labels) idx.push_back(model.label_index(label));
  }
  return idx;
}

void clamp_group(ClampPattern& clamps, const std::vector<int>& idx,
                 std::uint64_t value) {
  for (std::size_t b = 0; b < idx.size(); ++b)
    clamps.pin(idx[b], static_cast<int>((value >> b) & 1u));
}

}  // namespace

std::vector<ValidationDirection> default_directions(const FieldTask& task) {
  ValidationDirection fwd, rev;
  for (const auto& f : task.fields)
    (f.is_input ? rev : fwd).free_fields.push_back(f.name);
  return {fwd, rev};
}

ValidationTask validation_from_task(
    const Rbm& model, const FieldTask& task,
    const std::vector<ValidationDirection>& directions, int n_per_direction,
    std::uint64_t seed) {
  const int ib = task.input_bits();
  if (static_cast<int>(group_indices(model, task.fields, true).size()) != ib)
    throw std::invalid_argument("field task does not match model labels");
  const std::uint64_t space = 1ull << ib;
  Rng rng(seed);
  auto pick_inputs = [&](int count) {
    std::vector<std::uint64_t> xs;
    if (space <= static_cast<std::uint64_t>(count)) {
      for (std::uint64_t x = 0; x < space; ++x) xs.push_back(x);
    } else {
      for (int k = 0; k < count; ++k) xs.push_back(rng.word() % space);
    }
    return xs;
  };

  // bit layout of every field within the packed input / output words
  std::map<std::string, std::pair<int, int>> shift_of;  // name -> (shift, width)
  int in_shift = 0, out_shift = 0;
  for (const auto& f : task.fields) {
    int& shift = f.is_input ? in_shift : out_shift;
    shift_of[f.name] = {shift, f.width()};
    shift += f.width();
  }

  ValidationTask out;
  for (const auto& dir : directions) {
    if (dir.free_fields.empty())
      throw std::invalid_argument("validation direction frees no fields");
    for (auto x : pick_inputs(n_per_direction)) {
      const std::uint64_t y = task.forward(x);
      ValidationInstance inst;
      std::vector<std::tuple<bool, int, int, int>> free_layout;  // (is_input, shift, width, key_shift)
      int key_shift = 0;
      for (const auto& f : task.fields) {
        bool is_free = false;
        for (const auto& name : dir.free_fields) is_free |= name == f.name;
        std::vector<int> idx;
        for (const auto& label : f.labels)
          idx.push_back(model.label_index(label));
        const auto [shift, width] = shift_of[f.name];
        if (is_free) {
          for (int b : idx) inst.answer_bits.push_back(b);
          free_layout.emplace_back(f.is_input, shift, width, key_shift);
          key_shift += f.width();
        } else {
          clamp_group(inst.clamps, idx,
                      ((f.is_input ? x : y) >> shift) & ((1ull << f.width()) - 1));
        }
      }
      auto fwd = task.forward;
      inst.accept = [fwd, x, y, free_layout](std::uint64_t key) {
        std::uint64_t xin = x, yout = y;
        for (const auto& [is_input, shift, width, kshift] : free_layout) {
          std::uint64_t mask = ((1ull << width) - 1);
          std::uint64_t value = (key >> kshift) & mask;
          std::uint64_t& word = is_input ? xin : yout;
          word = (word & ~(mask << shift)) | (value << shift);
        }
        return fwd(xin) == yout;
      };
      out.instances.push_back(std::move(inst));
    }
  }
  return out;
}

namespace {

Matrix rows_to_matrix(const std::vector<Bits>& rows, int width) {
  Matrix m(rows.size(), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    detail::check_bits(rows[r], width, "training row");
    for (int c = 0; c < width; ++c) m(static_cast<int>(r), c) = rows[r][c];
  }
  return m;
}

void sigmoid_inplace(Matrix& m) {
  m = m.unaryExpr([](double x) { return sigmoid(x); });
}

void bernoulli_inplace(Matrix& m, Rng& rng) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = rng.coin(m(r, c)) ? 1.0 : 0.0;
}

void clip_inplace(Rbm& model, double max_weight) {
  auto clip = [max_weight](double x) {
    return std::clamp(x, -max_weight, max_weight);
  };
  model.weights = model.weights.unaryExpr(clip);
  model.visible_bias = model.visible_bias.unaryExpr(clip);
  model.hidden_bias = model.hidden_bias.unaryExpr(clip);
}

// Moves x toward its grid point by at most `rate`, never past it.
double pull_to_grid(double x, double rate, const QuantGrid& grid) {
  double d = x - quantize_value(x, grid);
  if (d == 0.0) return x;  // sign(0) = 0
  double step = std::min(rate, std::abs(d));
  return x - (d > 0 ? step : -step);
}

void quant_pull_inplace(Rbm& model, double rate, const QuantGrid& grid) {
  auto pull = [&](double x) { return pull_to_grid(x, rate, grid); };
  model.weights = model.weights.unaryExpr(pull);
  model.visible_bias = model.visible_bias.unaryExpr(pull);
  model.hidden_bias = model.hidden_bias.unaryExpr(pull);
}

}  // namespace

double cd_update(Rbm& model, const std::vector<Bits>& batch,
                 const TrainConfig& config, double lambda,
                 const QuantGrid* grid, Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  if (config.cd_k < 1) throw std::invalid_argument("cd_k must be >= 1");
  const int n = model.n_visible(), r = model.n_hidden();
  const auto batch_size = static_cast<double>(batch.size());

  Matrix v0 = rows_to_matrix(batch, n);
  Matrix pos_h = (v0 * model.weights).rowwise() + model.hidden_bias.transpose();
  sigmoid_inplace(pos_h);

  Matrix h_s = pos_h;
  bernoulli_inplace(h_s, rng);
  Matrix v_s(v0.rows(), n), h_prob(v0.rows(), r);
  double recon = 0.0;
  for (int t = 0; t < config.cd_k; ++t) {
    Matrix v_prob =
        (h_s * model.weights.transpose()).rowwise() + model.visible_bias.transpose();
    sigmoid_inplace(v_prob);
    if (t == 0) recon = (v0 - v_prob).cwiseAbs().mean();
    v_s = v_prob;
    bernoulli_inplace(v_s, rng);
    h_prob = (v_s * model.weights).rowwise() + model.hidden_bias.transpose();
    sigmoid_inplace(h_prob);
    if (t + 1 < config.cd_k) {
      h_s = h_prob;
      bernoulli_inplace(h_s, rng);
    }
  }

  const double eps = config.learning_rate;
  if (eps != 0.0) {
    model.weights += (eps / batch_size) *
                     (v0.transpose() * pos_h - v_s.transpose() * h_prob);
    model.visible_bias += (eps / batch_size) *
                          (v0 - v_s).colwise().sum().transpose();
    model.hidden_bias += (eps / batch_size) *
                         (pos_h - h_prob).colwise().sum().transpose();
  }
  if (lambda > 0.0 && grid != nullptr)
    quant_pull_inplace(model, config.effective_quant_rate() * lambda, *grid);
  if (config.max_weight) clip_inplace(model, *config.max_weight);
  return recon;
}

namespace {

TrainResult train_impl(Rbm model, Dataset data, const TrainConfig& config,
                       const QuantGrid* grid, const Validator* validation,
                       const CircuitFunction* resampler) {
  model.validate();
  config.lambda_schedule.validate();
  if (config.learning_rate < 0)
    throw std::invalid_argument("learning rate must be >= 0");
  if (config.batch_size < 1)
    throw std::invalid_argument("batch size must be >= 1");

  TrainResult result;
  result.model = model;
  if (config.epochs <= 0) return result;
  if (data.empty()) throw std::invalid_argument("empty dataset");

  Rng rng(config.seed);
  double best_val = -1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (resampler && config.resample_per_epoch && epoch > 0)
      data = generate_truth_table(*resampler, data.rows.size(), rng.word());

    std::vector<std::size_t> order(data.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.word() % i]);

    const double lambda = config.lambda_schedule.at(epoch);
    double recon_sum = 0.0;
    int n_batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      std::vector<Bits> batch;
      for (std::size_t k = start;
           k < std::min(order.size(), start + config.batch_size); ++k)
        batch.push_back(data.rows[order[k]]);
      recon_sum += cd_update(model, batch, config, lambda, grid, rng);
      ++n_batches;
    }

    EpochLog log;
    log.epoch = epoch;
    log.recon_error = recon_sum / std::max(1, n_batches);
    log.lambda = lambda;
    const bool last = epoch + 1 == config.epochs;
    if (validation &&
        (epoch % std::max(1, config.validation_interval) == 0 || last)) {
      log.val_p_correct = (*validation)(model);
      if (log.val_p_correct > best_val) {
        best_val = log.val_p_correct;
        result.model = model;
        result.best_epoch = epoch;
      }
    }
    result.log.push_back(log);
  }
  if (!validation) {
    result.model = std::move(model);
    result.best_epoch = config.epochs - 1;
  }
  return result;
}

}  // namespace

TrainResult train(const Rbm& model, const Dataset& data,
                  const TrainConfig& config, const Validator* validation,
                  const CircuitFunction* resampler) {
  return train_impl(model, data, config, nullptr, validation, resampler);
}

TrainResult quant_aware_retrain(const Rbm& model, const Dataset& data,
                                const TrainConfig& config,
                                const QuantGrid& grid,
                                const Validator* validation) {
  if (config.lambda_schedule.empty())
    throw std::invalid_argument(
        "quantization-aware retraining needs a lambda schedule");
  grid.validate();
  return train_impl(model, data, config, &grid, validation, nullptr);
}

Rbm random_init(int n_visible, int n_hidden,
                const std::vector<std::string>& labels, std::uint64_t seed) {
  Rbm m = Rbm::zeros(n_visible, n_hidden);
  if (!labels.empty()) {
    if (static_cast<int>(labels.size()) != n_visible)
      throw std::invalid_argument("label count must match n_visible");
    m.visible_labels = labels;
  }
  Rng rng(seed);
  // Box-Muller keeps initialization reproducible across platforms
  auto gauss = [&rng]() {
    double u1 = rng.uniform(), u2 = rng.uniform();
    u1 = std::max(u1, 1e-300);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };
  for (int i = 0; i < n_visible; ++i)
    for (int j = 0; j < n_hidden; ++j) m.weights(i, j) = 0.01 * gauss();
  return m;
}

}  // namespace rbmfuse
