#include "rbmfuse/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace rbmfuse {

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::multiply: return "multiply";
    case TaskKind::divide: return "divide";
    case TaskKind::factor: return "factor";
    case TaskKind::sat: return "sat";
  }
  throw std::logic_error("bad task kind");
}

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "multiply") return TaskKind::multiply;
  if (s == "divide") return TaskKind::divide;
  if (s == "factor") return TaskKind::factor;
  if (s == "sat") return TaskKind::sat;
  throw std::invalid_argument("unknown task kind '" + s + "'");
}

namespace {

void check_fits(std::uint64_t value, int width, const char* what) {
  if (width < 1 || width > 62)
    throw std::invalid_argument(std::string(what) + ": bad field width");
  if (value >> width)
    throw std::invalid_argument(std::string(what) + " value " +
                                std::to_string(value) + " exceeds " +
                                std::to_string(width) + " bits");
}

}  // namespace

void TaskInstance::validate() const {
  if (kind == TaskKind::sat) {
    if (n_vars < 1 || n_vars > 62)
      throw std::invalid_argument("sat instance needs 1..62 variables");
    if (clauses.empty())
      throw std::invalid_argument("sat instance has no clauses");
    for (const auto& c : clauses)
      for (int lit : c.lits) {
        int var = std::abs(lit);
        if (var < 1 || var > n_vars)
          throw std::invalid_argument("sat literal out of range");
      }
    return;
  }
  check_fits(0, width_a, "operand a");
  check_fits(0, width_b, "operand b");
  check_fits(0, width_p, "product");
  switch (kind) {
    case TaskKind::multiply:
      check_fits(a, width_a, "operand a");
      check_fits(b, width_b, "operand b");
      check_fits(a * b, width_p, "product");
      break;
    case TaskKind::divide:
      check_fits(p, width_p, "product");
      check_fits(a, width_a, "operand a");
      break;
    case TaskKind::factor:
      check_fits(p, width_p, "product");
      break;
    default:
      break;
  }
}

std::uint64_t EncodedTask::key_of(const Bits& visible) const {
  std::uint64_t key = 0;
  for (std::size_t j = 0; j < answer_bits.size(); ++j)
    key |= static_cast<std::uint64_t>(visible[answer_bits[j]] & 1u) << j;
  return key;
}

std::uint64_t EncodedTask::field_value(const std::string& name,
                                       std::uint64_t key) const {
  int shift = 0;
  for (const auto& [fname, width] : answer_fields) {
    if (fname == name) return (key >> shift) & ((1ull << width) - 1);
    shift += width;
  }
  throw std::invalid_argument("no answer field named '" + name + "'");
}

namespace {

const FieldSpec& field_checked(const FieldMap& fields, const std::string& name,
                               int want_width) {
  const FieldSpec& f = find_field(fields, name);
  if (want_width >= 0 && f.width() != want_width)
    throw std::invalid_argument("field '" + name + "' is " +
                                std::to_string(f.width()) +
                                " bits wide, instance wants " +
                                std::to_string(want_width));
  return f;
}

void pin_field(ClampPattern& clamps, const Rbm& model, const FieldSpec& field,
               std::uint64_t value) {
  for (int bit = 0; bit < field.width(); ++bit)
    clamps.pin(model.label_index(field.labels[bit]),
               static_cast<int>((value >> bit) & 1u));
}

void append_answer_field(EncodedTask& task, const Rbm& model,
                         const FieldSpec& field) {
  for (const auto& label : field.labels)
    task.answer_bits.push_back(model.label_index(label));
  task.answer_fields.emplace_back(field.name, field.width());
}

}  // namespace

EncodedTask encode(const TaskInstance& instance, const FieldMap& fields,
                   const Rbm& model) {
  instance.validate();
  EncodedTask task;
  switch (instance.kind) {
    case TaskKind::multiply: {
      const auto& fa = field_checked(fields, "a", instance.width_a);
      const auto& fb = field_checked(fields, "b", instance.width_b);
      const auto& fp = field_checked(fields, "p", instance.width_p);
      pin_field(task.clamps, model, fa, instance.a);
      pin_field(task.clamps, model, fb, instance.b);
      append_answer_field(task, model, fp);
      std::uint64_t want = instance.a * instance.b;
      task.accept = [want](std::uint64_t key) { return key == want; };
      task.expected = std::vector<std::uint64_t>{want};
      break;
    }
    case TaskKind::divide: {
      const auto& fa = field_checked(fields, "a", instance.width_a);
      const auto& fb = field_checked(fields, "b", instance.width_b);
      const auto& fp = field_checked(fields, "p", instance.width_p);
      pin_field(task.clamps, model, fp, instance.p);
      pin_field(task.clamps, model, fa, instance.a);
      append_answer_field(task, model, fb);
      std::uint64_t a = instance.a, p = instance.p;
      task.accept = [a, p](std::uint64_t key) { return a * key == p; };
      std::vector<std::uint64_t> expected;
      for (std::uint64_t bb = 0; bb < (1ull << instance.width_b); ++bb)
        if (a * bb == p) expected.push_back(bb);
      task.expected = std::move(expected);
      break;
    }
    case TaskKind::factor: {
      const auto& fa = field_checked(fields, "a", instance.width_a);
      const auto& fb = field_checked(fields, "b", instance.width_b);
      const auto& fp = field_checked(fields, "p", instance.width_p);
      pin_field(task.clamps, model, fp, instance.p);
      append_answer_field(task, model, fa);
      append_answer_field(task, model, fb);
      const int wa = instance.width_a;
      const std::uint64_t p = instance.p;
      const std::uint64_t mask_a = (1ull << wa) - 1;
      task.accept = [wa, p, mask_a](std::uint64_t key) {
        return (key & mask_a) * (key >> wa) == p;
      };
      std::vector<std::uint64_t> expected;
      for (std::uint64_t aa = 0; aa < (1ull << instance.width_a); ++aa) {
        if (aa == 0) {
          if (p != 0) continue;
          for (std::uint64_t bb = 0; bb < (1ull << instance.width_b); ++bb)
            expected.push_back(aa | (bb << wa));
          continue;
        }
        if (p % aa) continue;
        std::uint64_t bb = p / aa;
        if (bb >> instance.width_b) continue;
        expected.push_back(aa | (bb << wa));
      }
      task.expected = std::move(expected);
      break;
    }
    case TaskKind::sat: {
      const auto& fx = field_checked(fields, "x", instance.n_vars);
      const auto& fs = field_checked(fields, "sat", 1);
      pin_field(task.clamps, model, fs, 1);
      append_answer_field(task, model, fx);
      TaskInstance copy = instance;
      task.accept = [copy](std::uint64_t key) {
        return sat_satisfied(copy, key);
      };
      break;
    }
  }
  if (instance.expected) task.expected = instance.expected;
  return task;
}

StatsAccumulator::StatsAccumulator(std::vector<int> answer_bits,
                                   const Rbm* fe_model,
                                   std::function<bool(std::uint64_t)> hit)
    : answer_bits_(std::move(answer_bits)),
      fe_model_(fe_model),
      hit_(std::move(hit)) {
  if (answer_bits_.empty())
    throw std::invalid_argument("accumulator needs answer bits");
  if (answer_bits_.size() > 62)
    throw std::invalid_argument("more than 62 answer bits");
}

std::uint64_t StatsAccumulator::key_of(const Bits& visible) const {
  std::uint64_t key = 0;
  for (std::size_t j = 0; j < answer_bits_.size(); ++j)
    key |= static_cast<std::uint64_t>(visible[answer_bits_[j]] & 1u) << j;
  return key;
}

void StatsAccumulator::add(const Bits& visible) {
  const std::uint64_t key = key_of(visible);
  auto [it, inserted] = stats_.histogram.try_emplace(key);
  if (inserted && fe_model_) it->second.free_energy = free_energy(*fe_model_, visible);
  ++it->second.count;
  const std::uint64_t index = stats_.total++;
  if (hit_ && !stats_.first_hit && hit_(key)) stats_.first_hit = index;
  if (index == 0 || (key != stats_.running_mode && it->second.count > best_count_)) {
    stats_.running_mode = key;
    stats_.last_mode_change = index;
    best_count_ = it->second.count;
  } else if (key == stats_.running_mode) {
    best_count_ = it->second.count;
  }
}

std::uint64_t decode_mode(const RunStats& stats) {
  if (stats.total == 0)
    throw std::invalid_argument("cannot decode the mode of an empty run");
  bool have = false;
  std::uint64_t best_key = 0;
  RunStats::Cell best{};
  for (const auto& [key, cell] : stats.histogram) {
    bool better = false;
    if (!have || cell.count > best.count) {
      better = true;
    } else if (cell.count == best.count) {
      if (cell.free_energy < best.free_energy) better = true;
      else if (cell.free_energy == best.free_energy && key < best_key) better = true;
    }
    if (better) {
      have = true;
      best_key = key;
      best = cell;
    }
  }
  return best_key;
}

std::vector<PCorrectPoint> p_correct_curve(
    const SamplerFactory& factory, const std::vector<EncodedTask>& tasks,
    const std::vector<std::uint64_t>& sample_counts, std::uint64_t seed_base,
    const Rbm* fe_model, std::uint64_t discard) {
  if (tasks.empty()) throw std::invalid_argument("p_correct needs instances");
  if (sample_counts.empty())
    throw std::invalid_argument("p_correct needs sample counts");
  std::vector<std::uint64_t> counts = sample_counts;
  std::sort(counts.begin(), counts.end());
  std::vector<int> correct(counts.size(), 0);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const EncodedTask& task = tasks[t];
    auto sampler = factory(task.clamps, seed_base + t);
    StatsAccumulator acc(task.answer_bits, fe_model);
    for (std::uint64_t s = 0; s < discard; ++s) sampler->step();
    std::uint64_t taken = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      for (; taken < counts[c]; ++taken) acc.add(sampler->step());
      if (task.accept(decode_mode(acc.stats()))) ++correct[c];
    }
  }
  std::vector<PCorrectPoint> curve;
  for (std::size_t c = 0; c < counts.size(); ++c)
    curve.push_back({counts[c],
                     static_cast<double>(correct[c]) / tasks.size(),
                     static_cast<int>(tasks.size())});
  return curve;
}

std::optional<std::uint64_t> hitting_time(
    VisibleSampler& sampler, const std::function<bool(const Bits&)>& predicate,
    std::uint64_t max_samples) {
  for (std::uint64_t s = 0; s < max_samples; ++s)
    if (predicate(sampler.step())) return s;
  return std::nullopt;
}

EarlyStopResult verify_early_stop(VisibleSampler& sampler,
                                  const EncodedTask& task,
                                  std::uint64_t max_samples,
                                  const Rbm* fe_model) {
  if (max_samples == 0)
    throw std::invalid_argument(
        "verify_early_stop needs at least one sample before the mode "
        "fallback");
  StatsAccumulator acc(task.answer_bits, fe_model);
  for (std::uint64_t s = 0; s < max_samples; ++s) {
    const Bits& v = sampler.step();
    acc.add(v);
    std::uint64_t key = acc.key_of(v);
    if (task.accept(key)) return {key, s + 1, true};
  }
  return {decode_mode(acc.stats()), max_samples, false};
}

Validator sampled_validator(ValidationTask task, std::uint64_t n_samples,
                            std::uint64_t seed, std::uint64_t discard) {
  if (task.instances.empty())
    throw std::invalid_argument("validation task has no instances");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  return [task = std::move(task), n_samples, seed,
          discard](const Rbm& model) {
    int correct = 0;
    for (std::size_t k = 0; k < task.instances.size(); ++k) {
      const auto& inst = task.instances[k];
      GibbsChain chain(model, inst.clamps, seed + k);
      StatsAccumulator acc(inst.answer_bits, &model);
      for (std::uint64_t s = 0; s < discard; ++s) chain.step();
      for (std::uint64_t s = 0; s < n_samples; ++s) acc.add(chain.step());
      if (inst.accept(decode_mode(acc.stats()))) ++correct;
    }
    return static_cast<double>(correct) / task.instances.size();
  };
}

std::vector<std::uint64_t> composite_products(int width_a, int width_b,
                                              int width_p) {
  std::set<std::uint64_t> products;
  for (std::uint64_t a = 2; a < (1ull << width_a); ++a)
    for (std::uint64_t b = 2; b < (1ull << width_b); ++b)
      if (((a * b) >> width_p) == 0) products.insert(a * b);
  return {products.begin(), products.end()};
}

namespace {

TaskInstance arith_instance(TaskKind kind, int wa, int wb, int wp) {
  TaskInstance inst;
  inst.kind = kind;
  inst.width_a = wa;
  inst.width_b = wb;
  inst.width_p = wp;
  return inst;
}

}  // namespace

std::vector<TaskInstance> random_factor_instances(int width_a, int width_b,
                                                  int width_p, int count,
                                                  std::uint64_t seed) {
  auto products = composite_products(width_a, width_b, width_p);
  if (products.empty())
    throw std::invalid_argument("no composite products in range");
  Rng rng(seed);
  std::vector<TaskInstance> out;
  for (int k = 0; k < count; ++k) {
    auto inst = arith_instance(TaskKind::factor, width_a, width_b, width_p);
    inst.p = products[rng.word() % products.size()];
    out.push_back(inst);
  }
  return out;
}

std::vector<TaskInstance> random_multiply_instances(int width_a, int width_b,
                                                    int width_p, int count,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TaskInstance> out;
  for (int k = 0; k < count; ++k) {
    auto inst = arith_instance(TaskKind::multiply, width_a, width_b, width_p);
    do {
      inst.a = rng.word() & ((1ull << width_a) - 1);
      inst.b = rng.word() & ((1ull << width_b) - 1);
    } while ((inst.a * inst.b) >> width_p);
    out.push_back(inst);
  }
  return out;
}

std::vector<TaskInstance> random_divide_instances(int width_a, int width_b,
                                                  int width_p, int count,
                                                  std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TaskInstance> out;
  for (int k = 0; k < count; ++k) {
    auto inst = arith_instance(TaskKind::divide, width_a, width_b, width_p);
    std::uint64_t b = 0;
    do {
      inst.a = 1 + rng.word() % ((1ull << width_a) - 1);
      b = rng.word() & ((1ull << width_b) - 1);
    } while ((inst.a * b) >> width_p);
    inst.p = inst.a * b;
    out.push_back(inst);
  }
  return out;
}

namespace {

std::map<std::string, std::string> parse_kv(
    const std::vector<std::string>& tokens, std::size_t start, int line_no) {
  std::map<std::string, std::string> kv;
  for (std::size_t t = start; t < tokens.size(); ++t) {
    auto eq = tokens[t].find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("instance line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + tokens[t] +
                                  "'");
    kv[tokens[t].substr(0, eq)] = tokens[t].substr(eq + 1);
  }
  return kv;
}

std::uint64_t kv_num(const std::map<std::string, std::string>& kv,
                     const std::string& key, int line_no) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw std::invalid_argument("instance line " + std::to_string(line_no) +
                                ": missing " + key + "=");
  return std::stoull(it->second);
}

}  // namespace

std::vector<TaskInstance> parse_instances(const std::string& text) {
  std::vector<TaskInstance> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      tokens.push_back(tok);
    }
    if (tokens.empty()) continue;
    TaskInstance inst;
    inst.kind = task_kind_from_string(tokens[0]);
    auto kv = parse_kv(tokens, 1, line_no);
    if (inst.kind == TaskKind::sat) {
      inst.n_vars = static_cast<int>(kv_num(kv, "vars", line_no));
      auto it = kv.find("clauses");
      if (it == kv.end())
        throw std::invalid_argument("instance line " +
                                    std::to_string(line_no) +
                                    ": missing clauses=");
      std::istringstream cs(it->second);
      std::string clause;
      while (std::getline(cs, clause, ';')) {
        std::istringstream lits(clause);
        std::string lit;
        SatClause c;
        int n = 0;
        while (std::getline(lits, lit, ',')) {
          if (n >= 3)
            throw std::invalid_argument("instance line " +
                                        std::to_string(line_no) +
                                        ": clauses take 3 literals");
          c.lits[n++] = std::stoi(lit);
        }
        if (n != 3)
          throw std::invalid_argument("instance line " +
                                      std::to_string(line_no) +
                                      ": clauses take 3 literals");
        inst.clauses.push_back(c);
      }
    } else {
      inst.width_a = static_cast<int>(kv_num(kv, "wa", line_no));
      inst.width_b = static_cast<int>(kv_num(kv, "wb", line_no));
      inst.width_p = static_cast<int>(kv_num(kv, "wp", line_no));
      if (inst.kind == TaskKind::multiply) {
        inst.a = kv_num(kv, "a", line_no);
        inst.b = kv_num(kv, "b", line_no);
      } else if (inst.kind == TaskKind::divide) {
        inst.p = kv_num(kv, "p", line_no);
        inst.a = kv_num(kv, "a", line_no);
      } else {
        inst.p = kv_num(kv, "p", line_no);
      }
      auto it = kv.find("expect");
      if (it != kv.end()) {
        std::vector<std::uint64_t> expected;
        std::istringstream es(it->second);
        std::string item;
        while (std::getline(es, item, ',')) {
          auto colon = item.find(':');
          if (inst.kind == TaskKind::factor) {
            if (colon == std::string::npos)
              throw std::invalid_argument("instance line " +
                                          std::to_string(line_no) +
                                          ": factor expects a:b");
            std::uint64_t ea = std::stoull(item.substr(0, colon));
            std::uint64_t eb = std::stoull(item.substr(colon + 1));
            expected.push_back(ea | (eb << inst.width_a));
          } else {
            expected.push_back(std::stoull(item));
          }
        }
        inst.expected = std::move(expected);
      }
    }
    inst.validate();
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TaskInstance> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instances(buf.str());
}

std::string instances_to_text(const std::vector<TaskInstance>& instances) {
  std::ostringstream out;
  for (const auto& inst : instances) {
    out << to_string(inst.kind);
    if (inst.kind == TaskKind::sat) {
      out << " vars=" << inst.n_vars << " clauses=";
      for (std::size_t c = 0; c < inst.clauses.size(); ++c) {
        if (c) out << ";";
        out << inst.clauses[c].lits[0] << "," << inst.clauses[c].lits[1] << ","
            << inst.clauses[c].lits[2];
      }
    } else {
      out << " wa=" << inst.width_a << " wb=" << inst.width_b
          << " wp=" << inst.width_p;
      if (inst.kind == TaskKind::multiply)
        out << " a=" << inst.a << " b=" << inst.b;
      else if (inst.kind == TaskKind::divide)
        out << " p=" << inst.p << " a=" << inst.a;
      else
        out << " p=" << inst.p;
      if (inst.expected) {
        out << " expect=";
        for (std::size_t e = 0; e < inst.expected->size(); ++e) {
          if (e) out << ",";
          std::uint64_t key = (*inst.expected)[e];
          if (inst.kind == TaskKind::factor)
            out << (key & ((1ull << inst.width_a) - 1)) << ":"
                << (key >> inst.width_a);
          else
            out << key;
        }
      }
    }
    out << "\n";
  }
  return out.str();
}

bool sat_satisfied(const TaskInstance& instance, std::uint64_t assignment) {
  for (const auto& c : instance.clauses) {
    bool ok = false;
    for (int lit : c.lits) {
      int var = std::abs(lit) - 1;
      bool value = (assignment >> var) & 1u;
      if ((lit > 0 && value) || (lit < 0 && !value)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

CircuitSpec sat_to_circuit(const TaskInstance& instance) {
  instance.validate();
  if (instance.kind != TaskKind::sat)
    throw std::invalid_argument("not a sat instance");
  CircuitSpec spec;
  for (int v = 1; v <= instance.n_vars; ++v) {
    CircuitSpec::Net net;
    net.name = "x" + std::to_string(v);
    spec.nets.push_back(net);
  }
  auto var_net = [](int var) { return "x" + std::to_string(var); };
  auto endpoint_of = [&spec](const std::string& net_name,
                             const std::string& inst,
                             const std::string& unit) {
    for (auto& n : spec.nets)
      if (n.name == net_name) {
        n.endpoints.emplace_back(inst, unit);
        return;
      }
    CircuitSpec::Net net;
    net.name = net_name;
    net.endpoints.emplace_back(inst, unit);
    spec.nets.push_back(net);
  };

  std::vector<std::string> clause_nets;
  for (std::size_t ci = 0; ci < instance.clauses.size(); ++ci) {
    // dedupe literals; reject tautologies (x or not-x) outright
    std::vector<int> lits;
    std::set<int> seen;
    for (int lit : instance.clauses[ci].lits) {
      if (seen.count(-lit))
        throw std::invalid_argument("clause " + std::to_string(ci + 1) +
                                    " is a tautology");
      if (seen.insert(lit).second) lits.push_back(lit);
    }
    const std::string cname = "c" + std::to_string(ci);
    std::vector<std::string> lit_nets;
    for (std::size_t li = 0; li < lits.size(); ++li) {
      int lit = lits[li];
      if (lit > 0) {
        lit_nets.push_back(var_net(lit));
      } else {
        std::string inv = cname + "_n" + std::to_string(li);
        std::string inst = inv + "_not";
        spec.blocks.push_back({inst, "not1"});
        endpoint_of(var_net(-lit), inst, "a");
        endpoint_of(inv, inst, "y");
        lit_nets.push_back(inv);
      }
    }
    if (lit_nets.size() == 1) {
      // single-literal clause: double-NOT buffer so the clause output is a
      // fresh net, never a variable net
      std::string mid = cname + "_buf";
      spec.blocks.push_back({cname + "_b0", "not1"});
      endpoint_of(lit_nets[0], cname + "_b0", "a");
      endpoint_of(mid, cname + "_b0", "y");
      spec.blocks.push_back({cname + "_b1", "not1"});
      endpoint_of(mid, cname + "_b1", "a");
      endpoint_of(cname, cname + "_b1", "y");
      clause_nets.push_back(cname);
      continue;
    }
    // OR tree over the clause's literals
    std::string acc = lit_nets[0];
    for (std::size_t li = 1; li < lit_nets.size(); ++li) {
      std::string inst = cname + "_or" + std::to_string(li);
      std::string out_net =
          li + 1 == lit_nets.size() ? cname : cname + "_t" + std::to_string(li);
      spec.blocks.push_back({inst, "or2"});
      endpoint_of(acc, inst, "a");
      endpoint_of(lit_nets[li], inst, "b");
      endpoint_of(out_net, inst, "y");
      acc = out_net;
    }
    clause_nets.push_back(acc);
  }

  // AND tree over the clause outputs
  if (clause_nets.size() == 1) {
    for (auto& n : spec.nets)
      if (n.name == clause_nets[0]) n.name = "sat";
  } else {
    std::string acc = clause_nets[0];
    for (std::size_t ci = 1; ci < clause_nets.size(); ++ci) {
      std::string inst = "and" + std::to_string(ci);
      std::string out_net =
          ci + 1 == clause_nets.size() ? "sat" : "a" + std::to_string(ci);
      spec.blocks.push_back({inst, "and2"});
      endpoint_of(acc, inst, "a");
      endpoint_of(clause_nets[ci], inst, "b");
      endpoint_of(out_net, inst, "y");
      acc = out_net;
    }
  }

  for (int v = 1; v <= instance.n_vars; ++v)
    for (const auto& n : spec.nets)
      if (n.name == var_net(v) && n.endpoints.empty())
        throw std::invalid_argument("variable x" + std::to_string(v) +
                                    " does not appear in any clause");

  CircuitSpec::Field x;
  x.name = "x";
  x.is_input = true;
  for (int v = 1; v <= instance.n_vars; ++v) x.nets.push_back(var_net(v));
  spec.fields.push_back(x);
  CircuitSpec::Field satf;
  satf.name = "sat";
  satf.is_input = false;
  satf.nets = {"sat"};
  spec.fields.push_back(satf);
  return spec;
}

}  // namespace rbmfuse
