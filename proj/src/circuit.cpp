#include "rbmfuse/circuit.hpp"

#include "rbmfuse/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace rbmfuse {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') break;
    tokens.push_back(tok);
  }
  return tokens;
}

std::pair<std::string, std::string> parse_endpoint(const std::string& tok,
                                                   int line_no) {
  auto dot = tok.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == tok.size())
    throw std::invalid_argument("circuit line " + std::to_string(line_no) +
                                ": endpoint '" + tok +
                                "' is not <instance>.<unit>");
  return {tok.substr(0, dot), tok.substr(dot + 1)};
}

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw std::invalid_argument("circuit line " + std::to_string(line_no) +
                              ": " + msg);
}

}  // namespace

CircuitSpec CircuitSpec::parse(const std::string& text) {
  CircuitSpec spec;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const std::string& kw = tokens[0];
    if (kw == "block") {
      if (tokens.size() != 3) fail(line_no, "block wants <instance> <type>");
      spec.blocks.push_back({tokens[1], tokens[2]});
    } else if (kw == "net") {
      if (tokens.size() < 3) fail(line_no, "net wants a name and endpoints");
      Net net;
      net.name = tokens[1];
      for (std::size_t t = 2; t < tokens.size(); ++t)
        net.endpoints.push_back(parse_endpoint(tokens[t], line_no));
      spec.nets.push_back(std::move(net));
    } else if (kw == "const") {
      if (tokens.size() < 4)
        fail(line_no, "const wants a name, a bit and endpoints");
      Const c;
      c.name = tokens[1];
      if (tokens[2] != "0" && tokens[2] != "1")
        fail(line_no, "const bit must be 0 or 1");
      c.bit = tokens[2] == "1" ? 1 : 0;
      for (std::size_t t = 3; t < tokens.size(); ++t)
        c.endpoints.push_back(parse_endpoint(tokens[t], line_no));
      spec.consts.push_back(std::move(c));
    } else if (kw == "input" || kw == "output") {
      if (tokens.size() < 3) fail(line_no, kw + " wants a field name and nets");
      Field f;
      f.name = tokens[1];
      f.is_input = kw == "input";
      f.nets.assign(tokens.begin() + 2, tokens.end());
      spec.fields.push_back(std::move(f));
    } else {
      fail(line_no, "unknown keyword '" + kw + "'");
    }
  }
  return spec;
}

CircuitSpec CircuitSpec::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string CircuitSpec::to_text() const {
  std::ostringstream out;
  for (const auto& b : blocks) out << "block " << b.instance << " " << b.type << "\n";
  for (const auto& n : nets) {
    out << "net " << n.name;
    for (const auto& [inst, unit] : n.endpoints) out << " " << inst << "." << unit;
    out << "\n";
  }
  for (const auto& c : consts) {
    out << "const " << c.name << " " << c.bit;
    for (const auto& [inst, unit] : c.endpoints) out << " " << inst << "." << unit;
    out << "\n";
  }
  for (const auto& f : fields) {
    out << (f.is_input ? "input " : "output ") << f.name;
    for (const auto& n : f.nets) out << " " << n;
    out << "\n";
  }
  return out.str();
}

namespace {

// Shared bookkeeping for compose() and the circuit evaluator.
struct Wiring {
  const CircuitSpec* spec;
  const BlockLibrary* library;
  // (instance, unit) -> net name or const name
  std::map<std::pair<std::string, std::string>, std::string> unit_net;
  std::map<std::pair<std::string, std::string>, int> unit_const;
  std::map<std::string, const LibraryBlock*> instance_block;
};

Wiring check_wiring(const CircuitSpec& spec, const BlockLibrary& library) {
  Wiring w;
  w.spec = &spec;
  w.library = &library;
  if (spec.blocks.empty())
    throw std::invalid_argument("circuit has no blocks");
  std::set<std::string> names;  // instances, nets and consts share a namespace
  for (const auto& b : spec.blocks) {
    auto lib = library.find(b.type);
    if (lib == library.end())
      throw std::invalid_argument("no library model for block type '" +
                                  b.type + "'");
    if (!names.insert(b.instance).second)
      throw std::invalid_argument("duplicate instance '" + b.instance + "'");
    w.instance_block[b.instance] = &lib->second;
  }
  auto check_endpoint = [&](const std::pair<std::string, std::string>& ep,
                            const std::string& owner) {
    auto inst = w.instance_block.find(ep.first);
    if (inst == w.instance_block.end())
      throw std::invalid_argument("net '" + owner +
                                  "' references unknown instance '" +
                                  ep.first + "'");
    if (!inst->second->model.has_label(ep.second))
      throw std::invalid_argument("net '" + owner + "' references unit '" +
                                  ep.first + "." + ep.second +
                                  "' which does not exist");
    if (w.unit_net.count(ep) || w.unit_const.count(ep))
      throw std::invalid_argument("unit '" + ep.first + "." + ep.second +
                                  "' is wired more than once");
  };
  for (const auto& n : spec.nets) {
    if (!names.insert(n.name).second)
      throw std::invalid_argument("duplicate net name '" + n.name + "'");
    for (const auto& ep : n.endpoints) {
      check_endpoint(ep, n.name);
      w.unit_net[ep] = n.name;
    }
  }
  for (const auto& c : spec.consts) {
    if (!names.insert(c.name).second)
      throw std::invalid_argument("duplicate net name '" + c.name + "'");
    for (const auto& ep : c.endpoints) {
      check_endpoint(ep, c.name);
      w.unit_const[ep] = c.bit;
    }
  }
  // fields may list nets or bare <instance>.<unit> labels of unnetted units
  std::set<std::string> net_names;
  for (const auto& n : spec.nets) net_names.insert(n.name);
  for (const auto& f : spec.fields)
    for (const auto& net : f.nets) {
      if (net_names.count(net)) continue;
      auto dot = net.find('.');
      if (dot != std::string::npos) {
        std::pair<std::string, std::string> ep{net.substr(0, dot),
                                               net.substr(dot + 1)};
        auto inst = w.instance_block.find(ep.first);
        if (inst != w.instance_block.end() &&
            inst->second->model.has_label(ep.second) && !w.unit_net.count(ep) &&
            !w.unit_const.count(ep))
          continue;
      }
      throw std::invalid_argument("field '" + f.name +
                                  "' references unknown net '" + net + "'");
    }
  return w;
}

// Library model for one instance with consts tied off and units renamed to
// their net (or "<instance>.<unit>" when internal).
Rbm prepare_instance(const Wiring& w, const CircuitSpec::Block& b) {
  const LibraryBlock& lib = *w.instance_block.at(b.instance);
  Rbm rbm = lib.model;
  auto expected = lib.def.labels();
  if (rbm.visible_labels != expected)
    throw std::invalid_argument("library model for '" + b.type +
                                "' does not match the block's port labels");
  for (const auto& unit : expected) {
    auto c = w.unit_const.find({b.instance, unit});
    if (c != w.unit_const.end()) rbm = tie_visible(rbm, unit, c->second);
  }
  for (auto& label : rbm.visible_labels) {
    auto net = w.unit_net.find({b.instance, label});
    label = net != w.unit_net.end() ? net->second : b.instance + "." + label;
  }
  try {
    rbm.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("instance '" + b.instance +
                                "': inconsistent wiring (" + e.what() + ")");
  }
  return rbm;
}

}  // namespace

ComposedModel compose(const CircuitSpec& spec, const BlockLibrary& library) {
  Wiring w = check_wiring(spec, library);

  Rbm acc = prepare_instance(w, spec.blocks[0]);
  for (std::size_t k = 1; k < spec.blocks.size(); ++k) {
    Rbm next = prepare_instance(w, spec.blocks[k]);
    MergeSpec ms;
    std::set<std::string> acc_labels(acc.visible_labels.begin(),
                                     acc.visible_labels.end());
    for (const auto& label : next.visible_labels)
      if (acc_labels.count(label)) ms.pairs.emplace_back(label, label);
    acc = merge(acc, next, ms);
  }

  ComposedModel out;
  out.rbm = std::move(acc);
  for (const auto& f : spec.fields) {
    FieldSpec fs;
    fs.name = f.name;
    fs.is_input = f.is_input;
    fs.labels = f.nets;
    for (const auto& net : f.nets) out.rbm.label_index(net);
    out.fields.push_back(std::move(fs));
  }
  return out;
}

namespace {

// Functional evaluation: values for every unit of every instance given the
// external input fields. Owns everything it needs so the callable returned
// by circuit_function() outlives its arguments.
struct Evaluator {
  CircuitSpec spec;
  std::map<std::string, BlockDef> instance_def;
  std::map<std::pair<std::string, std::string>, std::string> unit_net;
  std::map<std::pair<std::string, std::string>, int> unit_const;
  int input_bits = 0;
  std::vector<std::string> labels;  // composed model's visible labels

  std::map<std::pair<std::string, std::string>, int> eval(
      std::uint64_t input) const {
    std::set<std::string> net_names;
    for (const auto& n : spec.nets) net_names.insert(n.name);
    std::map<std::string, int> net_value;
    std::map<std::pair<std::string, std::string>, int> unit_value;
    int shift = 0;
    for (const auto& f : spec.fields) {
      if (!f.is_input) continue;
      for (const auto& net : f.nets) {
        int bit = static_cast<int>((input >> shift) & 1u);
        if (net_names.count(net)) {
          net_value[net] = bit;
        } else {
          auto dot = net.find('.');
          unit_value[{net.substr(0, dot), net.substr(dot + 1)}] = bit;
        }
        ++shift;
      }
    }
    auto lookup = [&](const std::string& inst,
                      const std::string& unit) -> int {
      auto key = std::make_pair(inst, unit);
      auto c = unit_const.find(key);
      if (c != unit_const.end()) return c->second;
      auto n = unit_net.find(key);
      if (n != unit_net.end()) {
        auto v = net_value.find(n->second);
        return v == net_value.end() ? -1 : v->second;
      }
      auto u = unit_value.find(key);
      return u == unit_value.end() ? -1 : u->second;
    };

    std::set<std::string> done;
    bool progress = true;
    while (done.size() < spec.blocks.size() && progress) {
      progress = false;
      for (const auto& b : spec.blocks) {
        if (done.count(b.instance)) continue;
        const BlockDef& def = instance_def.at(b.instance);
        std::vector<std::uint64_t> in_vals;
        bool ready = true;
        for (const auto& port : def.ports) {
          if (!port.is_input) continue;
          std::uint64_t val = 0;
          for (int bit = 0; bit < port.width; ++bit) {
            std::string unit =
                port.width == 1 ? port.name : port.name + std::to_string(bit);
            int v = lookup(b.instance, unit);
            if (v < 0) {
              ready = false;
              break;
            }
            val |= static_cast<std::uint64_t>(v) << bit;
          }
          if (!ready) break;
          in_vals.push_back(val);
        }
        if (!ready) continue;
        std::vector<std::uint64_t> out_vals = def.eval(in_vals);
        std::size_t oi = 0;
        for (const auto& port : def.ports) {
          if (port.is_input) continue;
          std::uint64_t val = out_vals[oi++];
          for (int bit = 0; bit < port.width; ++bit) {
            std::string unit =
                port.width == 1 ? port.name : port.name + std::to_string(bit);
            int v = static_cast<int>((val >> bit) & 1u);
            auto key = std::make_pair(b.instance, unit);
            unit_value[key] = v;
            auto n = unit_net.find(key);
            if (n != unit_net.end()) {
              auto existing = net_value.find(n->second);
              if (existing != net_value.end() && existing->second != v)
                throw std::invalid_argument("net '" + n->second +
                                            "' is driven inconsistently");
              net_value[n->second] = v;
            }
            auto c = unit_const.find(key);
            if (c != unit_const.end() && c->second != v)
              throw std::invalid_argument(
                  "const '" + std::to_string(c->second) + "' on unit '" +
                  b.instance + "." + unit + "' contradicts the circuit");
          }
        }
        done.insert(b.instance);
        progress = true;
      }
    }
    if (done.size() < spec.blocks.size())
      throw std::invalid_argument(
          "circuit is underdetermined: some blocks never receive all inputs");

    // fold net and const values back onto every endpoint unit
    for (const auto& [key, net] : unit_net) unit_value[key] = net_value.at(net);
    for (const auto& [key, bit] : unit_const) unit_value[key] = bit;
    return unit_value;
  }

  Bits row(std::uint64_t input) const {
    auto unit_value = eval(input);
    std::map<std::string, int> by_label;
    for (const auto& [key, v] : unit_value) {
      auto n = unit_net.find(key);
      std::string label =
          n != unit_net.end() ? n->second : key.first + "." + key.second;
      by_label[label] = v;
    }
    Bits out;
    out.reserve(labels.size());
    for (const auto& label : labels) {
      auto it = by_label.find(label);
      if (it == by_label.end())
        throw std::logic_error("no value for visible unit '" + label + "'");
      out.push_back(static_cast<std::uint8_t>(it->second));
    }
    return out;
  }
};

Evaluator make_evaluator(const CircuitSpec& spec, const BlockLibrary& library) {
  Wiring w = check_wiring(spec, library);
  Evaluator ev;
  ev.spec = spec;
  for (const auto& b : spec.blocks)
    ev.instance_def[b.instance] = w.instance_block.at(b.instance)->def;
  ev.unit_net = w.unit_net;
  ev.unit_const = w.unit_const;
  for (const auto& f : spec.fields)
    if (f.is_input) ev.input_bits += static_cast<int>(f.nets.size());
  ev.labels = compose(spec, library).rbm.visible_labels;
  return ev;
}

}  // namespace

CircuitFunction circuit_function(const CircuitSpec& spec,
                                 const BlockLibrary& library) {
  auto ev = std::make_shared<Evaluator>(make_evaluator(spec, library));
  CircuitFunction fn;
  fn.name = "circuit";
  fn.input_bits = ev->input_bits;
  fn.visible_bits = static_cast<int>(ev->labels.size());
  fn.row = [ev](std::uint64_t k) { return ev->row(k); };
  return fn;
}

Dataset intermediate_dataset(const CircuitSpec& spec,
                             const BlockLibrary& library,
                             const Dataset& inputs) {
  Evaluator ev = make_evaluator(spec, library);
  Dataset out;
  out.description = "circuit intermediate values (" +
                    std::to_string(inputs.rows.size()) + " inputs)";
  out.rows.reserve(inputs.rows.size());
  for (const auto& row : inputs.rows) {
    detail::check_bits(row, ev.input_bits, "circuit input row");
    std::uint64_t input = 0;
    for (std::size_t b = 0; b < row.size(); ++b)
      input |= static_cast<std::uint64_t>(row[b]) << b;
    out.rows.push_back(ev.row(input));
  }
  return out;
}

BlockLibrary load_block_library(const CircuitSpec& spec,
                                const std::string& dir) {
  BlockLibrary lib;
  for (const auto& b : spec.blocks) {
    if (lib.count(b.type)) continue;
    LibraryBlock entry;
    entry.def = block_def(b.type);
    entry.model = load_model(dir + "/" + b.type + ".rbm").require_rbm();
    lib[b.type] = std::move(entry);
  }
  return lib;
}

}  // namespace rbmfuse
