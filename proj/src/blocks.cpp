#include "rbmfuse/blocks.hpp"

#include <stdexcept>

namespace rbmfuse {

const FieldSpec& find_field(const FieldMap& fields, const std::string& name) {
  for (const auto& f : fields)
    if (f.name == name) return f;
  throw std::invalid_argument("no field named '" + name + "'");
}

std::vector<int> field_indices(const Rbm& model, const FieldSpec& field) {
  std::vector<int> idx;
  idx.reserve(field.labels.size());
  for (const auto& l : field.labels) idx.push_back(model.label_index(l));
  return idx;
}

int BlockDef::n_visible() const {
  int n = 0;
  for (const auto& p : ports) n += p.width;
  return n;
}

int BlockDef::input_bits() const {
  int n = 0;
  for (const auto& p : ports)
    if (p.is_input) n += p.width;
  return n;
}

std::vector<std::string> BlockDef::labels() const {
  std::vector<std::string> out;
  for (const auto& p : ports) {
    if (p.width == 1) {
      out.push_back(p.name);
    } else {
      for (int i = 0; i < p.width; ++i)
        out.push_back(p.name + std::to_string(i));
    }
  }
  return out;
}

FieldMap BlockDef::fields() const {
  FieldMap fm;
  for (const auto& p : ports) {
    FieldSpec f;
    f.name = p.name;
    f.is_input = p.is_input;
    if (p.width == 1) {
      f.labels.push_back(p.name);
    } else {
      for (int i = 0; i < p.width; ++i)
        f.labels.push_back(p.name + std::to_string(i));
    }
    fm.push_back(std::move(f));
  }
  return fm;
}

const Port& BlockDef::port(const std::string& port_name) const {
  for (const auto& p : ports)
    if (p.name == port_name) return p;
  throw std::invalid_argument("block '" + name + "' has no port '" +
                              port_name + "'");
}

Bits BlockDef::expand(std::uint64_t input) const {
  std::vector<std::uint64_t> in_vals;
  int shift = 0;
  for (const auto& p : ports) {
    if (!p.is_input) continue;
    in_vals.push_back((input >> shift) & ((1ull << p.width) - 1));
    shift += p.width;
  }
  std::vector<std::uint64_t> out_vals = eval(in_vals);

  Bits row;
  row.reserve(n_visible());
  std::size_t ii = 0, oi = 0;
  for (const auto& p : ports) {
    std::uint64_t val = p.is_input ? in_vals[ii++] : out_vals[oi++];
    for (int b = 0; b < p.width; ++b)
      row.push_back(static_cast<std::uint8_t>((val >> b) & 1u));
  }
  return row;
}

CircuitFunction BlockDef::function() const {
  CircuitFunction fn;
  fn.name = name;
  fn.input_bits = input_bits();
  fn.visible_bits = n_visible();
  BlockDef copy = *this;
  fn.row = [copy](std::uint64_t k) { return copy.expand(k); };
  return fn;
}

BlockDef adder_block(int operand_bits) {
  BlockDef d;
  d.name = "add" + std::to_string(operand_bits);
  d.ports = {{"a", operand_bits, true},
             {"b", operand_bits, true},
             {"cin", 1, true},
             {"s", operand_bits + 1, false}};
  d.eval = [](const std::vector<std::uint64_t>& in) {
    return std::vector<std::uint64_t>{in[0] + in[1] + in[2]};
  };
  switch (operand_bits) {
    case 2: d.default_hidden = 28; break;   // sizes that worked in practice
    case 4: d.default_hidden = 64; break;
    case 6: d.default_hidden = 96; break;
    default: d.default_hidden = 16 * operand_bits;
  }
  return d;
}

BlockDef multiplier_block(int product_bits) {
  if (product_bits % 2 != 0)
    throw std::invalid_argument("multiplier product width must be even");
  const int k = product_bits / 2;
  BlockDef d;
  d.name = "mul" + std::to_string(product_bits);
  d.ports = {{"a", k, true}, {"b", k, true}, {"p", product_bits, false}};
  d.eval = [](const std::vector<std::uint64_t>& in) {
    return std::vector<std::uint64_t>{in[0] * in[1]};
  };
  d.default_hidden = product_bits == 4 ? 16 : 4 * product_bits;
  return d;
}

namespace {

BlockDef gate1(const std::string& name, std::function<int(int)> f,
               int hidden) {
  BlockDef d;
  d.name = name;
  d.ports = {{"a", 1, true}, {"y", 1, false}};
  d.eval = [f](const std::vector<std::uint64_t>& in) {
    return std::vector<std::uint64_t>{
        static_cast<std::uint64_t>(f(static_cast<int>(in[0])))};
  };
  d.default_hidden = hidden;
  return d;
}

BlockDef gate2(const std::string& name, std::function<int(int, int)> f,
               int hidden) {
  BlockDef d;
  d.name = name;
  d.ports = {{"a", 1, true}, {"b", 1, true}, {"y", 1, false}};
  d.eval = [f](const std::vector<std::uint64_t>& in) {
    return std::vector<std::uint64_t>{static_cast<std::uint64_t>(
        f(static_cast<int>(in[0]), static_cast<int>(in[1])))};
  };
  d.default_hidden = hidden;
  return d;
}

std::vector<BlockDef> make_standard() {
  std::vector<BlockDef> lib;
  lib.push_back(gate1("not1", [](int a) { return a ^ 1; }, 2));
  lib.push_back(gate2("and2", [](int a, int b) { return a & b; }, 4));
  lib.push_back(gate2("or2", [](int a, int b) { return a | b; }, 4));
  lib.push_back(gate2("xor2", [](int a, int b) { return a ^ b; }, 12));

  BlockDef hadd;
  hadd.name = "hadd";
  hadd.ports = {{"a", 1, true}, {"b", 1, true}, {"s", 1, false}, {"c", 1, false}};
  hadd.eval = [](const std::vector<std::uint64_t>& in) {
    return std::vector<std::uint64_t>{in[0] ^ in[1], in[0] & in[1]};
  };
  hadd.default_hidden = 8;
  lib.push_back(hadd);

  // full adder, the "1 bit adder": 5 visible / 6 hidden
  BlockDef fadd;
  fadd.name = "fadd";
  fadd.ports = {{"a", 1, true}, {"b", 1, true}, {"cin", 1, true},
                {"s", 1, false}, {"cout", 1, false}};
  fadd.eval = [](const std::vector<std::uint64_t>& in) {
    std::uint64_t t = in[0] + in[1] + in[2];
    return std::vector<std::uint64_t>{t & 1u, t >> 1};
  };
  fadd.default_hidden = 6;
  lib.push_back(fadd);

  lib.push_back(adder_block(2));
  lib.push_back(adder_block(4));
  lib.push_back(adder_block(6));
  lib.push_back(multiplier_block(2));
  lib.push_back(multiplier_block(4));
  return lib;
}

}  // namespace

const std::vector<BlockDef>& standard_blocks() {
  static const std::vector<BlockDef> lib = make_standard();
  return lib;
}

const BlockDef& block_def(const std::string& name) {
  for (const auto& d : standard_blocks())
    if (d.name == name) return d;
  throw std::invalid_argument("unknown block type '" + name + "'");
}

bool has_block_def(const std::string& name) {
  for (const auto& d : standard_blocks())
    if (d.name == name) return true;
  return false;
}

}  // namespace rbmfuse
