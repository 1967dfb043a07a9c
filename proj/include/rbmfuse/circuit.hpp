#pragma once

#include "rbmfuse/blocks.hpp"
#include "rbmfuse/merge.hpp"

#include <map>

namespace rbmfuse {

/// Declarative netlist over a block library. Text form:
///
///   block <instance> <type>
///   net   <name> <instance>.<unit> [<instance>.<unit> ...]
///   const <name> <0|1> <instance>.<unit> [...]
///   input <field> <net> [...]
///   output <field> <net> [...]
///
/// '#' starts a comment. Net names become visible labels of the composed
/// model; unnetted units keep "<instance>.<unit>". Units wired to a const
/// are pinned to that bit and eliminated from the model (exact, by the
/// clamping algebra). input/output fields list nets (or bare
/// <instance>.<unit> labels of unnetted units) bit 0 first.
struct CircuitSpec {
  struct Block {
    std::string instance;
    std::string type;
  };
  struct Net {
    std::string name;
    std::vector<std::pair<std::string, std::string>> endpoints;  // (instance, unit)
  };
  struct Const {
    std::string name;
    int bit = 0;
    std::vector<std::pair<std::string, std::string>> endpoints;
  };
  struct Field {
    std::string name;
    bool is_input = false;
    std::vector<std::string> nets;
  };

  std::vector<Block> blocks;
  std::vector<Net> nets;
  std::vector<Const> consts;
  std::vector<Field> fields;

  static CircuitSpec parse(const std::string& text);
  static CircuitSpec parse_file(const std::string& path);
  std::string to_text() const;
};

struct LibraryBlock {
  BlockDef def;
  Rbm model;
};
/// Block type name -> definition and trained fixture model.
using BlockLibrary = std::map<std::string, LibraryBlock>;

struct ComposedModel {
  Rbm rbm;
  FieldMap fields;
};

/// Folds pairwise merges over the netlist (blocks in declaration order;
/// since merged energies add exactly, the order affects labels only),
/// applying const ties per block first. Throws on dangling nets, label
/// clashes, or nets that join two units of one block.
ComposedModel compose(const CircuitSpec& spec, const BlockLibrary& library);

/// Ground-truth function of the whole circuit: expands an assignment of the
/// external input fields into a full visible row of the composed model by
/// propagating values block to block.
CircuitFunction circuit_function(const CircuitSpec& spec,
                                 const BlockLibrary& library);

/// Propagates each input row through the circuit, recording every internal
/// net, and emits full visible rows for the merged model. Rows are in input
/// order; input bits are little-endian across the declared input fields.
Dataset intermediate_dataset(const CircuitSpec& spec,
                             const BlockLibrary& library,
                             const Dataset& inputs);

/// Loads the fixture models for every block type a circuit uses from
/// "<dir>/<type>.rbm".
BlockLibrary load_block_library(const CircuitSpec& spec,
                                const std::string& dir);

}  // namespace rbmfuse
