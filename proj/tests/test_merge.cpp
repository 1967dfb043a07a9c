#include "rbmfuse/circuit.hpp"
#include "rbmfuse/distribution.hpp"
#include "rbmfuse/merge.hpp"

#include "support/test_util.hpp"

#include <doctest.h>

#include <map>

using namespace rbmfuse;
using namespace testutil;

namespace {

Rbm labeled(Rbm m, const std::vector<std::string>& labels) {
  m.visible_labels = labels;
  return m;
}

// Index maps induced by a merge: where each original unit lives in the
// merged model.
struct MergeMaps {
  std::vector<int> a_vis, b_vis;  // original index -> merged index
  int r, s;
};

MergeMaps maps_for(const Rbm& a, const Rbm& b, const MergeSpec& spec,
                   const Rbm& merged) {
  MergeMaps mm;
  mm.r = a.n_hidden();
  mm.s = b.n_hidden();
  std::map<std::string, std::string> b_label_in_merged;
  for (const auto& l : b.visible_labels) b_label_in_merged[l] = l;
  for (const auto& [la, lb] : spec.pairs) b_label_in_merged[lb] = la;
  for (const auto& l : a.visible_labels)
    mm.a_vis.push_back(merged.label_index(l));
  for (const auto& l : b.visible_labels)
    mm.b_vis.push_back(merged.label_index(b_label_in_merged[l]));
  return mm;
}

double part_energy(const Rbm& part, const std::vector<int>& vis_map,
                   int hidden_offset, const Bits& v, const Bits& h) {
  BinaryState s{Bits(part.n_visible()), Bits(part.n_hidden())};
  for (int i = 0; i < part.n_visible(); ++i) s.visible[i] = v[vis_map[i]];
  for (int j = 0; j < part.n_hidden(); ++j) s.hidden[j] = h[hidden_offset + j];
  return energy(part, s);
}

}  // namespace

TEST_CASE("merge builds the block-structured matrix from the hand example") {
  Rbm a = labeled(Rbm::zeros(2, 1), {"x", "y"});
  a.weights << 1, 2;
  a.visible_bias << 0.1, 0.2;
  a.hidden_bias << 0.5;
  Rbm b = labeled(Rbm::zeros(2, 1), {"u", "w"});
  b.weights << 3, 4;
  b.visible_bias << 0.3, 0.4;
  b.hidden_bias << 0.6;

  Rbm m = merge(a, b, {{{"y", "u"}}});
  REQUIRE(m.n_visible() == 3);
  REQUIRE(m.n_hidden() == 2);
  Matrix want(3, 2);
  want << 1, 0, 2, 3, 0, 4;
  CHECK((m.weights - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.visible_bias[0] == doctest::Approx(0.1));
  CHECK(m.visible_bias[1] == doctest::Approx(0.5));  // 0.2 + 0.3
  CHECK(m.visible_bias[2] == doctest::Approx(0.4));
  CHECK(m.hidden_bias[0] == doctest::Approx(0.5));
  CHECK(m.hidden_bias[1] == doctest::Approx(0.6));
  CHECK(m.visible_labels == std::vector<std::string>{"x", "y", "w"});
}

TEST_CASE("merge error paths") {
  Rbm a = labeled(random_model(2, 1, 1), {"x", "y"});
  Rbm b = labeled(random_model(2, 1, 2), {"u", "w"});
  CHECK_THROWS_AS(merge(a, b, {{{"nope", "u"}}}), std::invalid_argument);
  CHECK_THROWS_AS(merge(a, b, {{{"x", "nope"}}}), std::invalid_argument);
  CHECK_THROWS_AS(merge(a, b, {{{"x", "u"}, {"x", "w"}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(merge(a, b, {{{"x", "u"}, {"y", "u"}}}),
                  std::invalid_argument);
  // label collision between unmerged units
  Rbm c = labeled(random_model(2, 1, 3), {"x", "z"});
  CHECK_THROWS_AS(merge(a, c, {{{"y", "z"}}}), std::invalid_argument);
}

TEST_CASE("disjoint merge is the independent product") {
  Rbm a = labeled(random_model(2, 2, 5), {"a0", "a1"});
  Rbm b = labeled(random_model(2, 1, 7), {"b0", "b1"});
  Rbm m = merge(a, b, {});
  REQUIRE(m.n_visible() == 4);
  Distribution da = exact_distribution(a, {});
  Distribution db = exact_distribution(b, {});
  Distribution dm = exact_distribution(m, {});
  for (std::size_t k = 0; k < dm.support.size(); ++k) {
    std::uint64_t v = value_of(dm.support[k]);
    double want = da.probs[v & 3u] * db.probs[v >> 2];
    CHECK(dm.probs[k] == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("energy additivity and probability product on random merges") {
  Rng rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 2 + static_cast<int>(rng.word() % 3);
    int m_ = 2 + static_cast<int>(rng.word() % 3);
    int r = 1 + static_cast<int>(rng.word() % 3);
    int s = 1 + static_cast<int>(rng.word() % 3);
    int d = static_cast<int>(rng.word() % (std::min(n, m_) + 1));
    Rbm a = random_model(n, r, rng.word());
    Rbm b = random_model(m_, s, rng.word());
    for (int i = 0; i < m_; ++i) b.visible_labels[i] = "b" + std::to_string(i);
    MergeSpec spec;
    for (int k = 0; k < d; ++k)
      spec.pairs.emplace_back(a.visible_labels[k], b.visible_labels[k]);

    Rbm merged = merge(a, b, spec);
    CHECK(merged.n_visible() == n + m_ - d);
    CHECK(merged.n_hidden() == r + s);
    MergeMaps mm = maps_for(a, b, spec, merged);

    const int nv = merged.n_visible(), nh = merged.n_hidden();
    double log_prod_sum = 0.0;
    std::vector<double> pm, pq;
    double zq = 0.0;
    for (std::uint64_t v = 0; v < (1ull << nv); ++v) {
      for (std::uint64_t h = 0; h < (1ull << nh); ++h) {
        Bits vb = bits_of(v, nv), hb = bits_of(h, nh);
        double em = energy(merged, {vb, hb});
        double ea = part_energy(a, mm.a_vis, 0, vb, hb);
        double eb = part_energy(b, mm.b_vis, mm.r, vb, hb);
        REQUIRE(std::abs(em - (ea + eb)) <= 1e-12);
        pq.push_back(std::exp(-(ea + eb)));
        zq += pq.back();
        pm.push_back(em);
        log_prod_sum += 0;  // energies already checked
      }
    }
    // normalized product of part probabilities vs the merged joint
    double zm = 0.0;
    for (auto& e : pm) zm += std::exp(-e);
    double tv = 0.0;
    for (std::size_t k = 0; k < pm.size(); ++k)
      tv += std::abs(std::exp(-pm[k]) / zm - pq[k] / zq);
    CHECK(0.5 * tv <= 1e-10);
  }
}

TEST_CASE("merge is symmetric up to relabeling") {
  Rbm a = labeled(random_model(3, 2, 21), {"a0", "a1", "a2"});
  Rbm b = labeled(random_model(2, 2, 23), {"b0", "b1"});
  MergeSpec fwd{{{"a1", "b0"}}};
  MergeSpec rev{{{"b0", "a1"}}};
  Rbm ab = merge(a, b, fwd);
  Rbm ba = merge(b, a, rev);
  Distribution dab = exact_distribution(ab, {});
  Distribution dba = exact_distribution(ba, {});
  // compare under the label correspondence (b0 names the fused unit in ba)
  auto label_of = [](const Rbm& m, int i) { return m.visible_labels[i]; };
  std::map<std::map<std::string, int>, double> lhs;
  for (std::size_t k = 0; k < dab.support.size(); ++k) {
    std::map<std::string, int> assignment;
    for (int i = 0; i < ab.n_visible(); ++i) {
      std::string l = label_of(ab, i);
      if (l == "a1") l = "b0";  // fused unit carries A's label on the left
      assignment[l] = dab.support[k][i];
    }
    lhs[assignment] = dab.probs[k];
  }
  for (std::size_t k = 0; k < dba.support.size(); ++k) {
    std::map<std::string, int> assignment;
    for (int i = 0; i < ba.n_visible(); ++i)
      assignment[label_of(ba, i)] = dba.support[k][i];
    REQUIRE(lhs.count(assignment) == 1);
    CHECK(lhs[assignment] == doctest::Approx(dba.probs[k]).epsilon(1e-10));
  }
}

TEST_CASE("tie_visible is the exact conditional") {
  Rbm m = labeled(random_model(4, 3, 31), {"p", "q", "r", "s"});
  for (int bit : {0, 1}) {
    Rbm tied = tie_visible(m, "q", bit);
    REQUIRE(tied.n_visible() == 3);
    CHECK(tied.visible_labels == std::vector<std::string>{"p", "r", "s"});
    ClampPattern clamp;
    clamp.pin(1, bit);
    Distribution cond = exact_distribution(m, clamp);
    Distribution direct = exact_distribution(tied, {});
    REQUIRE(cond.support.size() == direct.support.size());
    for (std::size_t k = 0; k < cond.support.size(); ++k) {
      // same enumeration order: free indices ascending on both sides
      CHECK(std::abs(cond.probs[k] - direct.probs[k]) < 1e-12);
    }
  }
  CHECK_THROWS_AS(tie_visible(m, "nope", 0), std::invalid_argument);
  CHECK_THROWS_AS(tie_visible(m, "p", 2), std::invalid_argument);
}

namespace {

BlockLibrary random_library(const std::vector<std::string>& types,
                            std::uint64_t seed) {
  BlockLibrary lib;
  Rng rng(seed);
  for (const auto& t : types) {
    LibraryBlock entry;
    entry.def = block_def(t);
    entry.model = labeled(
        random_model(entry.def.n_visible(), entry.def.default_hidden,
                     rng.word()),
        entry.def.labels());
    lib[t] = std::move(entry);
  }
  return lib;
}

const char* kTwoAdders = R"(
# two full adders chained through the carry
block a1 fadd
block a2 fadd
net carry a1.cout a2.cin
input  x a1.a a1.b a1.cin a2.a a2.b
output s a1.s a2.s a2.cout
)";

}  // namespace

TEST_CASE("circuit text round-trips") {
  CircuitSpec spec = CircuitSpec::parse(kTwoAdders);
  CHECK(spec.blocks.size() == 2);
  REQUIRE(spec.nets.size() == 1);
  CHECK(spec.nets[0].endpoints.size() == 2);
  CHECK(spec.fields.size() == 2);
  CircuitSpec again = CircuitSpec::parse(spec.to_text());
  CHECK(again.to_text() == spec.to_text());
}

TEST_CASE("circuit parse errors") {
  CHECK_THROWS_AS(CircuitSpec::parse("block a"), std::invalid_argument);
  CHECK_THROWS_AS(CircuitSpec::parse("net n noDot"), std::invalid_argument);
  CHECK_THROWS_AS(CircuitSpec::parse("wire n a.b"), std::invalid_argument);
  CHECK_THROWS_AS(CircuitSpec::parse("const k 2 a.b"), std::invalid_argument);
}

TEST_CASE("two chained adders merge to nine visible units") {
  CircuitSpec spec = CircuitSpec::parse(kTwoAdders);
  auto lib = random_library({"fadd"}, 41);
  ComposedModel cm = compose(spec, lib);
  CHECK(cm.rbm.n_visible() == 5 + 5 - 1);  // n + m - d
  CHECK(cm.rbm.n_hidden() == 12);
  CHECK(cm.rbm.has_label("carry"));
  CHECK(cm.rbm.has_label("a1.a"));
  CHECK(cm.fields.size() == 2);
}

TEST_CASE("compose over two blocks equals a single merge") {
  CircuitSpec spec = CircuitSpec::parse(kTwoAdders);
  auto lib = random_library({"fadd"}, 43);
  ComposedModel cm = compose(spec, lib);

  Rbm a = lib["fadd"].model;
  a.visible_labels = {"a1.a", "a1.b", "a1.cin", "a1.s", "carry"};
  Rbm b = lib["fadd"].model;
  b.visible_labels = {"a2.a", "a2.b", "carry", "a2.s", "a2.cout"};
  Rbm direct = merge(a, b, {{{"carry", "carry"}}});
  CHECK(direct.visible_labels == cm.rbm.visible_labels);
  CHECK((direct.weights - cm.rbm.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK((direct.visible_bias - cm.rbm.visible_bias).cwiseAbs().maxCoeff() == 0.0);
  CHECK((direct.hidden_bias - cm.rbm.hidden_bias).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compose error reporting") {
  auto lib = random_library({"fadd"}, 47);
  SUBCASE("dangling net names the net") {
    CircuitSpec spec = CircuitSpec::parse(
        "block a1 fadd\nnet ghost a1.cout a9.cin\ninput x a1.a\n");
    try {
      compose(spec, lib);
      FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
  }
  SUBCASE("unknown unit") {
    CircuitSpec spec =
        CircuitSpec::parse("block a1 fadd\nnet n a1.bogus\n");
    CHECK_THROWS_AS(compose(spec, lib), std::invalid_argument);
  }
  SUBCASE("net inside one block") {
    CircuitSpec spec =
        CircuitSpec::parse("block a1 fadd\nnet n a1.a a1.b\n");
    CHECK_THROWS_AS(compose(spec, lib), std::invalid_argument);
  }
  SUBCASE("doubly wired unit") {
    CircuitSpec spec = CircuitSpec::parse(
        "block a1 fadd\nblock a2 fadd\nnet n a1.cout a2.cin\nnet o a1.cout "
        "a2.a\n");
    CHECK_THROWS_AS(compose(spec, lib), std::invalid_argument);
  }
  SUBCASE("field over unknown net") {
    CircuitSpec spec = CircuitSpec::parse("block a1 fadd\ninput x nothere\n");
    CHECK_THROWS_AS(compose(spec, lib), std::invalid_argument);
  }
  SUBCASE("missing library entry") {
    CircuitSpec spec = CircuitSpec::parse("block m mul4\n");
    CHECK_THROWS_AS(compose(spec, lib), std::invalid_argument);
  }
}

TEST_CASE("const ties eliminate units exactly") {
  auto lib = random_library({"fadd"}, 53);
  CircuitSpec spec = CircuitSpec::parse(
      "block a1 fadd\nconst zero 0 a1.cin\ninput x a1.a a1.b\noutput s a1.s "
      "a1.cout\n");
  ComposedModel cm = compose(spec, lib);
  CHECK(cm.rbm.n_visible() == 4);
  CHECK_FALSE(cm.rbm.has_label("a1.cin"));

  Rbm original = lib["fadd"].model;
  ClampPattern clamp;
  clamp.pin(original.label_index("cin"), 0);
  Distribution cond = exact_distribution(original, clamp);
  Distribution direct = exact_distribution(cm.rbm, {});
  REQUIRE(cond.support.size() == direct.support.size());
  for (std::size_t k = 0; k < cond.support.size(); ++k)
    CHECK(std::abs(cond.probs[k] - direct.probs[k]) < 1e-12);
}

namespace {

const char* kMul2FromGates = R"(
block and00 and2
block and10 and2
block and01 and2
block and11 and2
block ha1 hadd
block ha2 hadd
net a0 and00.a and01.a
net a1 and10.a and11.a
net b0 and00.b and10.b
net b1 and01.b and11.b
net p0 and00.y
net t10 and10.y ha1.a
net t01 and01.y ha1.b
net t11 and11.y ha2.a
net c1 ha1.c ha2.b
net p1 ha1.s
net p2 ha2.s
net p3 ha2.c
input a a0 a1
input b b0 b1
output p p0 p1 p2 p3
)";

}  // namespace

TEST_CASE("gate-level two-bit multiplier evaluates correctly") {
  CircuitSpec spec = CircuitSpec::parse(kMul2FromGates);
  auto lib = random_library({"and2", "hadd"}, 59);
  ComposedModel cm = compose(spec, lib);
  // 6 blocks with 3+3+3+3+4+4 = 20 units; the nets fuse 8 endpoint pairs
  CHECK(cm.rbm.n_visible() == 20 - 8);

  CircuitFunction fn = circuit_function(spec, lib);
  CHECK(fn.input_bits == 4);
  Dataset inputs;
  for (std::uint64_t k = 0; k < 16; ++k) inputs.rows.push_back(bits_of(k, 4));
  Dataset ds = intermediate_dataset(spec, lib, inputs);
  REQUIRE(ds.rows.size() == 16);

  auto idx_of = [&](const std::string& label) {
    return cm.rbm.label_index(label);
  };
  for (std::uint64_t k = 0; k < 16; ++k) {
    const Bits& row = ds.rows[k];
    std::uint64_t a = (k >> 0 & 1u) | ((k >> 1 & 1u) << 1);
    std::uint64_t b = (k >> 2 & 1u) | ((k >> 3 & 1u) << 1);
    std::uint64_t p = 0;
    for (int bit = 0; bit < 4; ++bit)
      p |= static_cast<std::uint64_t>(row[idx_of("p" + std::to_string(bit))])
           << bit;
    REQUIRE(p == a * b);
    // spot-check internal nets against the gate functions
    CHECK(row[idx_of("t10")] == ((a >> 1) & b & 1u));
    CHECK(row[idx_of("t01")] == (a & (b >> 1) & 1u));
    CHECK(row[idx_of("c1")] ==
          (row[idx_of("t10")] & row[idx_of("t01")]));
  }
  // the spec example: 3 * 2 = 6
  Bits row = fn.row(0b1011);  // a = 3, b = 2
  std::uint64_t p = 0;
  for (int bit = 0; bit < 4; ++bit)
    p |= static_cast<std::uint64_t>(row[idx_of("p" + std::to_string(bit))])
         << bit;
  CHECK(p == 6);

  Dataset empty;
  CHECK(intermediate_dataset(spec, lib, empty).rows.empty());
}
