#pragma once

// The level-preserving map phi : T_{b,3^n} -> G_n and its node-by-node lift.
//
// phi(root) = root. For a child J + {max(J) + k} of J: if phi(J) is
// non-branching the child goes to its unique immediate descendant, otherwise
// to the k-th immediate descendant in fraternal order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "laakso_lab/laakso_graph.hpp"
#include "laakso_lab/quotient_analysis.hpp"
#include "laakso_lab/tree_space.hpp"

namespace laakso_lab {

// Test hook: at `node`, children with fraternal offsets 1 and 2 are sent to
// each other's images.
struct PhiFault {
  TreeNode node;
};

class PhiMap {
 public:
  explicit PhiMap(LaaksoGraph target, std::optional<PhiFault> fault = std::nullopt);

  const LaaksoGraph& target() const noexcept { return target_; }
  int branching() const noexcept { return target_.branching(); }
  int depth() const noexcept { return target_.diameter(); }
  const std::optional<PhiFault>& fault() const noexcept { return fault_; }

  // Throws DomainError if `node` is not a vertex of T_{b,3^n}.
  VertexId phi(const TreeNode& node) const;
  std::size_t phi_index(const TreeNode& node) const;

  // Images of every vertex of `source`, in its enumeration order.
  std::vector<std::size_t> phi_table(const TreeSpace& source) const;

  // Descendant m of `from` with phi(m) = `to` and d_T(from, m) = d_M(phi(from), to),
  // following the deterministic downward path and taking offset 1 below
  // non-branching vertices. Throws RelationError unless phi(from) <= to.
  TreeNode lift(const TreeNode& from, const VertexId& to) const;

 private:
  LaaksoGraph target_;
  std::optional<PhiFault> fault_;
};

struct PhiCounterexample {
  std::string check;  // "surjective", "level", "lipschitz", "lift"
  TreeNode source;
  std::optional<TreeNode> other;
  std::optional<VertexId> target;
  std::string detail;
};

struct PhiVerifyOptions {
  enum class Coverage { kAuto, kExhaustive, kSampled };
  Coverage coverage = Coverage::kAuto;
  // kAuto is exhaustive up to this many tree vertices.
  std::size_t exhaustive_limit = 4096;
  std::size_t samples = 256;
  std::uint64_t seed = 0;
  std::size_t max_counterexamples = 16;
};

struct Lemma24Report {
  bool surjective = true;
  bool levels_preserved = true;
  bool lipschitz = true;
  bool atd_colipschitz = true;
  bool exhaustive = true;
  std::size_t tree_vertices = 0;
  std::size_t target_vertices = 0;
  std::size_t comparable_pairs = 0;
  std::size_t incomparable_pairs = 0;
  std::size_t target_comparable_pairs = 0;
  std::size_t lifts_checked = 0;
  std::vector<PhiCounterexample> counterexamples;

  bool passed() const noexcept { return surjective && levels_preserved && lipschitz && atd_colipschitz; }
};

// Surjectivity and level preservation, 1-Lipschitzness on tree pairs
// (stratified into comparable and incomparable pairs), and exact lifting for
// every comparable target pair mu < nu and every (or sampled) preimage of mu.
Lemma24Report verify_lemma_2_4(const PhiMap& phi, const PhiVerifyOptions& options = {});
std::string lemma_2_4_report_to_json(const Lemma24Report& report);

// Re-evaluates one counterexample; true when the property now holds.
bool replay_counterexample(const PhiMap& phi, const PhiCounterexample& cx);
std::string counterexample_to_json(const PhiCounterexample& cx);
PhiCounterexample counterexample_from_json(const std::string& text);

// phi as a finite map table with the prefix order on the tree and the
// ancestor order on the graph.
MetricMapTable phi_map_table(const PhiMap& phi, const TreeSpace& source);

using PhiForkWitness = BasicForkWitness<TreeNode, VertexId>;

// Fork search on the graph side followed by lifting, without enumerating the
// tree: r runs over powers of 3 that are >= r_min, mu0 over vertices whose
// level is a multiple of r, mu1 and the arms over descendants at depth r.
// Preimages are sigma0 = lift(root, mu0), sigma1 = lift(sigma0, mu1),
// sigma2k = lift(sigma1, mu2k). c_inf defaults to 1, the ATD constant of phi.
std::optional<PhiForkWitness> fork_search_phi(const PhiMap& phi, double eps, double r_min,
                                              std::size_t max_arms = 2, double c_inf = 1.0);
ForkCheck check_fork(const PhiMap& phi, const PhiForkWitness& w);
std::string phi_fork_witness_to_json(const PhiForkWitness& w);

}  // namespace laakso_lab
