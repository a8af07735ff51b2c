#pragma once

// James staircase vectors in finitely supported sequences with the sup-norm.
//
// u_k = theta * (e_1 + ... + e_k), u_n^* is the n-th coordinate functional and
// v_J = sum of u_n over n in J, so coordinate i of v_J is theta * #{n in J : n >= i}.
// All arithmetic is exact.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "laakso_lab/rational.hpp"
#include "laakso_lab/tree_space.hpp"

namespace laakso_lab {

struct StaircaseVector {
  Rational theta{3, 4};
  std::vector<Rational> coords;  // coords[0] is coordinate 1

  Rational coordinate(std::size_t i) const;  // 1-based, zero past the support
};

StaircaseVector v_of(const TreeNode& J, const Rational& theta);
Rational sup_norm(const StaircaseVector& v);
StaircaseVector operator-(const StaircaseVector& a, const StaircaseVector& b);

// ||v_J - v_K||, computed from element counts without building the vectors.
Rational difference_norm(const TreeNode& J, const TreeNode& K, const Rational& theta);

// Every strictly increasing subset of {1..index_bound} with at most size_bound
// elements, in lexicographic order, starting with the empty set.
std::vector<TreeNode> increasing_subsets(int index_bound, int size_bound);

struct JamesCheck {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  // Smallest and largest observed value of (norm / size) over the checked
  // items; size is |J| or |J| + |J'|. Empty when nothing was checked.
  std::optional<Rational> min_ratio;
  std::optional<Rational> max_ratio;
  std::string first_violation;
};

struct JamesReport {
  Rational theta{3, 4};
  int index_bound = 12;
  int size_bound = 6;
  std::size_t subsets = 0;
  std::vector<JamesCheck> checks;

  bool passed() const;
};

// (1) injectivity, (2) theta k <= ||v_J|| <= k,
// (3) theta/3 (k + l) <= ||v_J - v_J'|| <= k + l whenever max J < min J'.
JamesReport verify_lemma_3_1(const Rational& theta, int index_bound, int size_bound);

// The same family with theta = 3/4 and the uniform constant 1/4 on both
// single-vector and difference bounds.
JamesReport verify_eq_james(int index_bound, int size_bound);

// ||v_J' - v_J|| = theta (|J'| - |J|) for every prefix pair J <= J'.
JamesReport verify_atd_bilipschitz(int index_bound, int size_bound, const Rational& theta);

// u_n^*(u_k) = theta [n <= k] for 1 <= n, k <= index_bound.
JamesReport verify_biorthogonality(int index_bound, const Rational& theta);

std::string james_report_to_json(const JamesReport& report);

struct SiblingSeparation {
  TreeNode common;                  // longest common prefix of the witness
  std::vector<TreeNode> tails;      // witness nodes with the common prefix removed
  bool precondition_ok = true;      // tails pairwise disjointly ordered as given
  std::vector<std::size_t> ordered; // greedy subsequence with max I_a < min I_b
  std::int64_t scale = 1;           // 3^(N-2)
  bool cardinality_ok = true;       // |I| >= 3^(N-2) for every tail
  bool separation_ok = true;        // pairwise norm >= 3^(N-2)/2 on the subsequence
  std::optional<Rational> min_norm;
  Rational bound{1, 2};

  bool passed() const noexcept { return cardinality_ok && separation_ok; }
};

// theta = 3/4. Requires N >= 2 (DomainError otherwise).
SiblingSeparation sibling_separation_bound(const std::vector<TreeNode>& witness, int N);
std::string sibling_separation_to_json(const SiblingSeparation& s);

}  // namespace laakso_lab
