#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brw {

enum class GroupKind { RegularTree, FreeGroup, IntegerLattice };

std::string_view to_string(GroupKind kind);
GroupKind parse_group_kind(std::string_view name);

/// A transitive graph given as a Cayley graph.
///
///  * RegularTree(d): free product of d copies of Z/2, every generator is an
///    involution; its Cayley graph is the d-regular tree.
///  * FreeGroup(k): free group on k generators; Cayley graph is the
///    2k-regular tree.
///  * IntegerLattice(d): Z^d with the unit vectors, degree 2d.
struct GroupSpec {
  GroupKind kind = GroupKind::RegularTree;
  int param = 3;

  static GroupSpec regular_tree(int d) { return {GroupKind::RegularTree, d}; }
  static GroupSpec free_group(int k) { return {GroupKind::FreeGroup, k}; }
  static GroupSpec lattice(int d) { return {GroupKind::IntegerLattice, d}; }

  int degree() const noexcept;
  bool is_tree() const noexcept { return kind != GroupKind::IntegerLattice; }
  bool nonamenable() const noexcept { return is_tree(); }
  /// Throws DomainError unless the parameter is in range.
  void validate() const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

std::string to_string(const GroupSpec& g);

/// Normal form of a group element.
///
/// Tree kinds store a reduced word of generator indices: for RegularTree the
/// letters are 0..d-1 and no letter repeats consecutively; for FreeGroup
/// letter 2i is a_i and 2i+1 is its inverse, and no letter is followed by its
/// inverse.  Lattices store the coordinate vector.
struct Elem {
  std::vector<int> w;

  friend bool operator==(const Elem&, const Elem&) = default;
  friend auto operator<=>(const Elem&, const Elem&) = default;
};

struct ElemHash {
  std::size_t operator()(const Elem& x) const noexcept;
};

Elem identity(const GroupSpec& g);
/// Throws InvalidElement when x is not a normal form for g.
void validate(const GroupSpec& g, const Elem& x);
bool is_valid(const GroupSpec& g, const Elem& x) noexcept;

/// x times generator `gen` (0 <= gen < degree), reduced.  Generator order:
/// RegularTree letters 0..d-1; FreeGroup a_1, a_1^-1, a_2, ...; lattice
/// +e_1, -e_1, +e_2, ...
Elem step(const GroupSpec& g, const Elem& x, int gen);
/// The deg(g) neighbours of x in generator order.
std::vector<Elem> neighbors(const GroupSpec& g, const Elem& x);
Elem multiply(const GroupSpec& g, const Elem& x, const Elem& y);
Elem inverse(const GroupSpec& g, const Elem& x);
/// Word length for tree kinds, L1 norm for lattices.
std::int64_t norm(const GroupSpec& g, const Elem& x);
std::int64_t distance(const GroupSpec& g, const Elem& x, const Elem& y);

/// Text form: "e" for the tree identity, dotted 1-based letters otherwise
/// ("2.1.3"; free-group inverses are negative, "1.-2"); lattice points as
/// "(x,y,z)".
std::string to_string(const GroupSpec& g, const Elem& x);
Elem parse_elem(const GroupSpec& g, std::string_view text);

/// Radial / box distribution of the simple random walk.
///
/// For tree kinds row n holds u_n(j), the probability of sitting at one fixed
/// vertex at distance j from the start after n steps (j = 0..n).  For
/// lattices row n holds the probabilities over the box [-n, n]^d in
/// row-major order.  Rows are built once and are read-only afterwards.
class TransitionTable {
 public:
  static constexpr std::size_t kMaxCells = std::size_t{1} << 25;

  TransitionTable(const GroupSpec& g, int max_steps);

  const GroupSpec& group() const noexcept { return group_; }
  int max_steps() const noexcept { return max_steps_; }

  /// p_n(x, y); zero beyond the walk's reach.
  long double probability(int n, const Elem& x, const Elem& y) const;
  /// p_n(e, z) for z at displacement `offset` (lattice) or at distance
  /// offset[0] (tree kinds).
  long double row_value(int n, const std::vector<int>& offset) const;
  const std::vector<long double>& row(int n) const { return rows_.at(static_cast<std::size_t>(n)); }

 private:
  GroupSpec group_;
  int max_steps_;
  std::vector<std::vector<long double>> rows_;
};

/// Number of vertices at distance j from a fixed vertex of a tree kind.
long double sphere_size(const GroupSpec& g, int j);

/// p_n(e, e) for n = 0..max_steps, streaming (memory O(max_steps) for tree
/// kinds).
std::vector<long double> return_probabilities(const GroupSpec& g, int max_steps);

/// p_s(x, y) for s = 0..max_steps.
std::vector<long double> transition_column(const GroupSpec& g, const Elem& x, const Elem& y, int max_steps);

/// Exact p_n(x, y).
long double return_probability(const GroupSpec& g, int n, const Elem& x, const Elem& y);

struct SpectralEstimate {
  double estimate = 0.0;                ///< p_{2 n_max}(e,e)^{1/(2 n_max)}
  std::optional<double> closed_form;    ///< known limit, when available
  std::vector<double> sequence;         ///< estimate at 2n for n = 1..n_max
};

SpectralEstimate spectral_radius(const GroupSpec& g, int n_max);

/// Known value of the spectral radius: 2 sqrt(d-1)/d for d-regular trees,
/// 1 for lattices.
double spectral_radius_closed_form(const GroupSpec& g);

struct VisitsSeries {
  std::vector<long double> partial_sums;        ///< S_0..S_N (shorter on divergence)
  std::optional<std::size_t> divergence_index;  ///< first n with S_n > cap
};

/// Partial sums of sum_{n<=N} mean^n p_n(e,e).  Stops early, recording the
/// index, once a partial sum exceeds `cap`.
VisitsSeries visits_series(const GroupSpec& g, double mean, int N, long double cap = 1e300L);

}  // namespace brw
