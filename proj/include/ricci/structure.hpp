#ifndef RICCI_STRUCTURE_HPP
#define RICCI_STRUCTURE_HPP

#include <cstddef>
#include <map>
#include <vector>

namespace ricci {

/// Constants of the principal-orbit homogeneous structure: the number of
/// irreducible summands, their dimensions, and the arrays (beta_k),
/// (gamma_{k,l}^m) entering the curvature formulas.
///
/// Immutable after construction; safe for concurrent reads.
struct HomogeneousStructure {
  int n = 0;
  std::vector<int> dims;      // d_k, size n
  std::vector<double> beta;   // beta_k, size n
  std::vector<double> gamma;  // gamma_{k,l}^m flattened, size n^3
  bool abelian = false;

  double gamma_at(int k, int l, int m) const {
    return gamma[(static_cast<std::size_t>(k) * n + l) * n + m];
  }
  double& gamma_at(int k, int l, int m) {
    return gamma[(static_cast<std::size_t>(k) * n + l) * n + m];
  }

  /// Dimension of the tube: 1 + sum d_k.
  int total_dim() const;
};

/// Lie bracket data in a Q-orthonormal basis of g, together with the
/// isotropy indices and the assignment of the remaining basis vectors to
/// modules p_1..p_n.
struct BracketTable {
  int dim_g = 0;
  std::vector<double> brackets;  // c_{ij}^s flattened, size dim_g^3
  std::vector<int> k_indices;
  std::map<int, int> module_assignment;  // basis index -> module label 1..n

  double c(int i, int j, int s) const {
    return brackets[(static_cast<std::size_t>(i) * dim_g + j) * dim_g + s];
  }
  double& c(int i, int j, int s) {
    return brackets[(static_cast<std::size_t>(i) * dim_g + j) * dim_g + s];
  }
};

/// Returns s unchanged if every invariant holds; throws InvalidStructure
/// naming the violated invariant otherwise.
const HomogeneousStructure& validate_structure(const HomogeneousStructure& s);

/// Checks the algebraic invariants of a bracket table: antisymmetry, the
/// Jacobi identity, Q-invariance of the bracket, and closure of k, all to
/// 1e-12. Throws InvalidStructure on failure.
void validate_bracket_table(const BracketTable& b);

struct ConstantsResult {
  HomogeneousStructure structure;
  /// Largest spread of a beta or gamma value across the basis vectors it
  /// was evaluated on. The constants are basis-independent, so a spread
  /// above 1e-10 means the module assignment is wrong.
  double max_spread = 0.0;
};

/// Brute-force evaluation of (beta_k) and (gamma_{k,l}^m) from bracket
/// data. beta_k comes from the Killing form as the trace of composed
/// adjoint maps; gamma from summed squared bracket projections, averaged
/// over the adapted basis of p_k. Throws NotIsotypic when the spread
/// exceeds 1e-10.
ConstantsResult compute_constants(const BracketTable& b);

}  // namespace ricci

#endif
