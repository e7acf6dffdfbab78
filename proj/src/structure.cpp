#include "ricci/structure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ricci/errors.hpp"

namespace ricci {

namespace {
constexpr double kExactTol = 1e-12;
constexpr double kSpreadTol = 1e-10;
}  // namespace

int HomogeneousStructure::total_dim() const {
  int d = 1;
  for (int dk : dims) d += dk;
  return d;
}

const HomogeneousStructure& validate_structure(const HomogeneousStructure& s) {
  if (s.n < 1) throw InvalidStructure("n must be positive");
  if (static_cast<int>(s.dims.size()) != s.n)
    throw InvalidStructure("dims has wrong length");
  if (static_cast<int>(s.beta.size()) != s.n)
    throw InvalidStructure("beta has wrong length");
  if (s.gamma.size() != static_cast<std::size_t>(s.n) * s.n * s.n)
    throw InvalidStructure("gamma has wrong length");
  for (int dk : s.dims)
    if (dk < 1) throw InvalidStructure("all d_k must be >= 1");
  if (s.total_dim() < 3)
    throw InvalidStructure("total dimension 1 + sum d_k must be >= 3");
  for (double b : s.beta)
    if (b < 0.0 || !std::isfinite(b))
      throw InvalidStructure("beta entries must be nonnegative");
  for (double g : s.gamma)
    if (g < 0.0 || !std::isfinite(g))
      throw InvalidStructure("gamma entries must be nonnegative");
  if (s.abelian) {
    for (double b : s.beta)
      if (b != 0.0)
        throw InvalidStructure("abelian structure requires all beta_k = 0");
    for (double g : s.gamma)
      if (g != 0.0)
        throw InvalidStructure("abelian structure requires all gamma = 0");
  } else {
    bool any_positive = false;
    for (double b : s.beta) any_positive = any_positive || b > 0.0;
    if (!any_positive)
      throw InvalidStructure(
          "non-abelian structure requires at least one beta_k > 0");
  }
  return s;
}

void validate_bracket_table(const BracketTable& b) {
  const int m = b.dim_g;
  if (m < 1) throw InvalidStructure("bracket table: dim_g must be positive");
  if (b.brackets.size() != static_cast<std::size_t>(m) * m * m)
    throw InvalidStructure("bracket table: wrong array size");

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int s = 0; s < m; ++s)
        if (std::fabs(b.c(i, j, s) + b.c(j, i, s)) > kExactTol)
          throw InvalidStructure("bracket table: antisymmetry fails at (" +
                                 std::to_string(i) + "," + std::to_string(j) +
                                 "," + std::to_string(s) + ")");

  // Jacobi: [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]] = 0.
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k)
        for (int t = 0; t < m; ++t) {
          double sum = 0.0;
          for (int s = 0; s < m; ++s)
            sum += b.c(j, k, s) * b.c(i, s, t) + b.c(k, i, s) * b.c(j, s, t) +
                   b.c(i, j, s) * b.c(k, s, t);
          if (std::fabs(sum) > kExactTol)
            throw InvalidStructure("bracket table: Jacobi identity fails");
        }

  // Q-invariance in an orthonormal basis: c_{ij}^s + c_{is}^j = 0.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int s = 0; s < m; ++s)
        if (std::fabs(b.c(i, j, s) + b.c(i, s, j)) > kExactTol)
          throw InvalidStructure("bracket table: Q-invariance fails");

  std::set<int> kset(b.k_indices.begin(), b.k_indices.end());
  for (int idx : kset)
    if (idx < 0 || idx >= m)
      throw InvalidStructure("bracket table: k index out of range");
  for (int i : kset)
    for (int j : kset)
      for (int s = 0; s < m; ++s)
        if (!kset.count(s) && std::fabs(b.c(i, j, s)) > kExactTol)
          throw InvalidStructure("bracket table: k is not a subalgebra");
}

ConstantsResult compute_constants(const BracketTable& b) {
  validate_bracket_table(b);
  const int m = b.dim_g;
  std::set<int> kset(b.k_indices.begin(), b.k_indices.end());

  int n = 0;
  for (int i = 0; i < m; ++i) {
    if (kset.count(i)) continue;
    auto it = b.module_assignment.find(i);
    if (it == b.module_assignment.end())
      throw InvalidStructure("module assignment misses basis index " +
                             std::to_string(i));
    if (it->second < 1)
      throw InvalidStructure("module labels must be 1-based positive");
    n = std::max(n, it->second);
  }
  if (n == 0) throw InvalidStructure("no module assignment given");

  std::vector<std::vector<int>> modules(n);
  for (const auto& [idx, label] : b.module_assignment) {
    if (kset.count(idx))
      throw InvalidStructure("basis index " + std::to_string(idx) +
                             " assigned to a module but lies in k");
    modules[label - 1].push_back(idx);
  }
  for (int k = 0; k < n; ++k)
    if (modules[k].empty())
      throw InvalidStructure("module " + std::to_string(k + 1) + " is empty");

  // Killing matrix K_ij = tr(ad e_i . ad e_j) = sum_{s,t} c_{it}^s c_{js}^t.
  std::vector<double> killing(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double sum = 0.0;
      for (int s = 0; s < m; ++s)
        for (int t = 0; t < m; ++t) sum += b.c(i, t, s) * b.c(j, s, t);
      killing[static_cast<std::size_t>(i) * m + j] = sum;
    }

  ConstantsResult out;
  out.structure.n = n;
  out.structure.dims.resize(n);
  out.structure.beta.assign(n, 0.0);
  out.structure.gamma.assign(static_cast<std::size_t>(n) * n * n, 0.0);

  double spread = 0.0;
  for (int k = 0; k < n; ++k) {
    out.structure.dims[k] = static_cast<int>(modules[k].size());
    double lo = 0.0, hi = 0.0, acc = 0.0;
    bool first = true;
    for (int i : modules[k]) {
      double candidate = -killing[static_cast<std::size_t>(i) * m + i];
      acc += candidate;
      if (first || candidate < lo) lo = candidate;
      if (first || candidate > hi) hi = candidate;
      first = false;
      // K must be -beta_k Q on p_k, so off-diagonal entries vanish.
      for (int j : modules[k])
        if (j != i)
          spread = std::max(
              spread, std::fabs(killing[static_cast<std::size_t>(i) * m + j]));
    }
    spread = std::max(spread, hi - lo);
    out.structure.beta[k] = acc / static_cast<double>(modules[k].size());
  }

  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int mm = 0; mm < n; ++mm) {
        double lo = 0.0, hi = 0.0, acc = 0.0;
        bool first = true;
        for (int i : modules[k]) {
          double val = 0.0;
          for (int j : modules[l])
            for (int s : modules[mm]) val += b.c(i, j, s) * b.c(i, j, s);
          acc += val;
          if (first || val < lo) lo = val;
          if (first || val > hi) hi = val;
          first = false;
        }
        spread = std::max(spread, hi - lo);
        double g = acc / static_cast<double>(modules[k].size());
        out.structure.gamma_at(k, l, mm) = std::max(g, 0.0);
      }

  out.max_spread = spread;
  if (spread > kSpreadTol)
    throw NotIsotypic(spread, "constant spread " + std::to_string(spread) +
                                  " exceeds 1e-10");

  bool all_zero = true;
  for (double v : b.brackets) all_zero = all_zero && v == 0.0;
  out.structure.abelian = all_zero;

  // Clean exact zeros produced by roundoff in the averaged beta.
  for (double& v : out.structure.beta)
    if (std::fabs(v) <= kSpreadTol) v = 0.0;
  for (double& v : out.structure.gamma)
    if (std::fabs(v) <= kSpreadTol) v = 0.0;

  validate_structure(out.structure);
  return out;
}

}  // namespace ricci
