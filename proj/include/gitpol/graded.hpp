#pragma once

#include <map>
#include <memory>
#include <vector>

#include "gitpol/matrix.hpp"

namespace gitpol {

using Exponent = std::vector<int>;

// Monomial basis of S^d V* with dim V = n+1, in graded-lex order (x0^d first).
struct GradedSpace {
  int ambient_dim = 0;
  int degree = 0;
  std::vector<Exponent> basis;
  std::map<Exponent, size_t> index;

  size_t dim() const { return basis.size(); }
  size_t index_of(const Exponent& e) const;
};

// Cached and shared; safe to call concurrently.
std::shared_ptr<const GradedSpace> graded_space(int n, int d);

size_t sym_dim(int n, int d);

// S^a V* ⊗ S^b V* → S^{a+b} V*; column index is x * sym_dim(n,b) + y.
RatMatrix mult_map(int n, int a, int b);

}  // namespace gitpol
