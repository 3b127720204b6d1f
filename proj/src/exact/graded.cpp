#include "gitpol/graded.hpp"

#include <mutex>

#include "gitpol/errors.hpp"

namespace gitpol {

size_t GradedSpace::index_of(const Exponent& e) const {
  auto it = index.find(e);
  require(it != index.end(), "monomial not in graded space");
  return it->second;
}

namespace {

void fill(int vars, int pos, int left, Exponent& cur, std::vector<Exponent>& out) {
  if (pos == vars - 1) {
    cur[pos] = left;
    out.push_back(cur);
    return;
  }
  for (int k = left; k >= 0; --k) {
    cur[pos] = k;
    fill(vars, pos + 1, left - k, cur, out);
  }
  cur[pos] = 0;
}

std::shared_ptr<const GradedSpace> build(int n, int d) {
  auto g = std::make_shared<GradedSpace>();
  g->ambient_dim = n;
  g->degree = d;
  if (d >= 0) {
    Exponent cur(static_cast<size_t>(n + 1), 0);
    fill(n + 1, 0, d, cur, g->basis);
  }
  for (size_t k = 0; k < g->basis.size(); ++k) g->index.emplace(g->basis[k], k);
  return g;
}

}  // namespace

std::shared_ptr<const GradedSpace> graded_space(int n, int d) {
  require(n >= 0, "graded_space: negative ambient dimension");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const GradedSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, d);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto g = build(n, d);
  cache.emplace(key, g);
  return g;
}

size_t sym_dim(int n, int d) {
  if (d < 0) return 0;
  Integer b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n + d), static_cast<unsigned long>(n));
  return b.get_ui();
}

RatMatrix mult_map(int n, int a, int b) {
  require(a >= 0 && b >= 0, "mult_map: negative degree");
  auto sa = graded_space(n, a), sb = graded_space(n, b), sc = graded_space(n, a + b);
  RatMatrix m(sc->dim(), sa->dim() * sb->dim());
  Exponent e(static_cast<size_t>(n + 1));
  for (size_t x = 0; x < sa->dim(); ++x)
    for (size_t y = 0; y < sb->dim(); ++y) {
      for (int k = 0; k <= n; ++k) e[k] = sa->basis[x][k] + sb->basis[y][k];
      m(sc->index_of(e), x * sb->dim() + y) = 1;
    }
  return m;
}

}  // namespace gitpol
