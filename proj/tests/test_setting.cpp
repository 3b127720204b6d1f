#include "doctest.h"
#include "gitpol/errors.hpp"
#include "gitpol/graded.hpp"
#include "gitpol/setting.hpp"

using namespace gitpol;

namespace {

using PolyMatrix = std::vector<std::vector<Polynomial>>;

ProblemSpec spec_of(int n, std::vector<int> e, std::vector<int> m, std::vector<int> f,
                    std::vector<int> nn) {
  return ProblemSpec{n, std::move(e), std::move(m), std::move(f), std::move(nn)};
}

PolyMatrix zeros(int rows, int cols, int nvars) {
  return PolyMatrix(rows, std::vector<Polynomial>(cols, Polynomial(nvars)));
}

PolyMatrix mul(const PolyMatrix& a, const PolyMatrix& b, int nvars) {
  PolyMatrix out = zeros(a.size(), b.at(0).size(), nvars);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b[0].size(); ++j)
      for (size_t k = 0; k < b.size(); ++k) out[i][j] = out[i][j] + a[i][k] * b[k][j];
  return out;
}

// Writes block (rows of N_l or M_j) × (columns of M_i) with forms of degree d.
void put_block(PolyMatrix& out, int r0, int c0, const RatMatrix& blk, int rows, int cols, int n, int d) {
  const size_t dim = sym_dim(n, d);
  for (int a = 0; a < rows; ++a)
    for (int c = 0; c < cols; ++c) {
      Vec co(dim);
      for (size_t k = 0; k < dim; ++k) co[k] = blk(a * dim + k, c);
      out[r0 + a][c0 + c] = form_from_coeffs(n, d, co);
    }
}

std::vector<int> offsets(const std::vector<int>& mults) {
  std::vector<int> off{0};
  for (int x : mults) off.push_back(off.back() + x);
  return off;
}

PolyMatrix left_matrix(const GroupElement& g) {
  const ProblemSpec& sp = *g.sys->origin;
  auto off = offsets(sp.left_mults);
  PolyMatrix out = zeros(off.back(), off.back(), sp.ambient_dim + 1);
  for (int i = 0; i < sp.r(); ++i) {
    put_block(out, off[i], off[i], g.g[i], sp.left_mults[i], sp.left_mults[i], sp.ambient_dim, 0);
    for (int j = i + 1; j < sp.r(); ++j)
      put_block(out, off[j], off[i], g.u.at({j, i}), sp.left_mults[j], sp.left_mults[i],
                sp.ambient_dim, deg_a(sp, j, i));
  }
  return out;
}

PolyMatrix right_matrix(const GroupElement& g) {
  const ProblemSpec& sp = *g.sys->origin;
  auto off = offsets(sp.right_mults);
  PolyMatrix out = zeros(off.back(), off.back(), sp.ambient_dim + 1);
  for (int l = 0; l < sp.s(); ++l) {
    put_block(out, off[l], off[l], g.hh[l], sp.right_mults[l], sp.right_mults[l], sp.ambient_dim, 0);
    for (int q = l + 1; q < sp.s(); ++q)
      put_block(out, off[q], off[l], g.v.at({q, l}), sp.right_mults[q], sp.right_mults[l],
                sp.ambient_dim, deg_b(sp, q, l));
  }
  return out;
}

PolyMatrix morphism_matrix(const MorphismElement& w) {
  const ProblemSpec& sp = *w.sys->origin;
  auto ro = offsets(sp.right_mults), co = offsets(sp.left_mults);
  PolyMatrix out = zeros(ro.back(), co.back(), sp.ambient_dim + 1);
  for (int l = 0; l < sp.s(); ++l)
    for (int i = 0; i < sp.r(); ++i)
      put_block(out, ro[l], co[i], w.phi[l][i], sp.right_mults[l], sp.left_mults[i], sp.ambient_dim,
                deg_h(sp, l, i));
  return out;
}

std::vector<ProblemSpec> sample_specs() {
  return {
      spec_of(2, {-2, -1}, {2, 1}, {0}, {3}),
      spec_of(3, {-2, -1}, {1, 1}, {0, 1}, {1, 3}),
      spec_of(2, {-3, -2, -1}, {1, 2, 1}, {0}, {2}),
      spec_of(1, {-2, -1}, {2, 1}, {0, 1, 3}, {1, 2, 1}),
      spec_of(2, {-1}, {2}, {0, 1}, {1, 1}),
  };
}

}  // namespace

TEST_CASE("line-bundle system dimensions") {
  auto s1 = build_line_bundle_system(spec_of(2, {-2, -1}, {2, 1}, {0}, {3}));
  CHECK(s1->a[1][0] == 3);
  CHECK(s1->h[0][0] == 6);
  CHECK(s1->h[0][1] == 3);
  CHECK(s1->dim_w() == 45);

  auto s2 = build_line_bundle_system(spec_of(3, {-2, -1}, {1, 1}, {0, 1}, {1, 3}));
  CHECK(s2->a[1][0] == 4);
  CHECK(s2->b[1][0] == 4);
  CHECK(s2->dim_w() == 104);

  auto s3 = build_line_bundle_system(spec_of(3, {-4, -2, -1}, {1, 1, 1}, {0}, {1}));
  CHECK(s3->a[1][0] == 10);
  CHECK(s3->a[2][1] == 4);
  CHECK(s3->a[2][0] == 20);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(build_line_bundle_system(spec_of(2, {-1, 0}, {1, 1}, {0}, {1})), SchemaError);
  CHECK_THROWS_AS(build_line_bundle_system(spec_of(2, {-1, -2}, {1, 1}, {0}, {1})), SchemaError);
  CHECK_THROWS_AS(build_line_bundle_system(spec_of(2, {-1}, {0}, {0}, {1})), SchemaError);
  CHECK_THROWS_AS(build_line_bundle_system(spec_of(0, {-1}, {1}, {0}, {1})), SchemaError);
  ProblemSpec sp = spec_of(3, {-2, -1}, {1, 1}, {0, 1}, {1, 3});
  CHECK(transpose(transpose(sp)) == sp);
  CHECK(transpose(sp).left_twists == std::vector<int>{-1, 0});
  CHECK(transpose(sp).right_mults == std::vector<int>{1, 1});
}

TEST_CASE("line-bundle systems pass validation") {
  for (const auto& sp : sample_specs()) {
    auto rep = validate_system(*build_line_bundle_system(sp));
    CHECK(rep.ok);
    for (const auto& f : rep.failures) MESSAGE(f);
  }
}

TEST_CASE("validation catches a broken pairing") {
  auto base = build_line_bundle_system(spec_of(2, {-3, -2, -1}, {1, 1, 1}, {0}, {1}));
  CompositionSystem swapped = *base;
  // x0⊗x1 and x0⊗x2 land on different monomials, so swapping them breaks associativity.
  swapped.comp_aa.at({2, 1, 0}) = swapped.comp_aa.at({2, 1, 0}).select_columns({0, 2, 1, 3, 4, 5, 6, 7, 8});
  CHECK(!validate_system(swapped).ok);
  CompositionSystem degenerate = *base;
  degenerate.comp_ha.at({0, 1, 0}) = RatMatrix(degenerate.h[0][0], degenerate.h[0][1] * degenerate.a[1][0]);
  CHECK(!validate_system(degenerate).ok);
  CompositionSystem rescaled = *base;
  rescaled.comp_ha.at({0, 1, 0}) = rescaled.comp_ha.at({0, 1, 0}).scaled(2);
  CHECK(!validate_system(rescaled).ok);
}

TEST_CASE("group law: identity, inverse, associativity") {
  for (const auto& sp : sample_specs()) {
    auto sys = build_line_bundle_system(sp);
    GroupElement e = GroupElement::identity(sys);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      GroupElement g = random_group(sys, seed, 3);
      GroupElement h = random_group(sys, seed + 100, 2);
      GroupElement k = random_group(sys, seed + 200, 2);
      CHECK(compose_group(e, g) == g);
      CHECK(compose_group(g, e) == g);
      CHECK(compose_group(g, inverse(g)) == e);
      CHECK(compose_group(inverse(g), g) == e);
      CHECK(compose_group(compose_group(k, h), g) == compose_group(k, compose_group(h, g)));
    }
  }
}

TEST_CASE("group law and action agree with polynomial matrix products") {
  for (const auto& sp : sample_specs()) {
    auto sys = build_line_bundle_system(sp);
    const int nv = sp.ambient_dim + 1;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      GroupElement g1 = random_group(sys, seed, 2), g2 = random_group(sys, seed + 50, 2);
      GroupElement prod = compose_group(g2, g1);
      CHECK(left_matrix(prod) == mul(left_matrix(g2), left_matrix(g1), nv));
      CHECK(right_matrix(prod) == mul(right_matrix(g2), right_matrix(g1), nv));
      MorphismElement w = random_morphism(sys, seed + 7, 3, 30);
      PolyMatrix want =
          mul(mul(right_matrix(g1), morphism_matrix(w), nv), left_matrix(inverse(g1)), nv);
      CHECK(morphism_matrix(act(g1, w)) == want);
    }
  }
}

TEST_CASE("action is a left action and linear") {
  for (const auto& sp : sample_specs()) {
    auto sys = build_line_bundle_system(sp);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      GroupElement g = random_group(sys, seed, 2), h = random_group(sys, seed + 9, 2);
      MorphismElement w = random_morphism(sys, seed, 4), x = random_morphism(sys, seed + 1, 4, 50);
      CHECK(act(compose_group(g, h), w) == act(g, act(h, w)));
      CHECK(act(GroupElement::identity(sys), w) == w);
      CHECK(act(g, w + x.scaled(make_rational(3, 2))) == act(g, w) + act(g, x).scaled(make_rational(3, 2)));
      GroupElement red = random_reductive(sys, seed, 3);
      MorphismElement rw = act(red, w);
      for (int l = 0; l < sys->s; ++l)
        for (int i = 0; i < sys->r; ++i) {
          RatMatrix want = RatMatrix::kron(red.hh[l], RatMatrix::identity(sys->h[l][i])) * w.phi[l][i] *
                           *gitpol::inverse(red.g[i]);
          CHECK(rw.phi[l][i] == want);
        }
    }
  }
}

TEST_CASE("scalar pair acts trivially") {
  auto sys = build_line_bundle_system(spec_of(3, {-2, -1}, {1, 1}, {0, 1}, {1, 3}));
  GroupElement c = GroupElement::identity(sys);
  for (auto& x : c.g) x = RatMatrix::scalar(x.rows(), 5);
  for (auto& x : c.hh) x = RatMatrix::scalar(x.rows(), 5);
  MorphismElement w = random_morphism(sys, 3, 5);
  CHECK(act(c, w) == w);
}

TEST_CASE("unipotent element clears the quadric row") {
  auto sys = build_line_bundle_system(spec_of(2, {-1}, {2}, {0, 1}, {1, 1}));
  MorphismElement x = morphism_from_polynomials(sys, {{{{"x1", "x2"}}}, {{{"x0*x1", "x0*x2"}}}});
  GroupElement h = GroupElement::identity(sys);
  Vec minus_z = coeffs_from_form(2, 1, parse_polynomial("-x0", 3));
  for (size_t k = 0; k < minus_z.size(); ++k) h.v.at({1, 0})(k, 0) = minus_z[k];
  auto out = morphism_to_polynomials(act(h, x));
  CHECK(out[0][0][0] == std::vector<std::string>{"x1", "x2"});
  CHECK(out[1][0][0] == std::vector<std::string>{"0", "0"});
}

TEST_CASE("samplers are deterministic") {
  auto sys = build_line_bundle_system(spec_of(2, {-3, -2, -1}, {1, 2, 1}, {0}, {2}));
  CHECK(random_unipotent(sys, 42, 3) == random_unipotent(sys, 42, 3));
  CHECK(random_unipotent(sys, 42, 0) == GroupElement::identity(sys));
  CHECK(random_unipotent(sys, 42, 3).check_unipotent());
  CHECK(random_morphism(sys, 9, 3) == random_morphism(sys, 9, 3));
  CHECK(!(random_morphism(sys, 9, 3) == random_morphism(sys, 10, 3)));
}

TEST_CASE("flatten round trip and polynomial I/O") {
  auto sys = build_line_bundle_system(spec_of(2, {-2, -1}, {2, 1}, {0}, {3}));
  MorphismElement w = random_morphism(sys, 5, 4, 20);
  CHECK(w.flatten().size() == 45);
  CHECK(MorphismElement::unflatten(sys, w.flatten()) == w);
  CHECK(morphism_from_polynomials(sys, morphism_to_polynomials(w)) == w);
  CHECK_THROWS_AS(morphism_from_polynomials(sys, {{{{"x0", "x1"}, {"x0", "x1"}, {"x0", "x1"}},
                                                   {{"x0"}, {"x0"}, {"x0"}}}}),
                  SchemaError);
}
