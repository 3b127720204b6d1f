#include <random>

#include "doctest.h"
#include "gitpol/embedding.hpp"
#include "gitpol/errors.hpp"

using namespace gitpol;

namespace {

Rational q(long a, long b = 1) { return make_rational(a, b); }

using Blocks = std::vector<std::vector<std::vector<std::vector<std::string>>>>;

SystemPtr plane_21() { return build_line_bundle_system(ProblemSpec{2, {-2, -1}, {2, 1}, {0}, {3}}); }
SystemPtr space_22() { return build_line_bundle_system(ProblemSpec{3, {-2, -1}, {1, 1}, {0, 1}, {1, 3}}); }
SystemPtr plane_31() { return build_line_bundle_system(ProblemSpec{2, {-2, -1, 0}, {1, 1, 1}, {1}, {2}}); }
SystemPtr plane_13() { return build_line_bundle_system(ProblemSpec{2, {-1}, {2}, {0, 1, 2}, {1, 1, 1}}); }
SystemPtr plane_11() { return build_line_bundle_system(ProblemSpec{2, {-1}, {2}, {1}, {3}}); }
SystemPtr line_22() { return build_line_bundle_system(ProblemSpec{1, {-2, -1}, {2, 1}, {0, 1}, {1, 2}}); }

std::vector<SystemPtr> all_systems() { return {plane_21(), space_22(), plane_31(), plane_13(), plane_11(), line_22()}; }

Polarization at_t(const Rational& t) { return Polarization{{(1 - t) / 2, t}, {q(1, 3)}}; }

Polarization random_pol(std::mt19937_64& rng, const CompositionSystem& sys) {
  std::uniform_int_distribution<int> d(1, 9);
  Vec lam(sys.r), mu(sys.s);
  Rational sl = 0, sm = 0;
  for (int i = 0; i < sys.r; ++i) sl += (lam[i] = d(rng)) * sys.m[i];
  for (int l = 0; l < sys.s; ++l) sm += (mu[l] = d(rng)) * sys.n[l];
  for (auto& x : lam) x /= sl;
  for (auto& x : mu) x /= sm;
  return Polarization{lam, mu};
}

RatMatrix random_basis(std::mt19937_64& rng, size_t d, size_t k) {
  std::uniform_int_distribution<int> c(-2, 2);
  RatMatrix m(d, k);
  for (size_t x = 0; x < d; ++x)
    for (size_t y = 0; y < k; ++y) m(x, y) = c(rng);
  return canonical_basis(m, d);
}

RatMatrix random_invertible(std::mt19937_64& rng, size_t d) {
  std::uniform_int_distribution<int> c(-2, 2);
  for (;;) {
    RatMatrix m(d, d);
    for (size_t x = 0; x < d; ++x)
      for (size_t y = 0; y < d; ++y) m(x, y) = c(rng);
    if (inverse(m)) return m;
  }
}

MorphismElement wall_matrix() {
  Blocks b = {{{{"x0^2 + x1*x2", "x1^2 - x0*x2"}, {"x2^2 + 2*x0*x1", "x0^2 + x1^2 + x2^2"}, {"x0*x1 - x2^2", "3*x0*x2"}},
               {{"0"}, {"x1"}, {"x2"}}}};
  return morphism_from_polynomials(plane_21(), b);
}

}  // namespace

TEST_CASE("big dimensions and canonical ranks") {
  auto b92 = build_big(plane_21());
  CHECK(b92.p == std::vector<size_t>{5, 1});
  CHECK(b92.q == std::vector<size_t>{3});
  auto b95 = build_big(space_22());
  CHECK(b95.p == std::vector<size_t>{5, 1});
  CHECK(b95.q == std::vector<size_t>{1, 7});
  auto b1 = build_big(plane_11());
  CHECK(b1.p == std::vector<size_t>{2});
  CHECK(b1.eta.empty());
  CHECK(b1.xi.size() == 1);

  for (const auto& sp : all_systems()) {
    const auto& sys = *sp;
    auto big = build_big(sp);
    std::vector<int> mfull(sys.m), nfull(sys.n);
    // The polarization module's dimension bookkeeping is an independent formula.
    CHECK(big.p == saturated_left_dims(mfull, sys));
    CHECK(big.q == saturated_right_dims(nfull, sys));
    for (int i = 1; i < sys.r; ++i) CHECK(rank(big.xi[i]) == big.p[i - 1] - sys.m[i - 1]);
    auto rep = z_membership(big, zeta(big, MorphismElement::zero(sp)));
    for (int l = 0; l + 1 < sys.s; ++l) {
      const std::string want = "rank-y" + std::to_string(l + 1);
      for (const auto& c : rep.conditions)
        if (c.id == want) CHECK(c.canonical == static_cast<long>(big.q[l + 1]) - sys.n[l + 1]);
    }
  }
}

TEST_CASE("gamma is injective") {
  CHECK(gamma_rank(*plane_21()) == 45);
  CHECK(gamma_rank(*space_22()) == 104);
  for (const auto& sp : all_systems()) CHECK(gamma_injectivity_check(*sp));
  // r = s = 1: γ is a reshaping of φ.
  auto sp = plane_11();
  auto big = build_big(sp);
  auto w = random_morphism(sp, 3, 3);
  auto g = gamma_of(big, w);
  const size_t h = sp->h[0][0];
  CHECK(h == 6);
  CHECK(g.rows() == 3);
  CHECK(g.cols() == 2 * h);
  for (size_t x = 0; x < 2; ++x)
    for (size_t z = 0; z < h; ++z)
      for (size_t nu = 0; nu < 3; ++nu) CHECK(g(nu, x * h + z) == w.phi[0][0](nu * h + z, x));
}

TEST_CASE("zeta is linear and zero goes to the distinguished element") {
  for (const auto& sp : all_systems()) {
    auto big = build_big(sp);
    auto z = zeta(big, MorphismElement::zero(sp));
    CHECK(z.gamma.is_zero());
    CHECK(z.x == big.xi);
    CHECK(z.y == big.eta);
    auto w1 = random_morphism(sp, 5, 3), w2 = random_morphism(sp, 6, 3);
    CHECK(gamma_of(big, w1 + w2) == gamma_of(big, w1) + gamma_of(big, w2));
  }
}

TEST_CASE("theta is a homomorphism") {
  for (const auto& sp : all_systems()) {
    auto big = build_big(sp);
    auto e = theta(big, GroupElement::identity(sp));
    for (size_t i = 0; i < e.g.size(); ++i) CHECK(e.g[i] == RatMatrix::identity(big.p[i]));
    for (size_t l = 0; l < e.h.size(); ++l) CHECK(e.h[l] == RatMatrix::identity(big.q[l]));
    for (uint64_t t = 0; t < 100; ++t) {
      auto g1 = random_group(sp, 1000 + t, 2), g2 = random_group(sp, 2000 + t, 2);
      CHECK(theta(big, compose_group(g2, g1)) == compose_big(theta(big, g2), theta(big, g1)));
    }
  }
}

TEST_CASE("theta of a single unipotent block") {
  auto sp = plane_21();
  auto big = build_big(sp);
  auto g = GroupElement::identity(sp);
  RatMatrix u(3, 2);  // M_2 ⊗ A_21 ← M_1
  u(0, 0) = 1;
  u(1, 1) = -2;
  u(2, 0) = 3;
  g.u[{1, 0}] = u;
  auto t = theta(big, g);
  RatMatrix expect = RatMatrix::identity(5);
  expect.set_block(2, 0, u);
  CHECK(t.g[0] == expect);
  CHECK(t.g[1] == RatMatrix::identity(1));
}

TEST_CASE("zeta is equivariant") {
  for (const auto& sp : all_systems()) {
    auto big = build_big(sp);
    for (uint64_t t = 0; t < 100; ++t) {
      auto g = random_group(sp, 31 + t, 2);
      auto w = random_morphism(sp, 77 + t, 2, 40);
      CHECK(zeta(big, act(g, w)) == act_big(big, theta(big, g), zeta(big, w)));
    }
  }
}

TEST_CASE("theta fixes the distinguished element") {
  for (const auto& sp : all_systems()) {
    auto big = build_big(sp);
    auto z = zeta(big, MorphismElement::zero(sp));
    for (uint64_t t = 0; t < 20; ++t) {
      auto moved = act_big(big, theta(big, random_unipotent(sp, 500 + t, 3)), z);
      CHECK(moved.x == big.xi);
      CHECK(moved.y == big.eta);
      auto moved2 = act_big(big, theta(big, random_group(sp, 900 + t, 3)), z);
      CHECK(moved2.x == big.xi);
      CHECK(moved2.y == big.eta);
    }
  }
}

TEST_CASE("saturated-family weight identity") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (const auto& sp : all_systems()) {
    const auto& sys = *sp;
    auto big = build_big(sp);
    for (int t = 0; t < 170; ++t) {
      SubspaceFamily fam;
      for (int i = 0; i < sys.r; ++i) fam.mprime.push_back(random_basis(rng, sys.m[i], rng() % (sys.m[i] + 1)));
      for (int l = 0; l < sys.s; ++l) fam.nprime.push_back(random_basis(rng, sys.n[l], rng() % (sys.n[l] + 1)));
      auto pol = random_pol(rng, sys);
      auto assoc = associated(pol, sys);
      auto bf = saturated_big_family(big, fam);
      CHECK(big_delta(assoc, bf) == discriminant(pol, fam.dims()));
      std::vector<size_t> pd, qd;
      for (const auto& m : bf.pprime) pd.push_back(rank(m));
      for (const auto& m : bf.qprime) qd.push_back(rank(m));
      CHECK(pd == saturated_left_dims(fam.dims().mprime, sys));
      CHECK(qd == saturated_right_dims(fam.dims().nprime, sys));
      ++checked;
    }
  }
  CHECK(checked >= 1000);
}

TEST_CASE("invariant families saturate to invariant subrepresentations") {
  std::mt19937_64 rng(12);
  for (const auto& sp : all_systems()) {
    const auto& sys = *sp;
    auto big = build_big(sp);
    for (uint64_t t = 0; t < 15; ++t) {
      auto w = random_morphism(sp, 300 + t, 2, 60);
      std::vector<RatMatrix> seed;
      for (int i = 0; i < sys.r; ++i) seed.push_back(random_basis(rng, sys.m[i], rng() % (sys.m[i] + 1)));
      auto up = saturate_up(w, seed);
      REQUIRE(is_invariant(w, up));
      CHECK(is_big_invariant(big, zeta(big, w), saturated_big_family(big, up)));
    }
  }
}

TEST_CASE("z membership") {
  std::mt19937_64 rng(13);
  for (const auto& sp : all_systems()) {
    const auto& sys = *sp;
    auto big = build_big(sp);
    for (uint64_t t = 0; t < 6; ++t) {
      auto w = random_morphism(sp, 40 + t, 2, 30);
      auto bw = zeta(big, w);
      auto rep = z_membership(big, bw);
      CHECK(rep.status == ZStatus::InZ);
      for (const auto& c : rep.conditions) CHECK_MESSAGE(c.holds, c.id);
      // Arbitrary automorphisms of the P_i and Q_l keep the point in the orbit.
      BigGroupElement g;
      for (size_t d : big.p) g.g.push_back(random_invertible(rng, d));
      for (size_t d : big.q) g.h.push_back(random_invertible(rng, d));
      CHECK(z_membership(big, act_big(big, g, bw)).status == ZStatus::InZ);
    }
    auto bw = zeta(big, random_morphism(sp, 99, 2));
    if (sys.r >= 2) {
      auto zeroed = bw;
      zeroed.x[1] = RatMatrix(zeroed.x[1].rows(), zeroed.x[1].cols());
      CHECK(z_membership(big, zeroed).status == ZStatus::Boundary);
      auto bent = bw;
      for (size_t x = 0; x < bent.x[1].rows(); ++x)
        for (size_t y = 0; y < bent.x[1].cols(); ++y) bent.x[1](x, y) += static_cast<int>(rng() % 5) - 2;
      CHECK(z_membership(big, bent).status == ZStatus::Outside);
    }
    if (sys.s >= 2) {
      auto zeroed = bw;
      zeroed.y[0] = RatMatrix(zeroed.y[0].rows(), zeroed.y[0].cols());
      CHECK(z_membership(big, zeroed).status == ZStatus::Boundary);
    }
  }
  // A random gamma on the two-step left chain breaks the factorization conditions.
  auto sp = plane_31();
  auto big = build_big(sp);
  auto bw = zeta(big, MorphismElement::zero(sp));
  for (size_t x = 0; x < bw.gamma.rows(); ++x)
    for (size_t y = 0; y < bw.gamma.cols(); ++y) bw.gamma(x, y) = static_cast<int>((x * 7 + y * 3) % 5) - 2;
  CHECK(z_membership(big, bw).status == ZStatus::Outside);
  // Breaking only the two-step factorization of x_2 ∘ x_3.
  auto chain = zeta(big, MorphismElement::zero(sp));
  chain.x[2] = RatMatrix(chain.x[2].rows(), chain.x[2].cols());
  chain.x[2](0, 0) = 1;
  auto rep = z_membership(big, chain);
  bool left_chain_failed = false;
  for (const auto& c : rep.conditions)
    if (c.group == "left-chain" && !c.holds) left_chain_failed = true;
  CHECK(left_chain_failed);
  CHECK(rep.status == ZStatus::Outside);
}

TEST_CASE("unstable morphisms embed as unstable points") {
  auto sp = plane_21();
  auto big = build_big(sp);
  auto pol = at_t(q(7, 10));
  auto assoc = associated(pol, *sp);
  REQUIRE(assoc.p == big.p);

  auto z = zeta(big, MorphismElement::zero(sp));
  auto v0 = big_destabilizer_search(big, z, assoc);
  CHECK(v0.status == StabilityStatus::Unstable);
  REQUIRE(v0.family.has_value());
  CHECK(is_big_invariant(big, z, *v0.family));
  CHECK(big_delta(assoc, *v0.family) == v0.delta);

  auto w = wall_matrix();
  auto small = destabilizer_search(w, pol);
  REQUIRE(small.status == StabilityStatus::Unstable);
  auto fam = transport_witness(big, *small.witness);
  auto bw = zeta(big, w);
  CHECK(is_big_invariant(big, bw, fam));
  CHECK(big_delta(assoc, fam) == small.witness->delta);
  CHECK(big_destabilizer_search(big, bw, assoc).status == StabilityStatus::Unstable);

  // The Δ = 0 family on the wall transports as well.
  auto on = destabilizer_search(w, at_t(q(2, 3)));
  REQUIRE(on.witness.has_value());
  auto fam0 = transport_witness(big, *on.witness);
  CHECK(is_big_invariant(big, bw, fam0));
  CHECK(big_delta(associated(at_t(q(2, 3)), *sp), fam0) == 0);

  // Witnesses found on moved orbit points (h ≠ 1) on random sparse morphisms.
  int transported = 0;
  for (uint64_t t = 0; t < 30; ++t) {
    auto rw = random_morphism(sp, 700 + t, 2, 75);
    auto v = destabilizer_search(rw, pol, {600, t + 1, true});
    if (v.status != StabilityStatus::Unstable) continue;
    auto f = transport_witness(big, *v.witness);
    auto rbw = zeta(big, rw);
    CHECK(is_big_invariant(big, rbw, f));
    CHECK(big_delta(assoc, f) > 0);
    ++transported;
  }
  CHECK(transported > 0);
}

TEST_CASE("boundary points of the two-step plane shape are unstable") {
  auto sp = plane_21();
  auto big = build_big(sp);
  std::mt19937_64 rng(21);
  for (auto t : {q(2, 3), q(7, 10), q(9, 10)}) {
    auto assoc = associated(at_t(t), *sp);
    for (uint64_t k = 0; k < 10; ++k) {
      auto w = random_morphism(sp, 800 + k, 3);
      w.phi[0][1] = RatMatrix(w.phi[0][1].rows(), w.phi[0][1].cols());
      auto bw = zeta(big, w);
      // Drop the rank of x_2 through a rank-2 endomorphism of A_21.
      RatMatrix pi(3, 3);
      RatMatrix a = random_basis(rng, 3, 2), b = random_basis(rng, 3, 2);
      if (a.cols() < 2 || b.cols() < 2) continue;
      pi = a * b.transpose();
      bw.x[1] = bw.x[1] * pi;
      auto rep = z_membership(big, bw);
      CHECK(rep.status == ZStatus::Boundary);
      auto v = big_destabilizer_search(big, bw, assoc, 2000, k + 1);
      CHECK(v.status == StabilityStatus::Unstable);
      REQUIRE(v.family.has_value());
      CHECK(is_big_invariant(big, bw, *v.family));
    }
  }
}

TEST_CASE("big search: serial and parallel agree") {
  auto sp = space_22();
  auto big = build_big(sp);
  Polarization pol{{q(1, 10), q(9, 10)}, {q(4, 5), q(1, 15)}};
  auto assoc = associated(pol, *sp);
  for (uint64_t t = 0; t < 4; ++t) {
    auto bw = zeta(big, random_morphism(sp, 60 + t, 2, 50));
    auto a = big_destabilizer_search(big, bw, assoc, 3000, t + 1);
    auto b = big_destabilizer_search_serial(big, bw, assoc, 3000, t + 1);
    CHECK(a.status == b.status);
    CHECK(a.budget_used == b.budget_used);
    CHECK(a.delta == b.delta);
  }
}

TEST_CASE("converse spot check where the comparison conditions hold") {
  // On the plane shape with t in (3/5, 1) the comparison conditions hold with c_1 = 0, so a
  // big destabilizer must be matched by a destabilizer of w itself.
  auto sp = plane_21();
  auto big = build_big(sp);
  auto pol = at_t(q(7, 10));
  auto assoc = associated(pol, *sp);
  int hits = 0;
  for (uint64_t t = 0; t < 25; ++t) {
    auto w = random_morphism(sp, 1200 + t, 2, 70);
    auto bv = big_destabilizer_search(big, zeta(big, w), assoc, 2000, t + 1);
    if (bv.status != StabilityStatus::Unstable) continue;
    ++hits;
    auto sv = destabilizer_search(w, pol, {4000, t + 1, true});
    CHECK(sv.status == StabilityStatus::Unstable);
  }
  CHECK(hits > 0);

  // The explicit stable matrix in the rectangle: no big destabilizer either.
  auto s95 = space_22();
  Blocks b = {{{{"x2^2 - x1*x3"}}, {{"x0"}}}, {{{"x0^3"}, {"x1^3"}, {"x2^3"}}, {{"x1^2"}, {"x2^2"}, {"x3^2"}}}};
  auto w95 = morphism_from_polynomials(s95, b);
  auto b95 = build_big(s95);
  Rational mu1 = 1 - q(1, 5);
  Polarization p95{{q(1, 10), q(9, 10)}, {mu1, (1 - mu1) / 3}};
  auto v = big_destabilizer_search(b95, zeta(b95, w95), associated(p95, *s95));
  CHECK(v.status == StabilityStatus::NoDestabilizerFound);
}

TEST_CASE("embedding input errors") {
  auto sp = plane_21();
  auto big = build_big(sp);
  auto bw = zeta(big, MorphismElement::zero(sp));
  AssociatedPolarization bad;
  bad.alpha = {q(1)};
  bad.beta = {q(1)};
  CHECK_THROWS_AS(big_destabilizer_search(big, bw, bad), SchemaError);
  auto assoc = associated(at_t(q(7, 10)), *sp);
  CHECK_THROWS_AS(big_destabilizer_search(big, bw, assoc, 0), SchemaError);
  auto broken = bw;
  broken.gamma = RatMatrix(2, 2);
  CHECK_THROWS_AS(z_membership(big, broken), InvariantError);
  auto j = z_report_to_json(z_membership(big, bw));
  CHECK(j["status"] == "in_Z");
  CHECK(j["schema"] == "1");
}
