#include <random>

#include "doctest.h"
#include "gitpol/constants.hpp"
#include "gitpol/errors.hpp"
#include "gitpol/graded.hpp"

using namespace gitpol;

namespace {

ProblemSpec spec_of(int n, std::vector<int> e, std::vector<int> m, std::vector<int> f,
                    std::vector<int> nn) {
  return ProblemSpec{n, std::move(e), std::move(m), std::move(f), std::move(nn)};
}

Rational q(long a, long b = 1) { return make_rational(a, b); }

// (2,2) type on P_3 with two copies of O(-1) and two copies of O.
SystemPtr two_two(int m1 = 3, int n2 = 5) { return build_line_bundle_system(spec_of(3, {-2, -1}, {m1, 2}, {0, 1}, {2, n2})); }
SystemPtr three_one() { return build_line_bundle_system(spec_of(3, {-4, -2, -1}, {1, 1, 1}, {0}, {5})); }

// span{e_1 ⊗ z_1 + e_2 ⊗ z_2} inside M ⊗ V* with dim M = 2.
RatMatrix diagonal_line(size_t a) {
  RatMatrix k(2 * a, 1);
  k(1, 0) = 1;
  k(a + 2, 0) = 1;
  return k;
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(c_closed_form_21(3, 2) == q(1, 7));
  for (int n = 1; n <= 6; ++n) CHECK(c_closed_form_21(n, 1) == 0);
  CHECK(c_closed_form_21(2, 5) == q(3, 8));
  CHECK(c_closed_form_21(2, 3) == c_closed_form_21(2, 4));
  CHECK(c_closed_form_triple(3, 4) == q(1, 5));
  for (int n = 1; n <= 6; ++n) CHECK(c_closed_form_triple(n, 2) == 1);
  CHECK(c_closed_form_triple(2, 3) == q(1, 2));
  CHECK_THROWS_AS(c_closed_form_21(0, 1), InvariantError);
}

TEST_CASE("resolution picks the right source") {
  auto sys = two_two();
  auto c1 = resolve(c_query(sys, 0)), c2 = resolve(c_query(sys, 1));
  auto d1 = resolve(d_query(sys, 0)), d2 = resolve(d_query(sys, 1));
  CHECK(c1.value == q(1, 7));
  CHECK(c1.source == ConstantSource::ClosedForm21);
  CHECK(c2.value == q(4, 7));
  CHECK(c2.source == ConstantSource::Table);
  CHECK(d2.value == q(1, 7));
  CHECK(d1.value == q(4, 7));
  CHECK(reference_table(d_query(sys, 0)) == q(4, 7));
  CHECK_FALSE(reference_table(c_query(sys, 0)).has_value());

  auto sys21 = build_line_bundle_system(spec_of(2, {-2, -1}, {2, 1}, {0}, {3}));
  auto c = resolve(c_query(sys21, 0));
  CHECK(c.value == 0);
  CHECK(c.source == ConstantSource::SingleFactor);

  auto s31 = three_one();
  auto ct = resolve(c_query(s31, 0));
  CHECK(ct.value == q(1, 5));
  CHECK(ct.source == ConstantSource::ClosedFormTriple);
  CHECK(resolve(c3_query(s31)).value == 0);
  CHECK(resolve(c3_prime_query(s31)).value == 0);

  auto wide = build_line_bundle_system(spec_of(2, {-3, -1}, {1, 2}, {0}, {1}));
  auto lb = resolve(c_query(wide, 0), 5, 50);
  CHECK(lb.source == ConstantSource::LowerBound);
  CHECK_FALSE(lb.exact());
}

TEST_CASE("family membership") {
  auto ds = delta_system(c_query(two_two(), 0));
  REQUIRE(ds.dim_u() == 8);
  CHECK(in_family(ds, diagonal_line(4)));
  RatMatrix one_slice(8, 2);
  one_slice(0, 0) = 1;
  one_slice(1, 1) = 1;
  CHECK_FALSE(in_family(ds, one_slice));
  // e_1 ⊗ z_1 + e_2 ⊗ z_1 lies in (e_1 + e_2) ⊗ V*.
  RatMatrix skew(8, 1);
  skew(0, 0) = 1;
  skew(4, 0) = 1;
  CHECK_FALSE(in_family(ds, skew));
  CHECK_FALSE(in_family(ds, RatMatrix(8, 1)));
  CHECK_FALSE(in_family(ds, RatMatrix::identity(8)));
}

TEST_CASE("structured witnesses attain the stated constants") {
  auto sys = two_two();
  auto d1 = delta_system(c_query(sys, 0)), d2 = delta_system(c_query(sys, 1));
  CHECK(rho(d1, diagonal_line(4)) == q(1, 7));
  CHECK(rho(d2, diagonal_line(4)) == q(4, 7));

  // K = {(f, f z)} for the (O(-4), O(-2), O(-1)) type: f ∈ S^2, f z ∈ S^3.
  auto ds = delta_system(c_query(three_one(), 0));
  REQUIRE(ds.dim_u() == 10 + 20);
  RatMatrix mm = mult_map(3, 2, 1);
  RatMatrix k(30, 10);
  for (size_t f = 0; f < 10; ++f) {
    k(f, f) = 1;
    for (size_t z = 0; z < 20; ++z) k(10 + z, f) = mm(z, f * 4 + 1);
  }
  CHECK(in_family(ds, k));
  CHECK(rho(ds, k) == q(1, 5));
  CHECK(image_dim(ds, k) == 10);
}

TEST_CASE("sampled lower bounds stay below exact values") {
  auto sys = two_two();
  for (uint64_t seed : {1u, 2u}) {
    auto lb1 = sampled_lower_bound(c_query(sys, 0), seed, 200);
    auto lb2 = sampled_lower_bound(c_query(sys, 1), seed, 200);
    CHECK(lb1.value == q(1, 7));
    CHECK(lb2.value == q(4, 7));
    REQUIRE(lb1.witness.has_value());
    CHECK(lb1.admissible > 0);
    auto ld1 = sampled_lower_bound(d_query(sys, 1), seed, 200);
    CHECK(ld1.value == q(1, 7));
  }
  auto lt = sampled_lower_bound(c_query(three_one(), 0), 3, 60);
  CHECK(lt.value == q(1, 5));
  auto single = sampled_lower_bound(c_query(build_line_bundle_system(spec_of(3, {-2, -1}, {1, 1}, {0}, {2})), 0), 1, 20);
  CHECK(single.value == 0);
  CHECK_THROWS_AS(sampled_lower_bound(c_query(sys, 0), 1, 0), SchemaError);
}

TEST_CASE("serial and parallel sampling agree") {
  auto sys = two_two();
  auto a = sampled_lower_bound(c_query(sys, 1), 9, 150);
  auto b = sampled_lower_bound_serial(c_query(sys, 1), 9, 150);
  CHECK(a.value == b.value);
  CHECK(a.admissible == b.admissible);
  REQUIRE(a.witness.has_value());
  CHECK(*a.witness == *b.witness);
}

TEST_CASE("padding keeps the ratio and the family") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-1, 1);
  auto sys = two_two();
  for (int side = 0; side < 2; ++side) {
    auto ds = delta_system(c_query(sys, side));
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 40; ++trial) {
      size_t dk = 1 + rng() % 4;
      RatMatrix k(ds.dim_u(), dk);
      for (size_t r = 0; r < k.rows(); ++r)
        for (size_t c = 0; c < dk; ++c) k(r, c) = coef(rng);
      if (!in_family(ds, k)) continue;
      auto [dbar, kbar] = pad_subspace(ds, k, 0);
      CHECK(dbar.blocks[0].mult == 3);
      CHECK(in_family(dbar, kbar));
      CHECK(rho(dbar, kbar) == rho(ds, k));
      ++checked;
    }
    CHECK(checked >= 20);
  }
}

TEST_CASE("closed form is monotone in the multiplicity") {
  for (int n = 1; n <= 5; ++n)
    for (int m = 1; m < 10; ++m) CHECK(c_closed_form_21(n, m) <= c_closed_form_21(n, m + 1));
}

TEST_CASE("dual constants match the transposed problem") {
  auto spec = spec_of(3, {-2, -1}, {3, 2}, {0, 1}, {2, 5});
  auto sys = build_line_bundle_system(spec);
  auto tsys = build_line_bundle_system(transpose(spec));
  for (int i = 0; i < 2; ++i) {
    auto lhs = sampled_lower_bound(d_query(sys, i), 4, 60);
    auto rhs = sampled_lower_bound(c_query(tsys, 1 - i), 4, 60);
    CHECK(lhs.value == rhs.value);
  }
}
