#include <random>

#include "doctest.h"
#include "gitpol/errors.hpp"
#include "gitpol/stability.hpp"

using namespace gitpol;

namespace {

Rational q(long a, long b = 1) { return make_rational(a, b); }

using Blocks = std::vector<std::vector<std::vector<std::vector<std::string>>>>;

SystemPtr plane_21_system() { return build_line_bundle_system(ProblemSpec{2, {-2, -1}, {2, 1}, {0}, {3}}); }
SystemPtr plane_two_by_one() { return build_line_bundle_system(ProblemSpec{2, {-2}, {2}, {-1, 0}, {1, 1}}); }

// Generic quadrics in the first two columns, (0, x1, x2) in the last.
MorphismElement wall_matrix() {
  Blocks b = {{{{"x0^2 + x1*x2", "x1^2 - x0*x2"}, {"x2^2 + 2*x0*x1", "x0^2 + x1^2 + x2^2"}, {"x0*x1 - x2^2", "3*x0*x2"}},
               {{"0"}, {"x1"}, {"x2"}}}};
  return morphism_from_polynomials(plane_21_system(), b);
}

Polarization at_t(const Rational& t) { return Polarization{{(1 - t) / 2, t}, {q(1, 3)}}; }

MorphismElement plane_x(const std::string& z1, const std::string& z2, const std::string& q1, const std::string& q2) {
  Blocks b = {{{{z1, z2}}}, {{{q1, q2}}}};
  return morphism_from_polynomials(plane_two_by_one(), b);
}

// All-ones multiplicities: M'_i, N'_l ∈ {0, C}. Returns the G_red status by enumeration.
StabilityStatus brute_force(const MorphismElement& w, const Polarization& pol) {
  const CompositionSystem& sys = *w.sys;
  const int r = sys.r, s = sys.s;
  int worst = 0;
  for (unsigned mask = 1; mask + 1 < (1u << (r + s)); ++mask) {
    bool invariant = true;
    for (int i = 0; i < r && invariant; ++i)
      for (int l = 0; l < s && invariant; ++l)
        if ((mask >> i & 1) && !(mask >> (r + l) & 1) && !w.phi[l][i].is_zero()) invariant = false;
    if (!invariant) continue;
    Rational d = 0;
    for (int i = 0; i < r; ++i)
      if (mask >> i & 1) d += pol.lambda[i];
    for (int l = 0; l < s; ++l)
      if (mask >> (r + l) & 1) d -= pol.mu[l];
    worst = std::max(worst, sgn(d) > 0 ? 2 : sgn(d) == 0 ? 1 : 0);
  }
  return worst == 2 ? StabilityStatus::Unstable : worst == 1 ? StabilityStatus::NotStable : StabilityStatus::StableExact;
}

Polarization random_pol(std::mt19937_64& rng, int r, int s) {
  std::uniform_int_distribution<int> d(1, 6);
  Vec lam(r), mu(s);
  Rational sl = 0, sm = 0;
  for (auto& x : lam) sl += (x = d(rng));
  for (auto& x : mu) sm += (x = d(rng));
  for (auto& x : lam) x /= sl;
  for (auto& x : mu) x /= sm;
  return Polarization{lam, mu};
}

}  // namespace

TEST_CASE("invariance and saturation") {
  auto w = wall_matrix();
  const auto& sys = *w.sys;
  CHECK(is_invariant(w, SubspaceFamily::zero(sys)));
  CHECK(is_invariant(w, SubspaceFamily::full(sys)));
  SubspaceFamily fam = saturate_up(w, {RatMatrix(2, 0), RatMatrix::identity(1)});
  CHECK(fam.dims() == DimensionVector{{0, 1}, {2}});
  CHECK(is_invariant(w, fam));
  CHECK(saturate_up(w, SubspaceFamily::zero(sys).mprime).dims() == SubspaceFamily::zero(sys).dims());
  CHECK(saturate_down(w, SubspaceFamily::full(sys).nprime).dims() == SubspaceFamily::full(sys).dims());

  auto w0 = MorphismElement::zero(w.sys);
  CHECK(saturate_down(w0, SubspaceFamily::zero(sys).nprime).dims() == DimensionVector{{2, 1}, {0}});

  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    auto rw = random_morphism(w.sys, 100 + t, 2, 60);
    RatMatrix seed(3, 1 + t % 2);
    for (size_t x = 0; x < seed.rows(); ++x)
      for (size_t c = 0; c < seed.cols(); ++c) seed(x, c) = static_cast<int>(rng() % 3) - 1;
    auto down = saturate_down(rw, {seed});
    auto again = saturate_down(rw, saturate_up(rw, down.mprime).nprime);
    // Same left part; the right part shrinks to the image support.
    again.nprime = down.nprime;
    CHECK(again == down);
    CHECK(is_invariant(rw, saturate_up(rw, down.mprime)));
  }
}

TEST_CASE("zero morphism is unstable") {
  auto w0 = MorphismElement::zero(plane_21_system());
  auto v = destabilizer_search(w0, at_t(q(7, 10)));
  CHECK(v.status == StabilityStatus::Unstable);
  CHECK(verify_witness(w0, at_t(q(7, 10)), v));
  auto g = g_stability_sample(w0, at_t(q(7, 10)), 3, 1);
  CHECK(g.status == StabilityStatus::Unstable);
}

TEST_CASE("wall matrix: not stable on the wall, unstable above it") {
  auto w = wall_matrix();
  auto on = destabilizer_search(w, at_t(q(2, 3)));
  CHECK(on.status == StabilityStatus::NotStable);
  REQUIRE(on.witness.has_value());
  CHECK(on.witness->family.dims() == DimensionVector{{0, 1}, {2}});
  CHECK(verify_witness(w, at_t(q(2, 3)), on));
  auto above = destabilizer_search(w, at_t(q(7, 10)));
  CHECK(above.status == StabilityStatus::Unstable);
  CHECK(verify_witness(w, at_t(q(7, 10)), above));

  FiltrationFamily filt;
  filt.levels = {saturate_up(w, {RatMatrix(2, 0), RatMatrix::identity(1)}), SubspaceFamily::full(*w.sys)};
  CHECK(verify_jh(w, filt, at_t(q(2, 3))));
  CHECK_FALSE(verify_jh(w, filt, at_t(q(7, 10))));
  auto piece = graded_piece(w, filt, 0);
  CHECK(piece.sys->m == std::vector<int>{0, 1});
  CHECK(piece.sys->n == std::vector<int>{2});
}

TEST_CASE("serial and parallel searches agree") {
  auto sys = plane_21_system();
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    auto w = random_morphism(sys, seed, 2, 70);
    auto pol = at_t(q(7, 10));
    auto a = destabilizer_search(w, pol, {500, seed, true});
    auto b = destabilizer_search_serial(w, pol, {500, seed, true});
    CHECK(a.status == b.status);
    CHECK(a.budget_used == b.budget_used);
    CHECK(a.witness.has_value() == b.witness.has_value());
    if (a.witness) {
      CHECK(a.witness->h == b.witness->h);
      CHECK(a.witness->family == b.witness->family);
    }
  }
}

TEST_CASE("exact decider for two copies of O(-2) on the plane") {
  // (z_1 0 / q z_1^2) with q outside z_1 V*.
  auto x = plane_x("x0", "0", "x1^2 + x2^2", "x0^2");
  CHECK(decide_two_by_one_plane(x, Mu1Side::BelowHalf).status == StabilityStatus::StableExact);
  auto above = decide_two_by_one_plane(x, Mu1Side::AboveHalf);
  CHECK(above.status == StabilityStatus::Unstable);
  CHECK(verify_witness(x, two_by_one_plane_polarization(Mu1Side::AboveHalf), above));

  // det = 0: q_i = z z_i.
  auto y = plane_x("x0", "x1", "x0*x2 + x0^2", "x1*x2 + x0*x1");
  auto vy = decide_two_by_one_plane(y, Mu1Side::AboveHalf);
  CHECK(vy.status == StabilityStatus::Unstable);
  CHECK(verify_witness(y, two_by_one_plane_polarization(Mu1Side::AboveHalf), vy));
  CHECK_FALSE(vy.witness->h.v.at({1, 0}).is_zero());
  auto vyb = decide_two_by_one_plane(y, Mu1Side::BelowHalf);
  CHECK(vyb.status == StabilityStatus::Unstable);
  CHECK(verify_witness(y, two_by_one_plane_polarization(Mu1Side::BelowHalf), vyb));
  // The search finds the same unipotent move.
  auto sy = destabilizer_search(y, two_by_one_plane_polarization(Mu1Side::AboveHalf));
  CHECK(sy.status == StabilityStatus::Unstable);
  CHECK(g_stability_sample(y, two_by_one_plane_polarization(Mu1Side::AboveHalf), 3, 2).status ==
        StabilityStatus::Unstable);

  auto generic = plane_x("x0", "x1", "x2^2", "x0*x1 + x2^2");
  CHECK(decide_two_by_one_plane(generic, Mu1Side::AboveHalf).status == StabilityStatus::StableExact);

  // Verdict JSON carries a re-checkable witness.
  auto sys = plane_two_by_one();
  Json j = Json::parse(stability_verdict_to_json(y, vy).dump());
  CHECK(j["schema"] == "1");
  auto back = stability_verdict_from_json(sys, j);
  CHECK(back.status == StabilityStatus::Unstable);
  CHECK(verify_witness(y, two_by_one_plane_polarization(Mu1Side::AboveHalf), back));
  Json forged = j;
  forged["witness"]["delta"] = "1/2";
  CHECK_FALSE(verify_witness(y, two_by_one_plane_polarization(Mu1Side::AboveHalf),
                             stability_verdict_from_json(sys, forged)));
}

TEST_CASE("decider and search never contradict") {
  auto sys = plane_two_by_one();
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    auto x = random_morphism(sys, seed, 1, 55);
    for (auto side : {Mu1Side::AboveHalf, Mu1Side::BelowHalf}) {
      auto pol = two_by_one_plane_polarization(side);
      auto exact = decide_two_by_one_plane(x, side);
      auto found = destabilizer_search(x, pol, {600, seed, true});
      if (found.status == StabilityStatus::Unstable) CHECK(exact.status == StabilityStatus::Unstable);
      if (exact.witness) CHECK(verify_witness(x, pol, exact));
      if (found.witness) CHECK(verify_witness(x, pol, found));
    }
  }
}

TEST_CASE("exhaustive branch matches enumeration on unit multiplicities") {
  std::vector<ProblemSpec> shapes = {ProblemSpec{2, {-2, -1}, {1, 1}, {0}, {1}},
                                     ProblemSpec{2, {-2, -1}, {1, 1}, {0, 1}, {1, 1}},
                                     ProblemSpec{2, {-3, -2, -1}, {1, 1, 1}, {0}, {1}}};
  std::mt19937_64 rng(17);
  for (const auto& spec : shapes) {
    auto sys = build_line_bundle_system(spec);
    int unstable = 0;
    for (uint64_t seed = 0; seed < 60; ++seed) {
      auto w = random_morphism(sys, 500 + seed, 1, 85);
      auto pol = random_pol(rng, spec.r(), spec.s());
      auto oracle = brute_force(w, pol);
      auto ex = reductive_exhaustive(w, pol);
      CHECK(ex.status == oracle);
      auto red = destabilizer_search(w, pol, {1000, seed, false});
      if (oracle == StabilityStatus::StableExact) CHECK(red.status == StabilityStatus::NoDestabilizerFound);
      else CHECK(red.status == oracle);
      if (oracle == StabilityStatus::Unstable) ++unstable;

      // Scaling the character leaves the verdict alone.
      Polarization scaled = pol;
      for (auto& x : scaled.lambda) x *= 3;
      for (auto& x : scaled.mu) x *= 3;
      CHECK(reductive_exhaustive(w, scaled).status == ex.status);

      // G_red-orbit invariance, with the witness transported.
      auto g = random_reductive(sys, seed + 9, 2);
      auto moved = act(g, w);
      auto exm = reductive_exhaustive(moved, pol);
      CHECK(exm.status == ex.status);
      if (ex.witness) {
        SubspaceFamily t = ex.witness->family;
        for (int i = 0; i < spec.r(); ++i) t.mprime[i] = g.g[i] * t.mprime[i];
        for (int l = 0; l < spec.s(); ++l) t.nprime[l] = g.hh[l] * t.nprime[l];
        CHECK(is_invariant(moved, t));
      }
    }
    CHECK(unstable > 0);
  }
}

TEST_CASE("the explicit stable matrix has no destabilizer") {
  auto sys = build_line_bundle_system(ProblemSpec{3, {-2, -1}, {1, 1}, {0, 1}, {1, 3}});
  Blocks b = {{{{"x2^2 - x1*x3"}}, {{"x0"}}}, {{{"x0^3"}, {"x1^3"}, {"x2^3"}}, {{"x1^2"}, {"x2^2"}, {"x3^2"}}}};
  auto w = morphism_from_polynomials(sys, b);
  // λ_2 ∈ (4/5, 1), 1 - μ_1 ∈ (0, 3/7).
  for (auto [lam2, y] : {std::pair{q(9, 10), q(1, 5)}, std::pair{q(17, 20), q(2, 5)}}) {
    Rational mu1 = 1 - y;
    Polarization pol{{1 - lam2, lam2}, {mu1, (1 - mu1) / 3}};
    auto v = g_stability_sample(w, pol, 4, 3);
    CHECK(v.status == StabilityStatus::NoDestabilizerFound);
  }
}

TEST_CASE("bad input") {
  auto w = wall_matrix();
  CHECK_THROWS_AS(destabilizer_search(w, Polarization{{q(1, 2), q(1, 2)}, {q(1, 3)}}), SchemaError);
  CHECK_THROWS_AS(destabilizer_search(w, at_t(q(7, 10)), {0, 1, true}), SchemaError);
  CHECK_THROWS_AS(decide_two_by_one_plane(w, Mu1Side::AboveHalf), SchemaError);
  CHECK_THROWS_AS(reductive_exhaustive(w, at_t(q(7, 10))), SchemaError);
}
