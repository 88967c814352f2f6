// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cstring>

#include "xchan/phy.hpp"

using namespace xchan;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ChannelMatrix ones{1, 1, 1, 1};

template <std::size_t N>
std::array<cplx, N> symbols(RandomStream& g) {
  std::array<cplx, N> x;
  FadingSampler s(FadingModel::rayleigh());
  for (auto& v : x) v = s(g);
  return x;
}

// Solves [[a, b], [0, c]] u = y.
std::array<cplx, 2> back_substitute(const std::array<std::array<cplx, 2>, 2>& m, cplx y0, cplx y1) {
  cplx u1 = y1 / m[1][1];
  return {(y0 - m[0][1] * u1) / m[0][0], u1};
}

bool same_bits(cplx a, cplx b) { return std::memcmp(&a, &b, sizeof(cplx)) == 0; }

}  // namespace

TEST_CASE("pair scheme decodes exactly without noise") {
  RandomStream g(1);
  for (int k = 0; k < 200; ++k) {
    auto h1 = draw_channel(FadingModel::rayleigh(), g), h2 = draw_channel(FadingModel::rayleigh(), g);
    auto x = symbols<3>(g);
    const double P = 10.0;
    auto t = co1_simulate(h1, h2, P, x, std::array<cplx, 4>{});
    const double s = std::sqrt(P);
    // Rx1 sees V over (X1(1), X2(1)) in its two slots; the second row is
    // upper-triangular because Rx1 only hears Tx2 in slot 2.
    REQUIRE(std::abs(t.rx1_system[1][0]) == 0.0);
    auto u = back_substitute(t.rx1_system, t.y1[0] / s, t.y1[1] / s);
    CHECK(std::abs(u[0] - x[0]) < 1e-9);
    CHECK(std::abs(u[1] - x[1]) < 1e-9);
    // Rx2 removes X2(1) and keeps X1(2).
    CHECK(std::abs(t.rx2_residual - h2.h21 * s * x[2]) < 1e-9);
    CHECK(std::abs(t.rx2_residual_form.x[1]) < 1e-12);
  }
}

TEST_CASE("pair scheme SNR example") {
  CHECK(co1_rx2_snr(ones, ones, 1.0) == 0.5);
  auto t = co1_simulate(ones, ones, 1.0, {1, 1, 1}, std::array<cplx, 4>{});
  CHECK(t.rx2_snr == 0.5);
  CHECK(t.rx2_residual_form.noise_variance() == 2.0);
}

TEST_CASE("triple scheme decodes exactly without noise") {
  RandomStream g(2);
  for (int k = 0; k < 200; ++k) {
    std::array<ChannelMatrix, 3> h;
    for (auto& m : h) m = draw_channel(FadingModel::rayleigh(), g);
    auto x = symbols<4>(g);
    const double P = 3.0, s = std::sqrt(P);
    auto t = co2_simulate(h[0], h[1], h[2], P, x, std::array<cplx, 6>{});
    auto u = back_substitute(t.rx1_system, t.y1[1] / s, t.rx1_residual / s);
    CHECK(std::abs(u[0] - x[3]) < 1e-9);  // X2(2)
    CHECK(std::abs(u[1] - x[2]) < 1e-9);  // X1(2)
    auto w = back_substitute(t.rx2_system, t.y2[0] / s, t.rx2_residual / s);
    CHECK(std::abs(w[0] - x[0]) < 1e-9);  // X1(1)
    CHECK(std::abs(w[1] - x[1]) < 1e-9);  // X2(1)
    CHECK(std::abs(t.rx1_residual_form.x[1]) < 1e-12);
    CHECK(std::abs(t.rx2_residual_form.x[2]) < 1e-12);
  }
}

TEST_CASE("triple scheme with unit gains") {
  auto t = co2_simulate(ones, ones, ones, 1.0, {1, 2, 3, 4}, std::array<cplx, 6>{});
  CHECK(t.rx1_system[0][0] == cplx(1));
  CHECK(t.rx1_system[0][1] == cplx(1));
  CHECK(t.rx1_system[1][0] == cplx(0));
  CHECK(t.rx1_system[1][1] == cplx(1));
  CHECK(t.rx1_residual == cplx(3));
  CHECK(t.rx2_residual == cplx(2));
  CHECK(t.y1[1] == cplx(7));
  // det(diag(1, 2) + [[2, 1], [1, 1]]) / 2 = 4
  CHECK_THAT(co2_rx1_rate(ones, ones, ones, 1.0), WithinAbs(2.0, 1e-14));
}

TEST_CASE("mirrored triple equals the relabelled scheme at the other receiver") {
  RandomStream g(3);
  const std::array<Topology, 3> slots{Topology::z1, Topology::z3, Topology::f};
  for (int k = 0; k < 100; ++k) {
    std::array<ChannelMatrix, 3> h;
    for (auto& m : h) m = draw_channel(FadingModel::rayleigh(), g);
    auto x = symbols<4>(g);
    auto z = symbols<6>(g);
    const double P = 7.0;
    auto t = co2_simulate_mirror(h[0], h[1], h[2], P, x, z);
    CHECK(t.mirrored);
    const std::size_t tx1[3] = {0, 2, 2}, tx2[3] = {1, 3, 1};
    for (std::size_t n = 0; n < 3; ++n) {
      // The mirrored "Rx1" is the caller's Rx2.
      auto y = detail::received<4, 6>(h[n], topology_links(slots[n]), 2, P, tx1[n], tx2[n], 2 * n + 1);
      CHECK(std::abs(t.y1[n] - (y.signal(x) + y.noise(z))) < 1e-12);
    }
    auto direct = co2_simulate(h[0].swap_receivers(), h[1].swap_receivers(), h[2].swap_receivers(), P, x,
                               std::array<cplx, 6>{z[1], z[0], z[3], z[2], z[5], z[4]});
    CHECK(same_bits(direct.rx1_residual, t.rx1_residual));
    CHECK(same_bits(direct.rx2_residual, t.rx2_residual));
  }
}

TEST_CASE("reconstruction residual does not depend on symbols or power") {
  RandomStream g(4);
  for (Topology a : {Topology::z1, Topology::z4}) {
    for (int k = 0; k < 200; ++k) {
      auto h = draw_channel(FadingModel::rayleigh(), g);
      auto v = symbols<2>(g);
      auto z = symbols<3>(g);
      auto base = reconstruction_residual(a, h, v[0], v[1], 1.0, symbols<2>(g), z);
      for (double P : {1.0, 1e3, 1e6}) {
        auto t = reconstruction_residual(a, h, v[0], v[1], P, symbols<2>(g), z);
        REQUIRE(same_bits(t.residual_noise, base.residual_noise));
        CHECK(t.variance == base.variance);
        const double scale = std::sqrt(P) * (1 + std::abs(h.h21) + std::abs(h.h22));
        for (cplx c : t.residual_form.x) CHECK(std::abs(c) <= 1e-12 * scale);
        CHECK(std::abs(t.residual - t.residual_noise) <= 1e-12 * scale * 10);
      }
      if (a == Topology::z1) CHECK_THAT(base.variance, WithinRel(reconstruction_variance(h, v[0], v[1]), 1e-12));
    }
  }
}

TEST_CASE("reconstruction residual variance matches sampling") {
  RandomStream g(5);
  auto h = draw_channel(FadingModel::rayleigh(), g);
  const cplx v1 = 0.7, v2 = cplx(0.1, -0.9);
  Moments re, im;
  for (int k = 0; k < 200000; ++k) {
    auto t = reconstruction_residual(Topology::z1, h, v1, v2, 100.0, symbols<2>(g), g);
    re.add(t.residual_noise.real());
    im.add(t.residual_noise.imag());
  }
  const double want = reconstruction_variance(h, v1, v2);
  CHECK_THAT(re.variance() + im.variance(), WithinRel(want, 0.02));
}

TEST_CASE("reconstruction preconditions") {
  CHECK_THROWS_AS(reconstruction_residual(Topology::z2, ones, 1, 2, 1.0, {1, 1}, std::array<cplx, 3>{}), PreconditionError);
  CHECK_THROWS_AS(reconstruction_residual(Topology::z1, ones, 1, 1, 1.0, {1, 1}, std::array<cplx, 3>{}), SingularError);
  CHECK_THROWS_AS(reconstruction_variance(ones, 1, 1), SingularError);
  ChannelMatrix dead{1, 1, 1, 0};
  CHECK_THROWS_AS(co1_rx2_snr(dead, ones, 1.0), SingularError);
  CHECK_THROWS_AS(f_integrand(dead), SingularError);
}

TEST_CASE("unit-modulus closed forms") {
  auto t = closed_form_uniform_phase(1.0);
  CHECK(t.A.value == 1.0);
  CHECK_THAT(t.B.value, WithinAbs(std::log2(3.0), 1e-15));
  CHECK_THAT(t.C.value, WithinAbs(2.9068905956085187, 1e-12));
  CHECK_THAT(t.D.value, WithinAbs(4.0, 1e-15));
  for (double db = 0; db <= 90; db += 5) {
    auto c = closed_form_uniform_phase(db_to_linear(db));
    CHECK(c.g1.value <= 3.0);
    CHECK(c.g2.value <= 6.0);
    CHECK(c.g1.value > 0.0);
  }
  CHECK_THROWS_AS(closed_form_uniform_phase(0.0), ValidationError);
}

TEST_CASE("Monte Carlo agrees with the unit-modulus closed forms") {
  for (double P : {1.0, 10.0, 1e4}) {
    auto mc = estimate_rate_terms(FadingModel::uniform_phase(), P, 20000, 9);
    auto cf = closed_form_uniform_phase(P);
    CHECK_THAT(mc.A.value, WithinRel(cf.A.value, 1e-12));
    CHECK_THAT(mc.B.value, WithinRel(cf.B.value, 1e-12));
    CHECK_THAT(mc.C.value, WithinRel(cf.C.value, 1e-12));
    CHECK_THAT(mc.D.value, WithinRel(cf.D.value, 1e-12));
    CHECK(std::abs(mc.E->value - 1.8999686269529916) <= 3 * mc.E->se);
    CHECK_THAT(mc.F->value, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("Rayleigh and Rice(1) bound constants") {
  auto r = estimate_rate_terms(FadingModel::rayleigh(), 100.0, 400000, 11);
  CHECK(r.A.value <= r.B.value);
  CHECK(r.C.value <= 2 * r.B.value + r.A.value);
  CHECK_THAT(r.E->value, WithinAbs(1.0 / std::numbers::ln2, 0.01));
  CHECK_THAT(r.F->value, WithinAbs(1.0 / std::numbers::ln2, 0.01));
  auto c = estimate_rate_terms(FadingModel::rice(1.0, false), 100.0, 400000, 11);
  CHECK_THAT(c.E->value, WithinAbs(1.663, 0.01));
  CHECK_THAT(c.F->value, WithinAbs(1.378, 0.01));
}

TEST_CASE("estimates do not depend on the thread count") {
  auto a = estimate_rate_terms(FadingModel::rayleigh(), 1000.0, 50000, 13, 1);
  auto b = estimate_rate_terms(FadingModel::rayleigh(), 1000.0, 50000, 13, 4);
  CHECK(a.A.value == b.A.value);
  CHECK(a.C.value == b.C.value);
  CHECK(a.D.value == b.D.value);
  CHECK(a.E->value == b.E->value);
  CHECK(a.D.se == b.D.se);
  CHECK_THROWS_AS(estimate_rate_terms(FadingModel::rayleigh(), 1.0, 0, 1), ValidationError);
  CHECK_THROWS_AS(estimate_rate_terms(FadingModel::rayleigh(), -1.0, 10, 1), ValidationError);
}

TEST_CASE("decibel conversions") {
  CHECK(db_to_linear(30.0) == 1000.0);
  CHECK_THAT(linear_to_db(2.0), WithinAbs(3.0102999566398120, 1e-14));
}
