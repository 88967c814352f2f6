// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "xchan/channel.hpp"
#include "xchan/error.hpp"
#include "xchan/parallel.hpp"
#include "xchan/random.hpp"

namespace xchan {

inline double log2p1(double x) { return std::log1p(x) / std::numbers::ln2; }

// Linear combination of NS unit-power symbols and NZ unit-variance noises.
template <std::size_t NS, std::size_t NZ>
struct LinearForm {
  std::array<cplx, NS> x{};
  std::array<cplx, NZ> z{};

  LinearForm& operator-=(const LinearForm& o) {
    for (std::size_t i = 0; i < NS; ++i) x[i] -= o.x[i];
    for (std::size_t i = 0; i < NZ; ++i) z[i] -= o.z[i];
    return *this;
  }
  friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
  friend LinearForm operator*(cplx c, LinearForm a) {
    for (auto& v : a.x) v *= c;
    for (auto& v : a.z) v *= c;
    return a;
  }

  cplx signal(const std::array<cplx, NS>& xs) const {
    cplx s = 0;
    for (std::size_t i = 0; i < NS; ++i) s += x[i] * xs[i];
    return s;
  }
  cplx noise(const std::array<cplx, NZ>& zs) const {
    cplx s = 0;
    for (std::size_t i = 0; i < NZ; ++i) s += z[i] * zs[i];
    return s;
  }
  double noise_variance() const {
    double v = 0;
    for (auto c : z) v += std::norm(c);
    return v;
  }
};

namespace detail {

inline void require_nonzero(cplx h, const char* what) {
  if (h == cplx(0, 0)) throw SingularError(std::string("cancellation needs nonzero ") + what);
}

// Y_j = sum over connected i of h_ji sqrt(P) X_i + Z_j.
template <std::size_t NS, std::size_t NZ>
LinearForm<NS, NZ> received(const ChannelMatrix& h, Connectivity c, int rx, double P, std::size_t sym_tx1,
                            std::size_t sym_tx2, std::size_t noise) {
  LinearForm<NS, NZ> y;
  const double a = std::sqrt(P);
  if (c.link(rx, 1)) y.x[sym_tx1] += h(rx, 1) * a;
  if (c.link(rx, 2)) y.x[sym_tx2] += h(rx, 2) * a;
  y.z[noise] = 1.0;
  return y;
}

template <std::size_t N, class Urbg>
std::array<cplx, N> complex_noise(Urbg& g) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  std::array<cplx, N> z;
  for (auto& v : z) {
    double re = n(g);
    v = {re, n(g)};
  }
  return z;
}

// det(diag(d1, d2) + P M M^H) for M = [[a, b], [0, c]], expanded so every
// term is nonnegative.
inline double det_diag_plus(double d1, double d2, double P, cplx a, cplx b, cplx c) {
  double r1 = std::norm(a) + std::norm(b);
  double r2 = std::norm(c);
  double dm = std::norm(a * c);
  return d1 * d2 + P * (d2 * r1 + d1 * r2) + P * P * dm;
}

}  // namespace detail

// ---------------------------------------------------------------- rate pieces

// Rx1 of the {z1, z2} pair: log|I + P V V^H|, V = [[h11(1), h12(1)], [0, h12(2)]].
inline double co1_rx1_rate(const ChannelMatrix& h1, const ChannelMatrix& h2, double P) {
  return std::log2(detail::det_diag_plus(1, 1, P, h1.h11, h1.h12, h2.h12));
}

inline double co1_rx2_snr(const ChannelMatrix& h1, const ChannelMatrix& h2, double P) {
  detail::require_nonzero(h1.h22, "h22 in the first slot");
  return std::norm(h2.h21) * P / (1 + std::norm(h2.h22) / std::norm(h1.h22));
}

inline double co1_rx2_rate(const ChannelMatrix& h1, const ChannelMatrix& h2, double P) {
  return log2p1(co1_rx2_snr(h1, h2, P));
}

inline double co1_rate(const ChannelMatrix& h1, const ChannelMatrix& h2, double P) {
  return co1_rx1_rate(h1, h2, P) + co1_rx2_rate(h1, h2, P);
}

// Rx1 of the {z2, z4, f} triple, U = [[h12(2), h11(2)], [0, h11(3)]].
inline double co2_rx1_rate(const ChannelMatrix& h1, const ChannelMatrix& h2, const ChannelMatrix& h3, double P) {
  detail::require_nonzero(h1.h12, "h12 in the first slot");
  double g = std::norm(h3.h12) / std::norm(h1.h12);
  return std::log2(detail::det_diag_plus(1, 1 + g, P, h2.h12, h2.h11, h3.h11) / (1 + g));
}

// Rx2 of the same triple, W = [[h21(1), h22(1)], [0, h22(3)]].
inline double co2_rx2_rate(const ChannelMatrix& h1, const ChannelMatrix& h2, const ChannelMatrix& h3, double P) {
  detail::require_nonzero(h2.h21, "h21 in the second slot");
  double g = std::norm(h3.h21) / std::norm(h2.h21);
  return std::log2(detail::det_diag_plus(1, 1 + g, P, h1.h21, h1.h22, h3.h22) / (1 + g));
}

inline double co2_rate(const ChannelMatrix& h1, const ChannelMatrix& h2, const ChannelMatrix& h3, double P) {
  return co2_rx1_rate(h1, h2, h3, P) + co2_rx2_rate(h1, h2, h3, P);
}

// Variance of the Rx2 reconstruction residual in topology z1 from the Rx1
// output and a virtual Rx1 output with coefficients (v1, v2).
inline double reconstruction_variance(const ChannelMatrix& h, cplx v1, cplx v2) {
  cplx det = h.h11 * v2 - h.h12 * v1;
  if (det == cplx(0, 0)) throw SingularError("reconstruction matrix is singular");
  return 1 + std::norm(h.h22) * (std::norm(v1) + std::norm(h.h11)) / std::norm(det);
}

inline double e_integrand(const ChannelMatrix& h, cplx v1, cplx v2) {
  return std::log2(reconstruction_variance(h, v1, v2));
}

inline double f_integrand(const ChannelMatrix& h) {
  detail::require_nonzero(h.h22, "h22");
  return log2p1(std::norm(h.h12) / std::norm(h.h22));
}

// ------------------------------------------------------------ scheme traces

// Symbols X1(1), X2(1), X1(2); noises Z1(1), Z2(1), Z1(2), Z2(2).
struct Co1Trace {
  using Form = LinearForm<3, 4>;
  double P = 1;
  std::array<ChannelMatrix, 2> h;
  std::array<cplx, 3> x{};
  std::array<cplx, 4> z{};
  std::array<Form, 2> y1_form, y2_form;  // per slot
  std::array<cplx, 2> y1, y2;            // observed outputs
  std::array<std::array<cplx, 2>, 2> rx1_system{};  // V over (X1(1), X2(1))
  Form rx2_residual_form;
  cplx rx2_residual = 0;        // computed from observed outputs
  cplx rx2_residual_noise = 0;  // noise part of the residual form
  double rx2_snr = 0;
};

inline Co1Trace co1_simulate(const ChannelMatrix& h1, const ChannelMatrix& h2, double P,
                             const std::array<cplx, 3>& x, const std::array<cplx, 4>& z) {
  using detail::received;
  detail::require_nonzero(h1.h22, "h22 in the first slot");
  Co1Trace t;
  t.P = P;
  t.h = {h1, h2};
  t.x = x;
  t.z = z;
  const auto c1 = topology_links(Topology::z1), c2 = topology_links(Topology::z2);
  t.y1_form[0] = received<3, 4>(h1, c1, 1, P, 0, 1, 0);
  t.y2_form[0] = received<3, 4>(h1, c1, 2, P, 0, 1, 1);
  t.y1_form[1] = received<3, 4>(h2, c2, 1, P, 2, 1, 2);
  t.y2_form[1] = received<3, 4>(h2, c2, 2, P, 2, 1, 3);
  for (int n = 0; n < 2; ++n) {
    t.y1[n] = t.y1_form[n].signal(x) + t.y1_form[n].noise(z);
    t.y2[n] = t.y2_form[n].signal(x) + t.y2_form[n].noise(z);
  }
  t.rx1_system = {{{h1.h11, h1.h12}, {cplx(0), h2.h12}}};
  const cplx r = h2.h22 / h1.h22;
  t.rx2_residual_form = t.y2_form[1] - r * t.y2_form[0];
  t.rx2_residual = t.y2[1] - r * t.y2[0];
  t.rx2_residual_noise = t.rx2_residual_form.noise(z);
  t.rx2_snr = co1_rx2_snr(h1, h2, P);
  return t;
}

template <std::uniform_random_bit_generator Urbg>
Co1Trace co1_simulate(const ChannelMatrix& h1, const ChannelMatrix& h2, double P, const std::array<cplx, 3>& x,
                      Urbg& g) {
  return co1_simulate(h1, h2, P, x, detail::complex_noise<4>(g));
}

// Symbols X1(1), X2(1), X1(2), X2(2); noises Z1(n), Z2(n) for n = 1..3 in
// the order Z1(1), Z2(1), Z1(2), Z2(2), Z1(3), Z2(3). With mirrored set the
// slots are (z1, z3, f) and the receiver labels of every field are swapped.
struct Co2Trace {
  using Form = LinearForm<4, 6>;
  double P = 1;
  bool mirrored = false;
  std::array<ChannelMatrix, 3> h;  // as seen after relabelling
  std::array<cplx, 4> x{};
  std::array<cplx, 6> z{};
  std::array<Form, 3> y1_form, y2_form;
  std::array<cplx, 3> y1, y2;
  std::array<std::array<cplx, 2>, 2> rx1_system{};  // U over (X2(2), X1(2))
  std::array<std::array<cplx, 2>, 2> rx2_system{};  // W over (X1(1), X2(1))
  Form rx1_residual_form, rx2_residual_form;
  cplx rx1_residual = 0, rx2_residual = 0;
  cplx rx1_residual_noise = 0, rx2_residual_noise = 0;
};

inline Co2Trace co2_simulate(const ChannelMatrix& h1, const ChannelMatrix& h2, const ChannelMatrix& h3, double P,
                             const std::array<cplx, 4>& x, const std::array<cplx, 6>& z) {
  using detail::received;
  detail::require_nonzero(h1.h12, "h12 in the first slot");
  detail::require_nonzero(h2.h21, "h21 in the second slot");
  Co2Trace t;
  t.P = P;
  t.h = {h1, h2, h3};
  t.x = x;
  t.z = z;
  const std::array<Connectivity, 3> c = {topology_links(Topology::z2), topology_links(Topology::z4),
                                         topology_links(Topology::f)};
  // (symbol of Tx1, symbol of Tx2) per slot
  const std::size_t tx1[3] = {0, 2, 2}, tx2[3] = {1, 3, 1};
  for (std::size_t n = 0; n < 3; ++n) {
    t.y1_form[n] = received<4, 6>(t.h[n], c[n], 1, P, tx1[n], tx2[n], 2 * n);
    t.y2_form[n] = received<4, 6>(t.h[n], c[n], 2, P, tx1[n], tx2[n], 2 * n + 1);
    t.y1[n] = t.y1_form[n].signal(x) + t.y1_form[n].noise(z);
    t.y2[n] = t.y2_form[n].signal(x) + t.y2_form[n].noise(z);
  }
  t.rx1_system = {{{h2.h12, h2.h11}, {cplx(0), h3.h11}}};
  t.rx2_system = {{{h1.h21, h1.h22}, {cplx(0), h3.h22}}};
  const cplx r1 = h3.h12 / h1.h12;
  const cplx r2 = h3.h21 / h2.h21;
  t.rx1_residual_form = t.y1_form[2] - r1 * t.y1_form[0];
  t.rx2_residual_form = t.y2_form[2] - r2 * t.y2_form[1];
  t.rx1_residual = t.y1[2] - r1 * t.y1[0];
  t.rx2_residual = t.y2[2] - r2 * t.y2[1];
  t.rx1_residual_noise = t.rx1_residual_form.noise(z);
  t.rx2_residual_noise = t.rx2_residual_form.noise(z);
  return t;
}

template <std::uniform_random_bit_generator Urbg>
Co2Trace co2_simulate(const ChannelMatrix& h1, const ChannelMatrix& h2, const ChannelMatrix& h3, double P,
                      const std::array<cplx, 4>& x, Urbg& g) {
  return co2_simulate(h1, h2, h3, P, x, detail::complex_noise<6>(g));
}

// The {z1, z3, f} scheme: the {z2, z4, f} scheme with receivers relabelled.
// Noises are given in the caller's receiver labels.
inline Co2Trace co2_simulate_mirror(const ChannelMatrix& h1, const ChannelMatrix& h2, const ChannelMatrix& h3,
                                    double P, const std::array<cplx, 4>& x, const std::array<cplx, 6>& z) {
  std::array<cplx, 6> zs = {z[1], z[0], z[3], z[2], z[5], z[4]};
  Co2Trace t = co2_simulate(h1.swap_receivers(), h2.swap_receivers(), h3.swap_receivers(), P, x, zs);
  t.mirrored = true;
  return t;
}

// Symbols X1, X2; noises Z1, Z1~ (virtual receiver), Z2.
struct ReconstructionTrace {
  using Form = LinearForm<2, 3>;
  Topology topology = Topology::z1;
  std::array<std::array<cplx, 2>, 2> m{};  // rows (h11, h12) and (v1, v2)
  std::array<cplx, 2> rx2_row{};           // Rx2 coefficients on (X1, X2)
  Form residual_form;
  cplx residual = 0;        // from observed outputs
  cplx residual_noise = 0;  // noise-only expression, no symbol enters it
  double variance = 0;
};

inline ReconstructionTrace reconstruction_residual(Topology a, const ChannelMatrix& h, cplx v1, cplx v2, double P,
                                   const std::array<cplx, 2>& x, const std::array<cplx, 3>& z) {
  if (a != Topology::z1 && a != Topology::z4)
    throw PreconditionError("reconstruction applies to topologies z1 and z4 only");
  ReconstructionTrace t;
  t.topology = a;
  t.m = {{{h.h11, h.h12}, {v1, v2}}};
  const cplx det = h.h11 * v2 - h.h12 * v1;
  if (det == cplx(0, 0)) throw SingularError("reconstruction matrix is singular");
  const auto c = topology_links(a);
  t.rx2_row = {c.c21 ? h.h21 : cplx(0), c.c22 ? h.h22 : cplx(0)};
  // w = rx2_row * M^{-1}
  const cplx w1 = (t.rx2_row[0] * v2 - t.rx2_row[1] * v1) / det;
  const cplx w2 = (t.rx2_row[1] * h.h11 - t.rx2_row[0] * h.h12) / det;

  const double s = std::sqrt(P);
  ReconstructionTrace::Form y1, yv, y2;
  y1.x = {h.h11 * s, h.h12 * s};
  y1.z[0] = 1.0;
  yv.x = {v1 * s, v2 * s};
  yv.z[1] = 1.0;
  y2.x = {t.rx2_row[0] * s, t.rx2_row[1] * s};
  y2.z[2] = 1.0;
  t.residual_form = y2 - w1 * y1 - w2 * yv;
  // The noise-only expression is built from coefficients that never see P
  // or the symbols.
  t.residual_noise = z[2] - (w1 * z[0] + w2 * z[1]);
  const cplx o1 = y1.signal(x) + z[0], ov = yv.signal(x) + z[1], o2 = y2.signal(x) + z[2];
  t.residual = o2 - (w1 * o1 + w2 * ov);
  t.variance = 1 + std::norm(w1) + std::norm(w2);
  return t;
}

template <std::uniform_random_bit_generator Urbg>
ReconstructionTrace reconstruction_residual(Topology a, const ChannelMatrix& h, cplx v1, cplx v2, double P,
                            const std::array<cplx, 2>& x, Urbg& g) {
  return reconstruction_residual(a, h, v1, v2, P, x, detail::complex_noise<3>(g));
}

// ------------------------------------------------------------ ergodic terms

struct Estimate {
  double value = 0;
  double se = 0;
};

struct RateTerms {
  FadingModel model;
  double P = 1;
  std::size_t n_mc = 0;  // 0 for closed forms
  Estimate A, B, C, D;
  std::optional<Estimate> E, F;
  Estimate g1;  // A + 2B - C, per sample
  Estimate g2;  // 4B - D, per sample
};

inline RateTerms closed_form_uniform_phase(double P) {
  if (!(P > 0) || !std::isfinite(P)) throw ValidationError("power must be positive and finite");
  RateTerms t;
  t.model = FadingModel::uniform_phase();
  t.P = P;
  t.A.value = std::log2(1 + P);
  t.B.value = std::log2(1 + 2 * P);
  t.C.value = std::log2(1 + P / 2) + std::log2(P * P + 3 * P + 1);
  t.D.value = 2 * std::log2(P * P / 2 + 5 * P / 2 + 1);
  t.g1.value = t.A.value + 2 * t.B.value - t.C.value;
  t.g2.value = 4 * t.B.value - t.D.value;
  return t;
}

inline constexpr std::size_t rate_block = 4096;

// Monte Carlo estimate of A..F. Each block of rate_block samples draws from
// its own stream derived from (seed, block), so results do not depend on the
// thread count. Equal seeds at different P reuse the same channel draws.
inline RateTerms estimate_rate_terms(const FadingModel& model, double P, std::size_t n_mc, std::uint64_t seed,
                                     unsigned threads = 0) {
  if (n_mc == 0) throw ValidationError("n_mc must be positive");
  if (!(P > 0) || !std::isfinite(P)) throw ValidationError("power must be positive and finite");
  enum { iA, iB, iC, iD, iE, iF, iG1, iG2, nq };
  using Acc = std::array<Moments, nq>;
  const std::size_t blocks = (n_mc + rate_block - 1) / rate_block;
  std::vector<Acc> parts(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    RandomStream rng = RandomStream::derive(seed, b);
    FadingSampler s(model);
    Acc acc;
    const std::size_t lo = b * rate_block, hi = std::min(n_mc, lo + rate_block);
    for (std::size_t k = lo; k < hi; ++k) {
      ChannelMatrix m0 = draw_channel(s, rng);
      ChannelMatrix c1 = draw_channel(s, rng), c2 = draw_channel(s, rng);
      ChannelMatrix d1 = draw_channel(s, rng), d2 = draw_channel(s, rng), d3 = draw_channel(s, rng);
      cplx v1 = s(rng), v2 = s(rng);
      double a = log2p1(std::norm(m0.h11) * P);
      double bb = log2p1((std::norm(m0.h11) + std::norm(m0.h12)) * P);
      double c = co1_rate(c1, c2, P);
      double d = 2 * co2_rx1_rate(d1, d2, d3, P);
      acc[iA].add(a);
      acc[iB].add(bb);
      acc[iC].add(c);
      acc[iD].add(d);
      acc[iE].add(e_integrand(m0, v1, v2));
      acc[iF].add(f_integrand(m0));
      acc[iG1].add(a + 2 * bb - c);
      acc[iG2].add(4 * bb - d);
    }
    parts[b] = acc;
  }, threads);
  Acc tot = tree_reduce(std::move(parts), [](Acc& x, const Acc& y) {
    for (int q = 0; q < nq; ++q) x[q].merge(y[q]);
  });
  auto est = [&](int q) { return Estimate{tot[q].mean, tot[q].std_error()}; };
  RateTerms t;
  t.model = model;
  t.P = P;
  t.n_mc = n_mc;
  t.A = est(iA);
  t.B = est(iB);
  t.C = est(iC);
  t.D = est(iD);
  t.E = est(iE);
  t.F = est(iF);
  t.g1 = est(iG1);
  t.g2 = est(iG2);
  return t;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace xchan
