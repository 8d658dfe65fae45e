#include <doctest.h>

#include <cmath>

#include "spdc/autocorr.hpp"
#include "spdc/interference.hpp"

using namespace spdc;
using doctest::Approx;

namespace {

SetupConfig bbo_setup(double l_mm, double sigma = kNoFilter) {
  SetupConfig s;
  s.crystal = {3.0, 57.05e-13, 56.2e-13, 54.26e-13, 0.0, 0.0, 0.0};
  s.pump_in = {1.55e-13, 0.0};
  s.delay = {51.81e-13, 52.08e-13, 0.0, 0.0, l_mm};
  s.filters = {sigma, sigma};
  return s;
}

double sigma_nm(double fwhm_nm) {
  return filter_width_from_wavelength(fwhm_nm, 795.0);
}

// Delay-line length at the dip center (tau_l = DL/2).
constexpr double kDipCenter = 2.91e-13 / 0.27e-13;  // 10.7778 mm

// Independent erf-form oracle evaluated from scratch.
double rho_erf(double tau_Di, double a_i, double dtau, double D,
               double Lambda, double L) {
  const double tp = tau_Di / std::sqrt(1.0 + a_i * a_i);
  const double m = 0.5 * D * L - std::abs(dtau);
  if (m <= 0.0) return 0.0;
  return std::sqrt(kPi / 2.0) * tp / (std::abs(Lambda) * L) *
         std::erf(std::sqrt(2.0) * std::abs(Lambda) * m / (D * tp));
}

}  // namespace

TEST_SUITE("interference") {

TEST_CASE("dip-center value and visibility for the reference setup") {
  SetupConfig s = bbo_setup(0.0);
  // tau_l(l0) = DL/2 exactly at l0 = 10.777... mm.
  CHECK(kDipCenter == Approx(10.7778).epsilon(1e-4));
  const double rho0 = rho_analytic(s, kDipCenter);
  CHECK(rho0 == Approx(0.35565).epsilon(2e-4));
  CHECK(visibility(rho0) == Approx(0.21629).epsilon(2e-4));
  // Live oracle across the dip.
  for (double l : {0.0, 4.0, 8.0, 10.7778, 13.0, 17.0, 21.0, 25.0}) {
    SetupConfig at = s;
    at.delay.length_l = l;
    const double expected =
        rho_erf(1.55e-13, 0.0, at.dtau_l(), 1.94e-13, 1.82e-13, 3.0);
    CHECK(rho_analytic(s, l) == Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("long pulses approach the cw triangular dip") {
  SetupConfig s = bbo_setup(0.0);
  s.pump_in.tau_D = 1e-11;
  const double DL = 1.94e-13 * 3.0;
  CHECK(rho_analytic(s, kDipCenter) == Approx(1.0).epsilon(1e-2));
  for (double l : {2.0, 6.0, 10.0, 14.0, 18.0, 20.0}) {
    SetupConfig at = s;
    at.delay.length_l = l;
    const double triangle = 1.0 - 2.0 * std::abs(at.dtau_l()) / DL;
    CHECK(rho_analytic(s, l) == Approx(triangle).epsilon(1e-2));
  }
  // l = 0 sits exactly on the dip edge (dtau_l = -DL/2) and the term
  // vanishes outside the walk-off window on either side.
  CHECK(rho_analytic(s, 0.0) == 0.0);
  CHECK(rho_analytic(s, 24.0) == 0.0);
  CHECK(rho_analytic(s, 1.0) > 0.0);
}

TEST_CASE("Lambda = 0 gives the triangular dip exactly") {
  SetupConfig s = bbo_setup(0.0);
  s.crystal.inv_vp = 0.5 * (56.2e-13 + 54.26e-13);  // Lambda = 0
  const double DL = 1.94e-13 * 3.0;
  for (double l : {3.0, 6.7778, 10.7778, 14.7778, 18.0}) {
    SetupConfig at = s;
    at.delay.length_l = l;
    const double triangle =
        std::max(0.0, 1.0 - 2.0 * std::abs(at.dtau_l()) / DL);
    CHECK(rho_analytic(s, l) == Approx(triangle).epsilon(1e-9));
  }
}

TEST_CASE("numeric rho with very wide filters matches the closed form") {
  SetupConfig num = bbo_setup(0.0, sigma_nm(1000.0));
  SetupConfig ana = bbo_setup(0.0);
  QuadratureConfig cfg;
  const double peak = rho_analytic(ana, kDipCenter);
  for (int k = 0; k <= 20; ++k) {
    const double l = 21.0 * k / 20.0;
    const RhoResult r = rho_numeric(num, l, cfg);
    REQUIRE(r.converged);
    CHECK(std::abs(r.rho - rho_analytic(ana, l)) <= 0.02 * peak);
  }
}

TEST_CASE("rho is even in dtau_l for symmetric second-order dispersion") {
  // Valid whenever d1 = d2 and D1 = D2 (pump dispersion arbitrary).
  SetupConfig s = bbo_setup(0.0, sigma_nm(100.0));
  s.crystal.Dp = 1e-25;
  s.delay.d1 = 1e-25;
  s.delay.d2 = 1e-25;
  QuadratureConfig cfg;
  for (double dl : {2.0, 5.0, 8.0}) {
    const RhoResult plus = rho_numeric(s, kDipCenter + dl, cfg);
    const RhoResult minus = rho_numeric(s, kDipCenter - dl, cfg);
    REQUIRE(plus.converged);
    REQUIRE(minus.converged);
    CHECK(std::abs(plus.rho - minus.rho) <= 1e-6);
  }
}

TEST_CASE("rho depends on the pump only through its bandwidth parameter") {
  // (tau_Di, a_i) and (tau_Di sqrt(1+a^2), a) share b and must give the
  // same rate ratio even with strong, asymmetric dispersion.
  SetupConfig s1 = bbo_setup(13.0, sigma_nm(50.0));
  s1.crystal.Dp = 1e-25;
  s1.crystal.D1 = 2e-26;
  s1.delay.d1 = 3e-26;
  SetupConfig s2 = s1;
  s2.pump_in = {1.55e-13 * std::sqrt(5.0), 2.0};
  CHECK(s1.b() == Approx(s2.b()).epsilon(1e-12));
  QuadratureConfig cfg;
  const RhoResult r1 = rho_numeric(s1, 13.0, cfg);
  const RhoResult r2 = rho_numeric(s2, 13.0, cfg);
  REQUIRE(r1.converged);
  REQUIRE(r2.converged);
  CHECK(std::abs(r1.rho - r2.rho) <= 1e-9);

  // Same statement for the printed-precision pair (3.466e-13, 2).
  SetupConfig s3 = s1;
  s3.pump_in = {3.466e-13, 2.0};
  const RhoResult r3 = rho_numeric(s3, 13.0, cfg);
  CHECK(std::abs(r1.rho - r3.rho) <= 2e-4 * std::abs(r1.rho));
}

TEST_CASE("chirp lowers the visibility under pump dispersion") {
  SetupConfig flat = bbo_setup(0.0, sigma_nm(50.0));
  flat.crystal.Dp = 5e-26;
  SetupConfig chirped = flat;
  chirped.pump_in.chirp_a = 2.0;
  QuadratureConfig cfg;
  const RhoResult r0 = rho_numeric(flat, kDipCenter, cfg);
  const RhoResult r2 = rho_numeric(chirped, kDipCenter, cfg);
  REQUIRE(r0.converged);
  REQUIRE(r2.converged);
  CHECK(visibility(r2.rho) < visibility(r0.rho));
}

TEST_CASE("moderate pump dispersion raises a local peak at the dip bottom") {
  // The peak comes from the oscillating pump-correlation tail; its phase is
  // largest when Dp L / 4pi is comparable to 2b, i.e. Dp near 5e-26 here.
  SetupConfig s = bbo_setup(0.0, sigma_nm(50.0));
  s.crystal.Dp = 5e-26;
  QuadratureConfig cfg;
  const double rho_c = rho_numeric(s, kDipCenter, cfg).rho;
  const double rho_l = rho_numeric(s, kDipCenter - 2.15, cfg).rho;
  const double rho_r = rho_numeric(s, kDipCenter + 2.15, cfg).rho;
  // Rn = 1 - rho has a local maximum at the center: rho dips there.
  CHECK(rho_c < rho_l - 1e-3);
  CHECK(rho_c < rho_r - 1e-3);
  // It is still a coincidence dip overall.
  const double rho_far = rho_numeric(s, kDipCenter + 9.0, cfg).rho;
  CHECK(rho_l > rho_far);

  // Much stronger pump dispersion saturates the correlation phase below
  // pi/2 inside |w| < L, so the local peak disappears again.
  SetupConfig strong = s;
  strong.crystal.Dp = 3e-25;
  const double sc = rho_numeric(strong, kDipCenter, cfg).rho;
  const double sl = rho_numeric(strong, kDipCenter - 2.15, cfg).rho;
  const double sr = rho_numeric(strong, kDipCenter + 2.15, cfg).rho;
  CHECK(sc > sl);
  CHECK(sc > sr);
}

TEST_CASE("downconversion dispersion widens the dip and rings its border") {
  SetupConfig disp = bbo_setup(0.0, sigma_nm(50.0));
  disp.crystal.D1 = 1e-25;
  SetupConfig flat = bbo_setup(0.0, sigma_nm(50.0));
  QuadratureConfig cfg;
  // Asymmetry: the contrast maximum moves past the walk-off midpoint.
  const double disp_c = rho_numeric(disp, kDipCenter, cfg).rho;
  const double disp_s = rho_numeric(disp, kDipCenter + 2.0, cfg).rho;
  CHECK(disp_s > disp_c + 3e-3);
  // Widening: the dispersed dip keeps contrast beyond the walk-off support
  // edge at l = D L / (2 (1/g2 - 1/g1)) + L D / (1/g2 - 1/g1) ~ 21.6 mm,
  // where the flat curve has already vanished.
  CHECK(rho_numeric(disp, 24.0, cfg).rho > 0.02);
  CHECK(std::abs(rho_numeric(flat, 24.0, cfg).rho) < 1e-4);
  // Ringing: rho goes negative (Rn exceeds the background) past the border,
  // then swings back up.
  const double ring = rho_numeric(disp, 28.0, cfg).rho;
  CHECK(ring < -2e-3);
  CHECK(rho_numeric(disp, 30.0, cfg).rho > ring + 2e-3);
}

TEST_CASE("equal material dispersion cancels exactly") {
  SetupConfig disp = bbo_setup(0.0, sigma_nm(100.0));
  disp.delay.d1 = 1e-25;
  disp.delay.d2 = 1e-25;
  SetupConfig flat = bbo_setup(0.0, sigma_nm(100.0));
  QuadratureConfig cfg;
  for (double l : {2.0, 7.0, 10.7778, 14.0, 19.0, 25.0}) {
    const RhoResult with = rho_numeric(disp, l, cfg);
    const RhoResult without = rho_numeric(flat, l, cfg);
    REQUIRE(with.converged);
    REQUIRE(without.converged);
    CHECK(std::abs(with.rho - without.rho) <= 1e-8);
  }
}

TEST_CASE("overlap of a symmetric synthetic map gives rho = 1") {
  AmplitudeGrid g;
  g.t_axis = Eigen::VectorXd::LinSpaced(41, -8.0, 8.0);
  g.tau_axis = Eigen::VectorXd::LinSpaced(33, -8.0, 8.0);
  g.values.resize(41, 33);
  for (Eigen::Index i = 0; i < 41; ++i)
    for (Eigen::Index j = 0; j < 33; ++j) {
      const double t = g.t_axis[i], tau = g.tau_axis[j];
      g.values(i, j) = std::exp(Complex{-0.5 * (t * t + tau * tau), 0.3 * t});
    }
  CHECK(rho_overlap(g) == Approx(1.0).epsilon(1e-12));
  // Antisymmetric in tau: complete destructive overlap.
  for (Eigen::Index i = 0; i < 41; ++i)
    for (Eigen::Index j = 0; j < 33; ++j)
      g.values(i, j) *= g.tau_axis[j];
  CHECK(rho_overlap(g) == Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("overlap route agrees with the direct double integral") {
  SetupConfig s = bbo_setup(kDipCenter, sigma_nm(100.0));
  s.crystal.Dp = 1e-25;
  QuadratureConfig cfg;
  const AmplitudeGrid g = overlap_grid(s, cfg, 72, 73);
  CHECK(g.all_converged);
  const double via_overlap = rho_overlap(g);
  const RhoResult direct = rho_numeric(s, kDipCenter, cfg);
  REQUIRE(direct.converged);
  CHECK(std::abs(via_overlap - direct.rho) <= 0.01);
}

TEST_CASE("rho_overlap rejects malformed grids") {
  AmplitudeGrid g;
  g.t_axis = Eigen::VectorXd::LinSpaced(17, -4.0, 4.0);
  g.tau_axis = Eigen::VectorXd::LinSpaced(17, -3.0, 5.0);  // asymmetric
  g.values = Eigen::MatrixXcd::Ones(17, 17);
  CHECK_THROWS_AS(rho_overlap(g), std::invalid_argument);
  g.tau_axis = Eigen::VectorXd::LinSpaced(17, -4.0, 4.0);
  // Boundary not quiet: constant map violates window truncation.
  CHECK_THROWS_WITH_AS(rho_overlap(g), doctest::Contains("window"),
                       std::invalid_argument);
}

TEST_CASE("scan determinism, sample bookkeeping and thread independence") {
  SetupConfig s = bbo_setup(0.0, sigma_nm(50.0));
  s.crystal.Dp = 5e-26;
  QuadratureConfig cfg;
  Eigen::VectorXd ls = Eigen::VectorXd::LinSpaced(12, 0.0, 22.0);
  const DipCurve a = dip_scan(s, ls, cfg, RhoMethod::Auto, 1);
  const DipCurve b = dip_scan(s, ls, cfg, RhoMethod::Auto, 3);
  REQUIRE(a.samples.size() == 12);
  REQUIRE(b.samples.size() == 12);
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].rho == b.samples[i].rho);  // bitwise equal
    CHECK(a.samples[i].rn == 1.0 - a.samples[i].rho);
    SetupConfig at = s;
    at.delay.length_l = a.samples[i].l_mm;
    CHECK(a.samples[i].dtau_l == Approx(at.dtau_l()).epsilon(1e-12));
  }
  CHECK(a.all_converged);
  // Decreasing or negative l grids are rejected.
  Eigen::VectorXd badv(2);
  badv << 3.0, 1.0;
  CHECK_THROWS_AS(dip_scan(s, badv, cfg), std::invalid_argument);
}

TEST_CASE("dip-center search reproduces the compensation point") {
  SetupConfig s = bbo_setup(0.0);
  QuadratureConfig cfg;
  const VisibilitySample v = find_dip_center(s, cfg);
  CHECK(v.l_opt_mm == Approx(kDipCenter).epsilon(1e-3));
  CHECK(v.rho_max == Approx(0.35565).epsilon(2e-4));
  CHECK(v.vis == Approx(0.21629).epsilon(2e-4));
  // Without a group-velocity difference in the delay material the walk-off
  // cannot be compensated.
  SetupConfig bad = s;
  bad.delay.inv_g1 = bad.delay.inv_g2;
  CHECK_THROWS_AS(find_dip_center(bad, cfg), std::invalid_argument);
}

TEST_CASE("visibility helper") {
  CHECK(visibility(0.5) == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(visibility(1.0) == Approx(1.0).epsilon(1e-12));
  CHECK(visibility(0.0) == 0.0);
  CHECK(visibility(1.0 + 5e-7) == 1.0);   // tolerated numeric overshoot
  CHECK(visibility(-5e-10) == 0.0);
  CHECK_THROWS_AS(visibility(1.1), std::invalid_argument);
  CHECK_THROWS_AS(visibility(-0.1), std::invalid_argument);
}

TEST_CASE("method dispatch and its error messages") {
  QuadratureConfig cfg;
  // Finite filters: Auto goes through the double integral.
  SetupConfig filt = bbo_setup(10.0, sigma_nm(50.0));
  const RhoResult rn = rho_eval(filt, 10.0, cfg);
  const RhoResult rd = rho_numeric(filt, 10.0, cfg);
  CHECK(rn.rho == rd.rho);
  // No filters, dispersion-free: Auto uses the closed form.
  SetupConfig free = bbo_setup(10.0);
  CHECK(rho_eval(free, 10.0, cfg).rho ==
        Approx(rho_analytic(free, 10.0)).epsilon(1e-12));
  // No filters with pump-only dispersion: the one-dimensional reduction.
  SetupConfig pumpd = bbo_setup(10.0);
  pumpd.crystal.Dp = 1e-25;
  const RhoResult ra = rho_eval(pumpd, 10.0, cfg);
  const RhoResult rb = rho_nofilter(pumpd, 10.0, cfg);
  CHECK(ra.rho == rb.rho);
  // No filters with downconversion dispersion: no exact route exists.
  SetupConfig stuck = bbo_setup(10.0);
  stuck.crystal.D1 = 1e-25;
  CHECK_THROWS_WITH_AS(rho_eval(stuck, 10.0, cfg),
                       doctest::Contains("filters"), std::invalid_argument);
  // Forced methods validate their preconditions.
  CHECK_THROWS_AS(rho_eval(filt, 10.0, cfg, RhoMethod::Analytic),
                  std::invalid_argument);
  CHECK_THROWS_AS(rho_eval(free, 10.0, cfg, RhoMethod::Numeric),
                  std::invalid_argument);
  SetupConfig uneq = filt;
  uneq.filters.sigma2 = sigma_nm(100.0);
  CHECK_THROWS_AS(rho_eval(uneq, 10.0, cfg, RhoMethod::Autocorr),
                  std::invalid_argument);
}

}  // TEST_SUITE
