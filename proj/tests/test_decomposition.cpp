#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cnls/decomposition.hpp"
#include "cnls/initial_data.hpp"
#include "cnls/norms.hpp"
#include "cnls/solver.hpp"
#include "cnls/spectral.hpp"

using namespace cnls;

namespace {

double l2_diff(const Field& a, const Field& b) { return lp_norm(a.to_physical() - b.to_physical(), 2); }

SolverConfig config(double dt, double t_end, int stride) {
  SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_stride = stride;
  return c;
}

const Trajectory& small_run() {
  static const Trajectory tr = [] {
    const Grid g = make_grid(3, 16, 16.0);
    return evolve(gaussian(g, 1.5, 1.0), config(0.005, 1.5, 10));
  }();
  return tr;
}

}  // namespace

TEST_CASE("zero data and empty intervals") {
  const Grid g = make_grid(3, 16, 16.0);
  const Trajectory zero = evolve(Field(g, Representation::physical), config(0.005, 0.2, 4));
  DuhamelIntegrator integ(zero);
  CHECK(lp_norm(integ.integral(0.0, 0.2, 0.2), 2) == 0.0);
  const DuhamelSplit s = split_v_w(integ, 0.2, 0.1);
  CHECK(s.residual == 0.0);
  CHECK(lp_norm(s.w, 2) == 0.0);

  DuhamelIntegrator live(small_run());
  CHECK(lp_norm(live.integral(0.5, 0.5, 0.7), 2) == 0.0);
  CHECK(live.nodes_in(0.5, 0.5) == 1);
  CHECK(live.nodes_in(0.0, 1.5) == small_run().size());
  CHECK_THROWS_AS(live.interaction_integral(0.0, 1.6), std::invalid_argument);
  CHECK_THROWS_AS(live.interaction_integral(-0.1, 1.0), std::invalid_argument);
}

TEST_CASE("interaction integral of a plane wave") {
  // u = a e^{i(kx - (|k|^2 + a^2) t)}, so G(tau) = a^2 u_hat(0) e^{-i a^2 tau}
  // and its piecewise-linear integral has a closed form.
  const Grid g = make_grid(1, 16, 4.0 * std::numbers::pi);
  const double a = 1.1;
  const Field u0 = plane_wave(g, a, {3, 0, 0});
  const Trajectory tr = evolve(u0, config(0.002, 0.4, 10));
  DuhamelIntegrator integ(tr);
  const Field got = integ.interaction_integral(0.0, 0.4).to_fourier();
  const Field u0h = u0.to_fourier();
  const double h = 0.02;
  const double w = a * a;
  Complex trap = 0.0;
  for (int n = 0; n < 20; ++n) trap += 0.5 * h * (std::polar(1.0, -w * n * h) + std::polar(1.0, -w * (n + 1) * h));
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got.values()[i] - w * trap * u0h.values()[i]));
  CHECK(worst < 1e-10 * std::abs(u0h.values()[3]));
}

TEST_CASE("splits add up for any delta") {
  DuhamelIntegrator integ(small_run());
  const DuhamelSplit a = split_v_w(integ, 1.0, 0.05);
  const DuhamelSplit b = split_v_w(integ, 1.0, 0.2);
  const DuhamelSplit c = split_v_w(integ, 1.0, 0.37);
  const double scale = lp_norm(a.v + a.w, 2);
  CHECK(l2_diff(a.v + a.w, b.v + b.w) < 1e-12 * scale);
  CHECK(l2_diff(a.v + a.w, c.v + c.w) < 1e-12 * scale);
  CHECK(l2_diff(a.u_l, linear_part(small_run(), 1.0)) == 0.0);
  CHECK(l2_diff(a.v + a.w, duhamel_integral(small_run(), 0.0, 1.0, 1.0)) < 1e-12 * scale);
  CHECK(a.residual == doctest::Approx(b.residual).epsilon(1e-9));

  CHECK_THROWS_AS(split_v_w(integ, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(split_v_w(integ, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(split_v_w(integ, 1.01, 0.1), std::invalid_argument);
}

TEST_CASE("decomposition residual is second order in the snapshot stride") {
  const Grid g = make_grid(3, 32, 30.0);
  const Trajectory fine = evolve(gaussian(g, 1.0, 0.65), config(0.002, 1.0, 5));
  const Trajectory coarse = subsample(fine, 2);
  CHECK(coarse.size() == (fine.size() - 1) / 2 + 1);
  const double r_fine = split_v_w(fine, 1.0, 0.1).residual;
  const double r_coarse = split_v_w(coarse, 1.0, 0.1).residual;
  MESSAGE("residual stride 10: " << r_coarse << "  stride 5: " << r_fine);
  CHECK(r_coarse < 1e-4);
  CHECK(std::log2(r_coarse / r_fine) == doctest::Approx(2.0).epsilon(0.1));
  CHECK_THROWS_AS(subsample(fine, 3), std::invalid_argument);
  CHECK(coarse.times[1] == doctest::Approx(0.02));
}

TEST_CASE("free continuation and the global remainder") {
  const Trajectory& tr = small_run();
  const DuhamelSplit s = split_v_w(tr, 1.0, 0.1);
  const double m = mass(s.u_l + s.v);
  for (double t : {1.0, 1.2, 1.5}) {
    const Field tv = tilde_v(s, t);
    CHECK(mass(tv) == doctest::Approx(m).epsilon(1e-12));
    const Field wg = w_global(tr, t, tv);
    const Field u = tr.snapshots[*tr.index_of(t)];
    CHECK(l2_diff(tv + wg, u) < 1e-13 * lp_norm(u, 2));
  }
  const Field wg1 = w_global(tr, 1.0, tilde_v(s, 1.0));
  CHECK(l2_diff(wg1, s.w) <= s.residual * lp_norm(tr.snapshots[*tr.index_of(1.0)], 2) * (1 + 1e-9));
  CHECK_THROWS_AS(tilde_v(s, 0.9), std::invalid_argument);
}

TEST_CASE("modified energy matches a direct pairing") {
  const Trajectory& tr = small_run();
  const DuhamelSplit s = split_v_w(tr, 1.0, 0.1);
  const Field tv = tilde_v(s, 1.3);
  const Field w = w_global(tr, 1.3, tv);
  const EnergyLedger l = modified_energy(w, tv);

  // Pairings and the kinetic term through Parseval in Fourier space.
  const Grid& g = w.grid();
  const auto pairing = [&](const Field& f, const Field& h) {
    const Field fh = f.to_fourier();
    const Field hh = h.to_fourier();
    Complex acc = 0.0;
    for (std::size_t i = 0; i < fh.size(); ++i) acc += fh.values()[i] * std::conj(hh.values()[i]);
    return acc * g.volume() / (static_cast<double>(g.size()) * static_cast<double>(g.size()));
  };
  const auto pointwise = [&](auto fn) {
    Field out(g, Representation::physical);
    const Field wx = w.to_physical();
    const Field vx = tv.to_physical();
    for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = fn(wx.values()[i], vx.values()[i]);
    return out;
  };
  const Field wx = w.to_physical();
  const Field vx = tv.to_physical();
  const double c1 = pairing(pointwise([](Complex a, Complex) { return std::norm(a) * a; }), vx).real();
  const double c2 = pairing(pointwise([](Complex a, Complex b) { return std::norm(b) * a; }), wx).real();
  const double c3 = 0.5 * pairing(pointwise([](Complex a, Complex) { return a * a; }),
                                  pointwise([](Complex, Complex b) { return b * b; }))
                              .real();
  const double c4 = pairing(wx, pointwise([](Complex, Complex b) { return std::norm(b) * b; })).real();
  const Field wh = w.to_fourier();
  double grad2 = 0.0;
  for (std::size_t i = 0; i < wh.size(); ++i) grad2 += wavenumber_squared(g, i) * std::norm(wh.values()[i]);
  grad2 *= g.volume() / (static_cast<double>(g.size()) * static_cast<double>(g.size()));
  const double e = 0.5 * grad2 + 0.25 * std::pow(lp_norm(w, 4), 4);

  const std::array<double, 4> expect{c1, c2, c3, c4};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(l.corrections[i] - expect[i]) <= 1e-12 * std::abs(expect[i]) + 1e-300);
  CHECK(l.E == doctest::Approx(e).epsilon(1e-12));
  CHECK(l.modified_E == doctest::Approx(e - c1 - c2 - c3 - c4).epsilon(1e-12));
  CHECK_THROWS_AS(modified_energy(w, gaussian(make_grid(3, 8, 16.0), 1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("finite differences are exact on quadratics") {
  const std::vector<double> t{1.0, 1.1, 1.35, 1.4, 2.0, 2.2};
  std::vector<EnergyLedger> l(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    l[i].t = t[i];
    l[i].modified_E = 3.0 - 2.0 * t[i] + 0.5 * t[i] * t[i];
  }
  differentiate_ledger(l);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(l[i].dmodE_dt == doctest::Approx(-2.0 + t[i]).epsilon(1e-12));

  std::vector<EnergyLedger> two(2);
  two[0].t = 0.0;
  two[1].t = 0.5;
  two[1].modified_E = 1.0;
  differentiate_ledger(two);
  CHECK(two[0].dmodE_dt == doctest::Approx(2.0));
  CHECK(two[1].dmodE_dt == doctest::Approx(2.0));
}

TEST_CASE("streaming ledger matches the stored computation") {
  const Grid g = make_grid(3, 16, 16.0);
  const Field u0 = gaussian(g, 1.5, 1.0);
  const SolverConfig c = config(0.005, 1.5, 10);
  const std::vector<double> samples{1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
  const Trajectory tr = evolve(u0, c);
  const auto batch = ledger_series(tr, 0.1, samples);

  LedgerBuilder builder(0.1, c.dealias, samples);
  evolve_streaming(u0, c, [&](double t, const Field& u) { builder.observe(t, u); });
  const auto stream = builder.finish();
  REQUIRE(stream.size() == batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(stream[i].t == doctest::Approx(batch[i].t));
    CHECK(stream[i].E == doctest::Approx(batch[i].E).epsilon(1e-10));
    CHECK(stream[i].modified_E == doctest::Approx(batch[i].modified_E).epsilon(1e-10));
    CHECK(stream[i].dmodE_dt == doctest::Approx(batch[i].dmodE_dt).epsilon(1e-6));
    CHECK(stream[i].residual == doctest::Approx(batch[i].residual).epsilon(1e-8));
  }
  CHECK(envelope_constant(batch) > 0.0);
  for (const EnergyLedger& l : batch) {
    const double env = envelope_constant(batch) * (std::pow(l.E, 0.75) + std::pow(l.E, 0.25));
    CHECK(std::abs(l.modified_E - l.E) <= env * (1 + 1e-12));
  }

  CHECK_THROWS_AS(LedgerBuilder(0.1, c.dealias, {0.5, 1.0}), std::invalid_argument);
  LedgerBuilder late(0.1, c.dealias, {1.0, 1.2});
  CHECK_THROWS(evolve_streaming(u0, config(0.005, 1.5, 40), [&](double t, const Field& u) { late.observe(t, u); }));
}

TEST_CASE("ledger CSV round trip") {
  const auto ledgers = ledger_series(small_run(), 0.1, std::vector<double>{1.0, 1.25, 1.5});
  std::stringstream ss;
  write_ledger_csv(ss, ledgers, 42);
  CHECK(ss.str().rfind("# config_hash=000000000000002a\nt,E,corr1,corr2,corr3,corr4,modE,dmodE_dt,residual\n", 0) == 0);
  const auto back = read_ledger_csv(ss);
  REQUIRE(back.size() == ledgers.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].t == ledgers[i].t);
    CHECK(back[i].corrections == ledgers[i].corrections);
    CHECK(back[i].modified_E == ledgers[i].modified_E);
    CHECK(back[i].residual == ledgers[i].residual);
  }
  std::stringstream bad("t,E,corr1,corr2,corr3,corr4,modE,dmodE_dt,residual\n1,2,3\n");
  CHECK_THROWS_AS(read_ledger_csv(bad), std::runtime_error);
}
