#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cnls/checks.hpp"
#include "cnls/decay_fit.hpp"
#include "cnls/initial_data.hpp"
#include "cnls/norms.hpp"
#include "cnls/report.hpp"
#include "cnls/solver.hpp"
#include "cnls/spectral.hpp"

using namespace cnls;
using std::numbers::pi;

namespace {

// Small 3D Gaussian run covering the lemma window [0.05, 1].
Trajectory gaussian_run(double amplitude) {
  const Grid g = make_grid(3, 32, 20.0);
  SolverConfig c;
  c.dt = 0.004;
  c.t_end = 1.0;
  c.snapshot_stride = 2;
  return evolve(gaussian(g, amplitude, 0.8), c);
}

std::vector<EnergyLedger> ledgers_from(std::span<const double> t, double (*modE)(double)) {
  std::vector<EnergyLedger> l(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    l[i].t = t[i];
    l[i].modified_E = modE(t[i]);
    l[i].E = modE(t[i]);
  }
  differentiate_ledger(l);
  return l;
}

}  // namespace

TEST_CASE("power-law fits") {
  const auto t = log_spaced(0.1, 2.0, 10);
  REQUIRE(t.size() == 10);
  CHECK(t.front() == doctest::Approx(0.1));
  CHECK(t.back() == doctest::Approx(2.0));
  CHECK(t[1] / t[0] == doctest::Approx(t[9] / t[8]));

  std::vector<double> v;
  for (double x : t) v.push_back(3.0 * std::pow(x, -1.5));
  const DecayFit f = fit_decay_rate(t, v, 0.1, 2.0);
  CHECK(std::abs(f.exponent + 1.5) < 1e-9);
  CHECK(f.log_prefactor == doctest::Approx(std::log(3.0)));
  CHECK(f.n_samples == 10);
  CHECK(f.residual_rms < 1e-9);

  for (double r : {-3.0, -2.2, -1.0, -0.25, 0.0}) {
    std::vector<double> w;
    for (double x : t) w.push_back(0.7 * std::pow(x, r));
    const DecayFit fr = fit_decay_rate(t, w, 0.1, 2.0);
    CHECK(std::abs(fr.exponent - r) < 1e-9);
    CHECK(fr.residual_rms < 1e-9);
  }

  const DecayFit sub = fit_decay_rate(t, v, 0.25, 1.5);
  CHECK(sub.n_samples < 10);
  CHECK(sub.n_samples >= 4);

  CHECK_THROWS_AS(fit_decay_rate(t, v, 1.5, 2.0), std::invalid_argument);
  auto bad = v;
  bad[3] = 0.0;
  CHECK_THROWS_AS(fit_decay_rate(t, bad, 0.1, 2.0), std::invalid_argument);
  bad[3] = -1.0;
  CHECK_THROWS_AS(fit_decay_rate(t, bad, 0.1, 2.0), std::invalid_argument);

  NormSeries s(NormDescriptor::lebesgue(2.0));
  for (std::size_t i = 0; i < t.size(); ++i) s.append(t[i], v[i]);
  CHECK(fit_decay_rate(s, 0.1, 2.0).exponent == doctest::Approx(-1.5));
}

TEST_CASE("premultiplied series") {
  const std::vector<double> t{1.0, 2.0, 4.0, 8.0};
  std::vector<double> v;
  for (double x : t) v.push_back(5.0 * std::pow(x, -0.5));
  const Premultiplied p = premultiplied(t, v, -0.5);
  CHECK(p.sup == doctest::Approx(5.0));
  CHECK(p.stability == doctest::Approx(1.0));

  // (delta t)^{1/2} v with delta = 0.25 scales the sup by 1/2.
  CHECK(premultiplied(t, v, -0.5, 0.25).sup == doctest::Approx(2.5));

  // Faster decay than the target: s_i = 5 t^{-1/2}, sup at the first sample.
  std::vector<double> fast;
  for (double x : t) fast.push_back(5.0 * std::pow(x, -1.0));
  const Premultiplied q = premultiplied(t, fast, -0.5);
  CHECK(q.sup == doctest::Approx(5.0));
  CHECK(q.stability == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("pass rules") {
  CHECK(make_report("a", -0.5, -0.35, 1.0, 0.15, PassRule::at_most).passed);
  CHECK_FALSE(make_report("a", -0.5, -0.34, 1.0, 0.15, PassRule::at_most).passed);
  CHECK_FALSE(make_report("b", 0.05, 0.05, 1.0, 0.0, PassRule::below).passed);
  CHECK(make_report("b", 0.05, 0.0499, 1.0, 0.0, PassRule::below).passed);
  CHECK(make_report("c", 1.0, 1.2, 1.0, 0.25, PassRule::within).passed);
  CHECK(make_report("c", 1.0, 0.8, 1.0, 0.25, PassRule::within).passed);
  CHECK_FALSE(make_report("c", 1.0, 0.7, 1.0, 0.25, PassRule::within).passed);
  CHECK_FALSE(make_report("d", -0.5, -1.0, INFINITY, 0.15, PassRule::at_most).passed);
  CHECK_FALSE(make_report("d", -0.5, -1.0, NAN, 0.15, PassRule::at_most).passed);
  CHECK_FALSE(make_report("d", -0.5, NAN, 1.0, 0.15, PassRule::at_most).passed);
  CHECK(make_report("e", -0.5, -INFINITY, 0.0, 0.15, PassRule::at_most).passed);

  CheckReport r = make_report("s", -0.5, -0.6, 1.0, 0.15, PassRule::at_most);
  r.stability_tol = 0.25;
  r.stability = 1.2;
  CHECK(r.finalize().passed);
  r.stability = 1.3;
  CHECK_FALSE(r.finalize().passed);

  for (PassRule p : {PassRule::at_most, PassRule::below, PassRule::within}) CHECK(pass_rule_from_string(to_string(p)) == p);
  CHECK_THROWS(pass_rule_from_string("roughly"));
}

TEST_CASE("report CSV and replay") {
  std::vector<CheckReport> reports{make_report("x", -0.5, -0.7, 0.125, 0.15, PassRule::at_most),
                                   make_report("y", 1.0, 1.4, 2.0, 0.25, PassRule::within),
                                   make_report("z", 0.05, -INFINITY, 0.0, 0.0, PassRule::below)};
  reports[0].stability = 1.1;
  reports[0].stability_tol = 0.25;
  reports[0].finalize();

  std::stringstream ss;
  write_report_csv(ss, reports, 0xfeedULL);
  const std::string text = ss.str();
  CHECK(text.rfind("# config_hash=000000000000feed\nname,target,fitted,premult_sup,tolerance,passed,rule,stability,"
                   "stability_tol\n",
                   0) == 0);

  std::stringstream in(text);
  const ReplayResult rr = replay_report(in);
  CHECK(rr.mismatches.empty());
  REQUIRE(rr.reports.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rr.reports[i].name == reports[i].name);
    CHECK(rr.reports[i].fitted == reports[i].fitted);
    CHECK(rr.reports[i].passed == reports[i].passed);
    CHECK(rr.reports[i].rule == reports[i].rule);
  }
  CHECK(rr.reports[0].stability == 1.1);
  CHECK(std::isnan(rr.reports[1].stability));

  std::stringstream out;
  write_report_csv(out, rr.reports, 0xfeedULL);
  CHECK(out.str() == text);

  std::stringstream empty("name,target,fitted,premult_sup,tolerance,passed,rule,stability,stability_tol\n");
  CHECK(replay_report(empty).reports.empty());

  std::string tampered = text;
  const auto pos = tampered.find("y,1,1.4,");
  REQUIRE(pos != std::string::npos);
  const auto flag = tampered.find(",false,", pos);
  tampered.replace(flag, 7, ",true,");
  std::stringstream tin(tampered);
  const ReplayResult tr = replay_report(tin);
  REQUIRE(tr.mismatches.size() == 1);
  CHECK(tr.mismatches[0].name == "y");
  CHECK(tr.mismatches[0].stored);
  CHECK_FALSE(tr.mismatches[0].recomputed);

  std::stringstream malformed(text + "w,1,2\n");
  try {
    replay_report(malformed);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 6") != std::string::npos);
  }
  std::stringstream bad_flag(text + "w,1,2,3,4,maybe,at_most,nan,nan\n");
  CHECK_THROWS_AS(replay_report(bad_flag), std::runtime_error);
  CHECK_THROWS(replay_report(std::filesystem::path("/nonexistent/report.csv")));
}

TEST_CASE("decay windows stay inside T_valid") {
  const Grid g = make_grid(3, 64, 32.0);
  const auto t = decay_sample_times(g, {});
  CHECK(t.front() == doctest::Approx(0.2));
  CHECK(t.back() == doctest::Approx(g.t_valid()));
  CHECK_THROWS_AS(decay_sample_times(g, {0.2, 2.0 * g.t_valid(), 12}), std::invalid_argument);
  CHECK_THROWS_AS(decay_sample_times(g, {0.2, 0.0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(check_dispersive(gaussian(g, 1.0, 0.34), {0.2, 1.5 * g.t_valid(), 12}), std::invalid_argument);
}

TEST_CASE("dispersive decay of a narrow Gaussian") {
  const Grid g = make_grid(3, 64, 32.0);
  const DispersiveResult r = check_dispersive(gaussian(g, 1.0, 0.34));
  CHECK(r.linf.passed);
  CHECK(r.l7.passed);
  CHECK(r.linf.fitted == doctest::Approx(-1.5).epsilon(0.1 / 1.5));
  CHECK(r.l7.fitted <= -15.0 / 14.0 + 0.1);
  CHECK(r.linf_series.size() == 12);
}

TEST_CASE("non-localized data are refused") {
  const Grid g = make_grid(3, 32, 32.0);
  const Field p = plane_wave(g, 1.0, {1, 0, 0});
  CHECK_THROWS_AS(check_lemma_3_1(p), std::invalid_argument);
  CHECK_THROWS_AS(check_dispersive(p), std::invalid_argument);
}

TEST_CASE("lemma checks on zero data pass trivially") {
  const Trajectory tr = gaussian_run(0.0);
  const auto [v, gv] = check_lemma_2_2(tr, 0.1);
  CHECK(v.passed);
  CHECK(gv.passed);
  CHECK(v.premult_sup == 0.0);
  const CheckReport w = check_lemma_2_3(tr, 0.1);
  CHECK(w.passed);
  const auto [vh, wh] = check_lemma_2_4(tr, 0.1);
  CHECK(vh.passed);
  CHECK(wh.passed);
  CHECK(vh.premult_sup == 0.0);
  CHECK(wh.premult_sup == 0.0);
}

TEST_CASE("lemma series scale with the amplitude") {
  const Trajectory a = gaussian_run(0.2);
  const Trajectory b = gaussian_run(0.1);
  DuhamelIntegrator ia(a);
  DuhamelIntegrator ib(b);
  const LemmaSeries sa = compute_lemma_series(ia, 0.1);
  const LemmaSeries sb = compute_lemma_series(ib, 0.1);
  CHECK(sa.v_sup.size() == sb.v_sup.size());
  CHECK(sa.v_sup.times().front() >= 0.05);
  CHECK(sa.v_sup.times().back() <= 1.0);

  // First Duhamel iterate dominates: v is cubic in the amplitude.
  const auto pa = check_lemma_2_2(sa).first;
  const auto pb = check_lemma_2_2(sb).first;
  CHECK(pa.premult_sup / pb.premult_sup == doctest::Approx(8.0).epsilon(0.1));

  // w is cubic at leading order too; the defocusing correction pulls the
  // ratio slightly below 8.
  const auto wa = check_lemma_2_3(sa);
  const auto wb = check_lemma_2_3(sb);
  CHECK(wa.premult_sup / wb.premult_sup == doctest::Approx(8.0).epsilon(0.02));

  // delta -> 1: w carries the whole Duhamel term and stays finite.
  const LemmaSeries full = compute_lemma_series(ia, 0.999);
  for (double x : full.w_half_l3.values()) CHECK(std::isfinite(x));
}

TEST_CASE("lemma sample times come from snapshots") {
  const Trajectory tr = gaussian_run(0.0);
  const auto t = lemma_sample_times(tr, {});
  CHECK(t.size() >= 12);
  CHECK(t.size() <= 16);
  for (double x : t) CHECK(tr.index_of(x).has_value());
  CHECK(std::is_sorted(t.begin(), t.end()));
}

TEST_CASE("Besov sum: cubic homogeneity and band concentration") {
  const Grid g = make_grid(3, 32, 10.0);
  SolverConfig c;
  c.dt = 0.001;
  c.t_end = 0.1;
  c.snapshot_stride = 10;
  const BesovSum s1 = besov_sum(evolve(gaussian(g, 0.01, 1.0), c), 0.0, 0.1);
  const BesovSum s2 = besov_sum(evolve(gaussian(g, 0.02, 1.0), c), 0.0, 0.1);
  CHECK(s2.total / s1.total == doctest::Approx(8.0).epsilon(1e-4));
  CHECK(check_besov_sum(s1).passed);

  InitialDataSpec spec;
  spec.family = DataFamily::rough;
  spec.amplitude = 0.05;
  spec.alpha = 0.0;
  spec.k_lo = 1.6;
  spec.k_hi = 2.5;
  const int j0 = 1;
  const BesovSum b = besov_sum(evolve(make_initial_data(g, spec, 3), c), 0.0, 0.1);
  double near = 0.0;
  for (std::size_t i = 0; i < b.bands.size(); ++i) {
    if (std::abs(b.bands[i] - j0) <= 2) near += b.terms[i];
  }
  CHECK(near / b.total >= 0.8);
  double sum = 0.0;
  for (double x : b.terms) sum += x;
  CHECK(sum == doctest::Approx(b.total));
}

TEST_CASE("bilinear estimate: two plane waves") {
  // u0 = e^{i 8 x}, v0 = e^{i x} sit at the centres of bands 3 and 0, so the
  // projections keep them intact and |product| = 1 everywhere.
  const double L = 16.0 * pi;
  const Grid g = make_grid(1, 512, L);
  const Field u0 = plane_wave(g, 1.0, {64, 0, 0});
  const Field v0 = plane_wave(g, 1.0, {8, 0, 0});
  const double t_half = 0.3;
  const auto [lhs, rhs] = bilinear_sides(u0, v0, 3, 0, t_half, 101);
  CHECK(lhs == doctest::Approx(std::sqrt(2.0 * t_half * L)).epsilon(1e-6));
  CHECK(rhs == doctest::Approx(std::pow(2.0, -1.5) * L).epsilon(1e-6));

  const auto [l0, r0] = bilinear_sides(u0, Field(g, Representation::physical), 3, 0, t_half, 101);
  CHECK(l0 == 0.0);
  CHECK(r0 == 0.0);
}

TEST_CASE("bilinear estimate: preconditions and one scaling step") {
  BilinearOptions opt;
  CHECK_THROWS_AS(bilinear_ratio(opt, 5, 4), std::invalid_argument);
  CHECK_THROWS_AS(bilinear_ratio(opt, 12, 2), std::invalid_argument);
  opt.box_length = 4.0;
  CHECK_THROWS_AS(bilinear_ratio(opt, 5, 0), std::invalid_argument);

  const CheckReport r = check_bilinear_strichartz(5, 2, 4, 1);
  CHECK(r.fitted == doctest::Approx(1.0).epsilon(0.25));
  CHECK(r.passed);
}

TEST_CASE("Morawetz constant of a static field doubles with the horizon") {
  const Grid g = make_grid(3, 16, 10.0);
  const Field u = gaussian(g, 1.0, 1.0);
  Trajectory tr;
  tr.grid = g;
  for (int i = 0; i <= 10; ++i) {
    tr.times.push_back(0.1 * i);
    tr.snapshots.push_back(u);
  }
  const CheckReport r = check_morawetz(tr, 0.5, 1.0);
  CHECK(r.fitted == doctest::Approx(2.0));
  CHECK_FALSE(r.passed);
}

TEST_CASE("Gronwall check on synthetic ledgers") {
  // Horizon T = 1.5 inside [1, 2T] = [1, 3].
  std::vector<double> t;
  for (int i = 0; i <= 40; ++i) t.push_back(1.0 + 0.05 * i);

  const auto zero = ledgers_from(t, [](double) { return 0.0; });
  const auto rz = check_gronwall(zero);
  REQUIRE(rz.size() == 3);
  for (const auto& r : rz) CHECK(r.passed);

  // modE = 1 - t^{-1}: bounded, and c(t) = t^{-2+15/14}/(2 - 1/t) peaks at t = 1.
  const auto sat = ledgers_from(t, [](double x) { return 1.0 - 1.0 / x; });
  const auto rs = check_gronwall(sat);
  CHECK(rs[0].fitted == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rs[1].fitted == doctest::Approx((1.0 - 1.0 / 1.5) / (1.0 - 1.0 / 3.0)));
  CHECK_FALSE(rs[1].passed);

  const auto grow = ledgers_from(t, [](double x) { return std::exp(3.0 * x); });
  CHECK_FALSE(check_gronwall(grow)[0].passed);

  CHECK_THROWS_AS(check_gronwall(std::span(zero).first(7), zero), std::invalid_argument);
}

TEST_CASE("Gronwall ledger in the small-amplitude regime") {
  const Grid g = make_grid(3, 16, 16.0);
  SolverConfig c;
  c.dt = 0.005;
  c.t_end = 3.0;
  c.snapshot_stride = 10;
  const Trajectory tr = evolve(gaussian(g, 0.1, 1.0), c);
  std::vector<double> samples;
  for (int i = 0; i <= 40; ++i) samples.push_back(1.0 + 0.05 * i);
  const auto l = ledger_series(tr, 0.1, samples);
  double spread = 0.0;
  for (const auto& x : l) spread = std::max(spread, std::abs(x.modified_E - l.front().modified_E));
  CHECK(spread < 1e-8);
  const auto rep = check_gronwall(l);
  CHECK(std::isfinite(rep[2].fitted));

  const Trajectory zero = evolve(Field(g, Representation::physical), c);
  for (const auto& r : check_gronwall(ledger_series(zero, 0.1, samples))) CHECK(r.passed);
}
