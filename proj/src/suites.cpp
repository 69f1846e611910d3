#include "cnls/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cnls/csv.hpp"
#include "cnls/decomposition.hpp"
#include "cnls/initial_data.hpp"
#include "cnls/solver.hpp"
#include "cnls/spectral.hpp"
#include "cnls/trajectory_io.hpp"

namespace cnls {
namespace {

namespace fs = std::filesystem;
using csv::format_number;

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool needs_stored_run(const std::string& s) {
  return s == "lemma21" || s == "lemma22" || s == "lemma23" || s == "lemma24" || s == "morawetz";
}

bool needs_lemma_series(const std::string& s) { return s == "lemma22" || s == "lemma23" || s == "lemma24"; }

/// State prepared before suites run; read-only afterwards.
struct Context {
  const ExperimentConfig& cfg;
  fs::path out;
  Field u0;
  const Trajectory* traj = nullptr;
  std::vector<LemmaSeries> lemma;
};

class Writer {
 public:
  Writer(const fs::path& out, SuiteOutcome& outcome, std::uint64_t hash)
      : out_(out), outcome_(outcome), hash_(hash) {}

  void file(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(out_ / name, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + (out_ / name).string());
    body(os);
    if (!os) throw std::runtime_error("failed writing " + (out_ / name).string());
    outcome_.artifacts.push_back(name);
  }

  void series(const std::string& name, const NormSeries& s) {
    file(name, [&](std::ostream& os) { write_norm_series_csv(os, s, hash_); });
  }

  void reports(const std::string& name, const std::vector<CheckReport>& r) {
    file(name, [&](std::ostream& os) { write_report_csv(os, r, hash_); });
  }

  std::uint64_t hash() const { return hash_; }

 private:
  fs::path out_;
  SuiteOutcome& outcome_;
  std::uint64_t hash_;
};

bool all_passed(const std::vector<CheckReport>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const CheckReport& r) { return r.passed; });
}

void suite_dispersive(const Context& c, SuiteOutcome& o, Writer& w) {
  DispersiveResult r = check_dispersive(c.u0, c.cfg.decay);
  w.series("dispersive_linf.csv", r.linf_series);
  w.series("dispersive_l7.csv", r.l7_series);
  o.reports = {r.linf, r.l7};
}

void write_besov(Writer& w, const std::string& name, const BesovSum& b) {
  w.file(name, [&](std::ostream& os) {
    os << "# config_hash=" << csv::format_hash(w.hash()) << "\n";
    os << "j,term,resolvable\n";
    for (std::size_t i = 0; i < b.bands.size(); ++i) {
      os << b.bands[i] << "," << format_number(b.terms[i]) << ","
         << (b.bands[i] <= b.j_top_resolvable ? "true" : "false") << "\n";
    }
  });
}

void suite_lemma21(const Context& c, SuiteOutcome& o, Writer& w) {
  const Trajectory& traj = *c.traj;
  const BesovSum coarse = besov_sum(traj, traj.t_first(), traj.t_last());
  write_besov(w, "besov.csv", coarse);
  o.reports.push_back(check_besov_sum(coarse));
  if (c.cfg.besov_refine) {
    const ExperimentConfig& cfg = c.cfg;
    const Grid fine_grid = Grid::make(cfg.dim, 2 * cfg.n, cfg.box_length);
    SolverConfig sc = cfg.solver;
    sc.dt *= 0.5;
    sc.snapshot_stride *= 2;
    const Field u0 = make_initial_data(fine_grid, cfg.data, cfg.seed);
    const Trajectory fine = evolve(u0, sc, describe(cfg.data, cfg.seed), cfg.seed);
    if (fine.guard_trip) {
      o.guard_tripped = true;
      return;
    }
    const BesovSum refined = besov_sum(fine, fine.t_first(), fine.t_last());
    write_besov(w, "besov_refined.csv", refined);
    CheckReport fine_tail = check_besov_sum(refined);
    fine_tail.name = "besov_tail_refined";
    o.reports.push_back(fine_tail);
    o.reports.push_back(check_besov_refinement(coarse, refined));
  }
}

std::string delta_tag(double delta) { return "d" + short_number(delta); }

CheckReport tagged(CheckReport r, double delta) {
  r.name += "_" + delta_tag(delta);
  return r;
}

void suite_lemma22(const Context& c, SuiteOutcome& o, Writer& w) {
  for (const auto& s : c.lemma) {
    const std::string tag = delta_tag(s.delta);
    w.series("lemma22_v_sup_" + tag + ".csv", s.v_sup);
    w.series("lemma22_grad_v_sup_" + tag + ".csv", s.grad_v_sup);
    const auto [a, b] = check_lemma_2_2(s);
    o.reports.push_back(tagged(a, s.delta));
    o.reports.push_back(tagged(b, s.delta));
  }
}

void suite_lemma23(const Context& c, SuiteOutcome& o, Writer& w) {
  for (const auto& s : c.lemma) {
    w.series("lemma23_w_half_l3_" + delta_tag(s.delta) + ".csv", s.w_half_l3);
    o.reports.push_back(tagged(check_lemma_2_3(s), s.delta));
  }
}

void suite_lemma24(const Context& c, SuiteOutcome& o, Writer& w) {
  bool ok = true;
  for (const auto& s : c.lemma) {
    const std::string tag = delta_tag(s.delta);
    w.series("lemma24_v_h1_" + tag + ".csv", s.v_h1);
    w.series("lemma24_w_h1_" + tag + ".csv", s.w_h1);
    const auto [v, wr] = check_lemma_2_4(s);
    o.reports.push_back(tagged(v, s.delta));
    o.reports.push_back(tagged(wr, s.delta));
    ok = ok && (v.passed || wr.passed);
  }
  o.passed = ok;
}

void suite_lemma31(const Context& c, SuiteOutcome& o, Writer& w) {
  LinearDecayResult r = check_lemma_3_1(c.u0, c.cfg.decay);
  w.series("lemma31_l4.csv", r.l4_series);
  w.series("lemma31_grad_sup.csv", r.grad_sup_series);
  o.reports = {r.l4, r.grad_sup};
}

void suite_bilinear(const Context& c, SuiteOutcome& o, Writer& w) {
  std::vector<BilinearSweep> sweeps;
  o.reports = check_bilinear_strichartz(c.cfg.bilinear, &sweeps);
  w.file("bilinear.csv", [&](std::ostream& os) {
    os << "# config_hash=" << csv::format_hash(w.hash()) << "\n";
    os << "gap,j,k,ratio\n";
    for (const auto& s : sweeps) {
      for (std::size_t i = 0; i < s.j.size(); ++i) {
        os << s.gap << "," << s.j[i] << "," << s.j[i] - s.gap << "," << format_number(s.ratio[i]) << "\n";
      }
    }
  });
}

void suite_morawetz(const Context& c, SuiteOutcome& o, Writer& w) {
  const Trajectory& traj = *c.traj;
  const double t1 = c.cfg.morawetz_t1;
  const double t2 = traj.t_last();
  const MorawetzRecord a = morawetz_check(traj, traj.t_first(), t1);
  const MorawetzRecord b = morawetz_check(traj, traj.t_first(), t2);
  w.file("morawetz.csv", [&](std::ostream& os) {
    os << "# config_hash=" << csv::format_hash(w.hash()) << "\n";
    os << "horizon,lhs,rhs\n";
    os << format_number(t1) << "," << format_number(a.lhs) << "," << format_number(a.rhs) << "\n";
    os << format_number(t2) << "," << format_number(b.lhs) << "," << format_number(b.rhs) << "\n";
  });
  o.reports = {check_morawetz(traj, t1, t2)};
}

std::vector<double> ledger_times(const ExperimentConfig& cfg) {
  const SolverConfig& s = cfg.solver;
  const long long one = std::llround(1.0 / s.dt);
  if (std::abs(one * s.dt - 1.0) > 1e-9 || one % s.snapshot_stride != 0) {
    throw std::invalid_argument("t = 1 must be a snapshot time for the ledger");
  }
  const long long total = std::llround(s.t_end / s.dt);
  std::vector<double> out;
  for (long long n = one; n <= total; n += static_cast<long long>(s.snapshot_stride) * cfg.ledger_stride) {
    out.push_back(static_cast<double>(n) * s.dt);
  }
  return out;
}

void finish_gronwall(std::vector<EnergyLedger> ledgers, SuiteOutcome& o, Writer& w) {
  w.file("ledger.csv", [&](std::ostream& os) { write_ledger_csv(os, ledgers, w.hash()); });
  const GronwallSeries g = gronwall_series(ledgers);
  w.file("gronwall_c.csv", [&](std::ostream& os) {
    os << "# config_hash=" << csv::format_hash(w.hash()) << "\n";
    os << "t,c\n";
    for (std::size_t i = 0; i < g.t.size(); ++i) os << format_number(g.t[i]) << "," << format_number(g.c[i]) << "\n";
  });
  o.reports = check_gronwall(ledgers);
}

void suite_gronwall_streaming(const Context& c, SuiteOutcome& o, Writer& w) {
  const ExperimentConfig& cfg = c.cfg;
  LedgerBuilder builder(cfg.deltas.front(), cfg.solver.dealias, ledger_times(cfg));
  const auto trip = evolve_streaming(c.u0, cfg.solver, [&](double t, const Field& u) { builder.observe(t, u); });
  if (trip) {
    o.guard_tripped = true;
    return;
  }
  finish_gronwall(builder.finish(), o, w);
}

void suite_gronwall_stored(const Context& c, SuiteOutcome& o, Writer& w) {
  std::vector<double> times;
  for (double t : c.traj->times) {
    if (t >= 1.0 - 1e-12) times.push_back(t);
  }
  std::vector<double> picked;
  for (std::size_t i = 0; i < times.size(); i += static_cast<std::size_t>(c.cfg.ledger_stride)) {
    picked.push_back(times[i]);
  }
  finish_gronwall(ledger_series(*c.traj, c.cfg.deltas.front(), picked), o, w);
}

void suite_scaling(const Context& c, SuiteOutcome& o, Writer& w) {
  const int d = c.u0.grid().dim();
  const double h0 = sobolev_norm(c.u0, 0.5, 2.0);
  const double w0 = sobolev_norm(c.u0, 11.0 / 7.0, 7.0 / 6.0);
  const double m0 = mass(c.u0);
  w.file("scaling.csv", [&](std::ostream& os) {
    os << "# config_hash=" << csv::format_hash(w.hash()) << "\n";
    os << "lambda,h_half,critical,mass\n";
    os << "1," << format_number(h0) << "," << format_number(w0) << "," << format_number(m0) << "\n";
    for (double lambda : {2.0, 0.5}) {
      const Field r = rescale_initial_data(c.u0, lambda);
      const double h = sobolev_norm(r, 0.5, 2.0);
      const double cr = sobolev_norm(r, 11.0 / 7.0, 7.0 / 6.0);
      const double m = mass(r);
      os << format_number(lambda) << "," << format_number(h) << "," << format_number(cr) << ","
         << format_number(m) << "\n";
      const std::string tag = "_l" + short_number(lambda);
      const auto rel = [](double a, double b) { return b != 0.0 ? std::abs(a - b) / b : std::abs(a); };
      o.reports.push_back(make_report("scaling_h_half" + tag, 0.0, rel(h, h0), h, 1e-6, PassRule::at_most));
      o.reports.push_back(make_report("scaling_critical" + tag, 0.0, rel(cr, w0), cr, 1e-6, PassRule::at_most));
      o.reports.push_back(make_report("scaling_mass" + tag, 0.0, rel(m, m0 * std::pow(lambda, 2 - d)), m, 1e-10,
                                      PassRule::at_most));
    }
  });
}

using SuiteFn = void (*)(const Context&, SuiteOutcome&, Writer&);

SuiteFn suite_function(const std::string& name, bool stored_gronwall) {
  if (name == "dispersive") return suite_dispersive;
  if (name == "lemma21") return suite_lemma21;
  if (name == "lemma22") return suite_lemma22;
  if (name == "lemma23") return suite_lemma23;
  if (name == "lemma24") return suite_lemma24;
  if (name == "lemma31") return suite_lemma31;
  if (name == "bilinear") return suite_bilinear;
  if (name == "morawetz") return suite_morawetz;
  if (name == "gronwall") return stored_gronwall ? suite_gronwall_stored : suite_gronwall_streaming;
  if (name == "scaling") return suite_scaling;
  throw std::invalid_argument("unknown suite '" + name + "'");
}

SuiteOutcome run_one(const std::string& name, const Context& c, bool stored_gronwall) {
  SuiteOutcome o;
  o.suite = name;
  Writer w(c.out, o, c.cfg.hash());
  if (needs_stored_run(name) && c.traj->guard_trip) {
    o.guard_tripped = true;
    o.passed = false;
    return o;
  }
  suite_function(name, stored_gronwall)(c, o, w);
  if (o.guard_tripped) {
    o.passed = false;
    return o;
  }
  if (name != "lemma24") o.passed = all_passed(o.reports);
  w.reports(name + "_report.csv", o.reports);
  return o;
}

void prepare_lemma(Context& c) {
  DuhamelIntegrator integ(*c.traj);
  for (double delta : c.cfg.deltas) c.lemma.push_back(compute_lemma_series(integ, delta, c.cfg.lemma));
}

int exit_code_for(const std::vector<SuiteOutcome>& outcomes) {
  bool trip = false;
  bool fail = false;
  for (const auto& o : outcomes) {
    trip = trip || o.guard_tripped;
    fail = fail || !o.passed;
  }
  return trip ? kExitGuardTrip : (fail ? kExitCheckFailure : kExitOk);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg, const RunResult& result) {
  std::ofstream os(dir / "manifest.txt", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write manifest in " + dir.string());
  os << "timestamp=" << utc_timestamp() << "\n";
  os << "schema=" << cfg.schema << "\n";
  os << "config_hash=" << csv::format_hash(cfg.hash()) << "\n";
  std::string suites;
  for (std::size_t i = 0; i < cfg.suites.size(); ++i) suites += (i ? "," : "") + cfg.suites[i];
  os << "suites=" << suites << "\n";
  os << "exit_code=" << result.exit_code << "\n";
  if (!result.error.empty()) os << "error=" << result.error << "\n";
  for (const auto& o : result.suites) {
    os << "suite." << o.suite << "=" << (o.guard_tripped ? "guard_trip" : (o.passed ? "pass" : "fail")) << "\n";
    for (const auto& a : o.artifacts) os << "artifact=" << a << "\n";
  }
}

RunResult run_suite(const ExperimentConfig& cfg, int threads) {
  RunResult result;
  try {
    cfg.validate();
    fs::create_directories(cfg.out);
    if (!cfg.suites.empty()) {
      std::ofstream os(cfg.out / "config.txt", std::ios::trunc);
      os << "# config_hash=" << csv::format_hash(cfg.hash()) << "\n" << cfg.serialize();
    }
    const Grid grid = cfg.grid();
    Context ctx{cfg, cfg.out, make_initial_data(grid, cfg.data, cfg.seed), nullptr, {}};

    std::optional<Trajectory> stored;
    const bool want_run = std::any_of(cfg.suites.begin(), cfg.suites.end(), needs_stored_run);
    if (want_run) {
      stored = evolve(ctx.u0, cfg.solver, describe(cfg.data, cfg.seed), cfg.seed);
      ctx.traj = &*stored;
      if (cfg.save_snapshots) write_trajectory(cfg.out / "trajectory", *stored, cfg.hash());
      if (!stored->guard_trip && std::any_of(cfg.suites.begin(), cfg.suites.end(), needs_lemma_series)) {
        prepare_lemma(ctx);
      }
    }

    const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
    for (std::size_t start = 0; start < cfg.suites.size(); start += workers) {
      std::vector<std::future<SuiteOutcome>> batch;
      const std::size_t end = std::min(cfg.suites.size(), start + workers);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                   [&, name = cfg.suites[i]] { return run_one(name, ctx, false); }));
      }
      for (auto& f : batch) result.suites.push_back(f.get());
    }
    result.exit_code = exit_code_for(result.suites);
  } catch (const std::invalid_argument& e) {
    result.exit_code = kExitConfigError;
    result.error = e.what();
  }
  if (result.exit_code != kExitConfigError || fs::exists(cfg.out)) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (!ec) write_manifest(cfg.out, cfg, result);
  }
  return result;
}

SuiteOutcome verify_suite(const std::string& suite, const Trajectory& traj, const ExperimentConfig& cfg,
                          const fs::path& out_dir) {
  if (traj.empty()) throw std::invalid_argument("trajectory is empty");
  fs::create_directories(out_dir);
  Context ctx{cfg, out_dir, traj.snapshots.front(), &traj, {}};
  if (needs_lemma_series(suite) && !traj.guard_trip) prepare_lemma(ctx);
  return run_one(suite, ctx, true);
}

}  // namespace cnls
