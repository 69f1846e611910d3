#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cnls/decomposition.hpp"
#include "cnls/norms.hpp"
#include "cnls/report.hpp"

namespace cnls {

/// Every pass tolerance in one place.
namespace tolerance {
inline constexpr double dispersive = 0.10;
inline constexpr double lemma = 0.15;
inline constexpr double lemma31_l4 = 0.10;
inline constexpr double window_stability = 0.25;
inline constexpr double besov_tail = 0.05;
inline constexpr double bilinear = 0.25;
inline constexpr double gronwall_constant = 0.25;
inline constexpr double gronwall_uniform = 0.10;
inline constexpr double morawetz = 0.20;
}  // namespace tolerance

/// Free-flow decay window; t_hi = 0 selects T_valid.
struct DecayWindow {
  double t_lo = 0.2;
  double t_hi = 0.0;
  int samples = 12;
};

/// Sample times for a decay check. Throws std::invalid_argument when the
/// window reaches beyond T_valid or holds fewer than 4 samples.
std::vector<double> decay_sample_times(const Grid& grid, const DecayWindow& window);

struct DispersiveResult {
  CheckReport linf;
  CheckReport l7;
  NormSeries linf_series;
  NormSeries l7_series;
};

/// ||e^{it Laplacian} u0||_inf ~ t^{-3/2} (within 0.1) and ||.||_{L^7} decaying
/// at least like t^{-15/14}. Premultiplied sups are normalized by ||u0||_{L^1}
/// and ||u0||_{L^{7/6}}. Throws std::invalid_argument unless u0 is localized.
DispersiveResult check_dispersive(const Field& u0, const DecayWindow& window = {});

/// Lemma series for the v/w split at sample times in [t_lo, t_hi].
struct LemmaWindow {
  double t_lo = 0.05;
  double t_hi = 1.0;
  int samples = 16;
};

struct LemmaSeries {
  double delta = 0.0;
  NormSeries v_sup;        // ||v||_inf
  NormSeries grad_v_sup;   // ||grad v||_inf
  NormSeries w_half_l3;    // || |grad|^{1/2} w ||_{L^3}
  NormSeries v_h1;         // ||grad v||_{L^2}
  NormSeries w_h1;         // ||grad w||_{L^2}
  double max_residual = 0.0;
};

/// Snapshot times nearest to log-spaced targets in the window (duplicates dropped).
std::vector<double> lemma_sample_times(const Trajectory& traj, const LemmaWindow& window);
LemmaSeries compute_lemma_series(DuhamelIntegrator& integrator, double delta,
                                 const LemmaWindow& window = {});

/// ||v|| <~ (delta t)^{-1/2} and ||grad v||_inf <~ (delta t)^{-1}.
std::pair<CheckReport, CheckReport> check_lemma_2_2(const LemmaSeries& s);
/// || |grad|^{1/2} w ||_{L^3} <~ (delta t)^{-1/4}.
CheckReport check_lemma_2_3(const LemmaSeries& s);
/// H^1 seminorm <~ (delta t)^{-1/4}, reported for v and for w.
std::pair<CheckReport, CheckReport> check_lemma_2_4(const LemmaSeries& s);

std::pair<CheckReport, CheckReport> check_lemma_2_2(const Trajectory& traj, double delta);
CheckReport check_lemma_2_3(const Trajectory& traj, double delta);
std::pair<CheckReport, CheckReport> check_lemma_2_4(const Trajectory& traj, double delta);

struct LinearDecayResult {
  CheckReport l4;
  CheckReport grad_sup;
  NormSeries l4_series;
  NormSeries grad_sup_series;
};

/// ||u_l||_{L^4} <~ t^{-1/8} and ||grad u_l||_inf <~ t^{-1}. Throws
/// std::invalid_argument unless u0 is localized.
LinearDecayResult check_lemma_3_1(const Field& u0, const DecayWindow& window = {});

/// Dyadic sum  sum_j 2^{j/2} ||P_j F(u)||_{L^1_t L^2_x}  with the low block
/// counted at j_min.
struct BesovSum {
  int j_min = 0;
  int j_top_resolvable = 0;
  std::vector<int> bands;
  std::vector<double> terms;
  double total = 0.0;
  double tail = 0.0;
  double tail_fraction() const { return total > 0.0 ? tail / total : 0.0; }
};

BesovSum besov_sum(const Trajectory& traj, double t_lo, double t_hi);
/// Tail beyond the top resolvable band below 5% of the total.
CheckReport check_besov_sum(const BesovSum& sum);
CheckReport check_besov_sum(const Trajectory& traj);
/// Tail fraction strictly smaller on the refined grid.
CheckReport check_besov_refinement(const BesovSum& coarse, const BesovSum& fine);

/// Bilinear estimate experiment on a 1D grid:
///   ||(e^{it Lap} P_j u0)(e^{it Lap} P_k v0)||_{L^2_{t,x}}
///     vs 2^{-j/2} 2^{k(d-1)/2} ||P_j u0|| ||P_k v0||
/// over t in [-T_j, T_j], T_j = L / (8 2^{j+1}) (the band's wrap-around
/// horizon). Trial data are complex white noise under a Gaussian window of
/// width c 2^{-k}, projected onto the band.
struct BilinearOptions {
  int n = 16384;
  double box_length = 64.0;
  double window_scale = 4.0;
  int time_samples = 801;
  int trials = 4;
  std::uint64_t seed = 1;
  std::vector<int> gaps{2, 3, 4, 5, 6};
  int k_min = 0;
};

/// Largest LHS/RHS ratio over the trials. Throws std::invalid_argument when
/// k > j - 2 or a band is not resolvable.
double bilinear_ratio(const BilinearOptions& opt, int j, int k);
/// LHS and RHS for the given pair of initial data on any grid.
std::pair<double, double> bilinear_sides(const Field& u0, const Field& v0, int j, int k, double t_half,
                                         int time_samples);

struct BilinearSweep {
  int gap = 0;
  std::vector<int> j;
  std::vector<double> ratio;
};

/// Per gap: fitted = largest ratio(j+1)/ratio(j) (target 1, at_most 0.25),
/// stability = max/min over j (tolerance 0.25).
std::vector<CheckReport> check_bilinear_strichartz(const BilinearOptions& opt,
                                                   std::vector<BilinearSweep>* sweeps = nullptr);
/// Single comparison of (j, k) with (j+1, k+1).
CheckReport check_bilinear_strichartz(int j, int k, int trials, std::uint64_t seed);

/// C = lhs/rhs of the Morawetz comparison on [0, T1] and [0, T2];
/// fitted = C2/C1 within 0.2 of 1.
CheckReport check_morawetz(const Trajectory& traj, double t1, double t2);

struct GronwallSeries {
  std::vector<double> t;
  std::vector<double> c;
};

/// c(t) = dmodE_dt / (t^{-15/14} (1 + modE)).
GronwallSeries gronwall_series(std::span<const EnergyLedger> ledgers);

/// Compares ledgers on [1, T] with ledgers on [1, 2T] (the first is normally
/// a prefix of the second, re-differentiated). Reports sup|c| stability
/// (within 0.25), modE(T)/modE(2T) (within 0.1) and the envelope constant
/// (finite). Throws std::invalid_argument with fewer than 8 samples.
std::vector<CheckReport> check_gronwall(std::span<const EnergyLedger> ledgers_t,
                                        std::span<const EnergyLedger> ledgers_2t);
/// Splits one ledger on [1, 2T] at T = midpoint horizon and runs the check.
std::vector<CheckReport> check_gronwall(std::span<const EnergyLedger> ledgers_2t);

}  // namespace cnls
