#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csbm/graph.hpp"

namespace csbm {

/// Standard normal CDF via std::erfc (|error| < 1e-15 over the useful range);
/// chosen over a rational approximation so the moment tests are stable.
double normal_cdf(double x);
double normal_pdf(double x);

/// rho = (mu1 - mu_neg1)^2 / sigma^2 and the 1-d MAP error Phi(-sqrt(rho)/2).
struct Snr1d {
  double rho = 0.0;
  double error = 0.5;
};
Snr1d snr_1d(double mu1, double mu_neg1, double sigma2);

/// S(p, q) = (p - q)^2 / (p + q); symmetric, zero iff p = q.
double structural_info(double p, double q);

/// sqrt(m) * |mu - nu|_2 for the supported attribute families (the Laplace
/// class means sit at +mu and -mu, so the gap is 2|mu|).
double attribute_info(const AttributeSpec& spec);

enum class Regime { very_limited, limited, sufficient, boundary };
std::string regime_name(Regime r);

struct RegimeReport {
  double structural = 0.0;        // S(p, q)
  double attr_info = 0.0;         // sqrt(m) |mu - nu|
  double log_ratio = 0.0;         // |log(p / q)|
  double separability_threshold = 0.0;  // sqrt(log n / (S n))
  Regime regime = Regime::limited;
  bool below_separability = false;
  double rho_r = 0.0;       // predicted nonlinear SNR (Eq.-1 convention)
  double rho_l_star = 0.0;  // predicted linear SNR at w -> infinity
};

/// Regime classification by attribute information. very_limited is the
/// refinement attr_info < |log(p/q)| inside the limited regime; limited
/// covers attr_info <= 1; sufficient covers 1 < attr_info < log n; boundary
/// everything at or past log n.
RegimeReport classify_regime(const CsbmParams& params, std::uint64_t n);

/// Finite-n proxies of Assumptions 1 and 2, reported as raw ratios. Asymptotic
/// conditions cannot be decided at one n, so there is no hard pass/fail.
struct AssumptionReport {
  double structural = 0.0;       // S(p, q)
  double moderate_ratio = 0.0;   // S * n / (log n)^2, assumption 1 wants >> 1
  double balance_ratio = 0.0;    // S / |p - q|, assumption 1 wants bounded away from 1
  double attr_info = 0.0;        // sqrt(m) |mu - nu|
  double bounded_ratio = 0.0;    // attr_info / log n, assumption 2 wants << 1
  bool structural_zero = false;  // p == q degenerate
};
AssumptionReport check_assumptions(const CsbmParams& params, std::uint64_t n);

/// First two moments of Z~ = phi(psi_gau(Z); log(p/q)) for Z ~ N(mu, I/m)
/// in the symmetric case nu = -mu, parameterized by mu2 = mu^T mu.
struct MomentEstimate {
  double mean = 0.0;
  double variance = 0.0;
  std::string method;  // "closed-form" or "monte-carlo"
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double boundary_m = 0.0;  // standardized clamp boundaries of the closed form
  double boundary_n = 0.0;
};

/// Closed form: with s = sqrt(m mu2) and C = |log(p/q)|,
///   M = C / (2s) - s,  N = -C / (2s) - s,
///   E[Z~]  = C (1 - Phi(M) - Phi(N)) + 2 s^2 (Phi(M) - Phi(N))
///            + s sqrt(2/pi) (exp(-N^2/2) - exp(-M^2/2))
///   E[Z~2] = C^2 + (4 s^4 + 4 s^2 - C^2)(Phi(M) - Phi(N))
///            + (4 s^3 / sqrt(2 pi))(exp(-N^2/2) - exp(-M^2/2))
///            - (2 C s / sqrt(2 pi))(exp(-N^2/2) + exp(-M^2/2))
/// p < q flips the sign of the mean (phi antisymmetry); variance is even.
/// Rejects m * mu2 = 0 with p != q (boundaries singular; use Monte Carlo).
MomentEstimate moments_closed_form(std::uint64_t m, double mu2, double p, double q);

MomentEstimate moments_monte_carlo(std::uint64_t m, double mu2, double p, double q, std::uint64_t samples,
                                   std::uint64_t seed, int threads = 0);

/// Empirical Eq.-1 SNR from scores grouped by true label: squared mean gap
/// over the class-1 sample variance.
double snr_empirical(std::span<const double> scores_class1, std::span<const double> scores_class_neg1);

/// eta = integral of min(density_a, density_b) over the grid (trapezoid).
/// Rejects grids covering less than 1 - 1e-6 of either mass.
double overlapping_index(std::span<const double> density_a, std::span<const double> density_b,
                         std::span<const double> grid);

/// Membership report for the concentration ball B(delta1, delta2) with
/// delta1 = n^(eps - 1/2), delta2 = (n p)^(eps - 1/2).
struct ConcentrationReport {
  double delta1 = 0.0;
  double delta2 = 0.0;
  bool class_sizes_ok = false;
  bool degrees_ok = false;
  bool same_class_fraction_ok = false;
  bool cross_class_fraction_ok = false;
  double violating_node_fraction = 0.0;
  bool all_ok = false;
};
ConcentrationReport concentration_check(const AttributedGraph& g, double p, double q, double eps);

/// Single-node error bound exp(-rho/2) and the union-bound whole-graph
/// separability bound min(1, n exp(-rho/2)).
struct ErrorBounds {
  double single_node = 1.0;
  double whole_graph = 1.0;
};
ErrorBounds error_bound_predictors(double rho, std::uint64_t n);

/// Error gap under mean perturbations:
/// dxi ~ exp(-mu^2 / (2 sigma^2)) / sqrt(2 pi) * (dmu1 + dmu2) / sigma.
/// valid flag drops when dmu * mu / sigma^2 > 0.1 for either perturbation.
struct ErrorGap {
  double delta_xi = 0.0;
  bool valid = true;
};
ErrorGap error_gap_predictor(double mu_eff, double sigma_eff, double dmu1, double dmu2);

struct PsiMoments {
  double mean1 = 0.0;      // E[psi | Y = 1]
  double mean_neg1 = 0.0;  // E[psi | Y = -1]
  double variance = 0.0;   // var[psi | Y] (class-independent)
};

/// psi_gau moments under CSBM-G (general mu, nu).
PsiMoments psi_gau_moments(const AttributeSpec& spec);

/// Eq.-1 SNR of the linear score with the concentration approximations
/// n1 ~ n p / 2, n2 ~ n q / 2:
///   rho_l(w) = gap^2 (1 + w (p - q) n / 2)^2 / (var (1 + w^2 (p + q) n / 2)).
/// w = 0 reduces to the single-node SNR.
double effective_linear_snr(std::uint64_t n, double p, double q, const PsiMoments& psi, double w);
/// w -> infinity limit: gap^2 / var * n S(p, q) / 2.
double effective_linear_snr_infinite_w(std::uint64_t n, double p, double q, const PsiMoments& psi);

/// Predicted nonlinear SNR from the closed-form message moments plus the
/// degree-count variance, used by the regime report (diagnostic only).
double effective_nonlinear_snr(std::uint64_t n, double p, double q, const PsiMoments& psi,
                               const MomentEstimate& message_moments);

}  // namespace csbm
