#include "csbm/theory.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csbm/propagation.hpp"
#include "csbm/rng.hpp"

namespace csbm {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;  // 1 / sqrt(2 pi)
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

Snr1d snr_1d(double mu1, double mu_neg1, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("snr_1d: sigma^2 must be > 0");
  const double gap = mu1 - mu_neg1;
  Snr1d out;
  out.rho = gap * gap / sigma2;
  out.error = normal_cdf(-std::sqrt(out.rho) / 2.0);
  return out;
}

double structural_info(double p, double q) {
  if (!(p + q > 0.0)) throw std::invalid_argument("structural_info: p + q must be > 0");
  const double d = p - q;
  return d * d / (p + q);
}

double attribute_info(const AttributeSpec& spec) {
  const double m = static_cast<double>(spec.dim());
  double gap2 = 0.0;
  switch (spec.kind) {
    case AttributeSpec::Kind::gaussian:
    case AttributeSpec::Kind::nef:
      for (std::size_t i = 0; i < spec.mu.size(); ++i) {
        const double d = spec.mu[i] - spec.nu[i];
        gap2 += d * d;
      }
      break;
    case AttributeSpec::Kind::laplace:
      // Class means sit at +mu and -mu.
      for (double x : spec.mu) gap2 += 4.0 * x * x;
      break;
  }
  return std::sqrt(m) * std::sqrt(gap2);
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::very_limited:
      return "very-limited";
    case Regime::limited:
      return "limited";
    case Regime::sufficient:
      return "sufficient";
    case Regime::boundary:
      return "boundary";
  }
  return "?";
}

RegimeReport classify_regime(const CsbmParams& params, std::uint64_t n) {
  params.validate_for_propagation();
  if (params.p == params.q) throw std::invalid_argument("classify_regime: p = q is degenerate");
  RegimeReport r;
  r.structural = structural_info(params.p, params.q);
  r.attr_info = attribute_info(params.attr);
  r.log_ratio = std::fabs(std::log(params.p / params.q));
  const double logn = std::log(static_cast<double>(n));
  r.separability_threshold = std::sqrt(logn / (r.structural * static_cast<double>(n)));
  r.below_separability = r.attr_info < r.separability_threshold;
  if (r.attr_info < r.log_ratio && r.attr_info <= 1.0) {
    r.regime = Regime::very_limited;
  } else if (r.attr_info <= 1.0) {
    r.regime = Regime::limited;
  } else if (r.attr_info < logn) {
    r.regime = Regime::sufficient;
  } else {
    r.regime = Regime::boundary;
  }
  if (params.attr.kind != AttributeSpec::Kind::laplace && r.attr_info > 0.0) {
    const PsiMoments pm = psi_gau_moments(params.attr);
    r.rho_l_star = effective_linear_snr_infinite_w(n, params.p, params.q, pm);
    const double mu2 = r.attr_info * r.attr_info / (4.0 * static_cast<double>(params.attr.dim()));
    const MomentEstimate msg = moments_closed_form(params.attr.dim(), mu2, params.p, params.q);
    r.rho_r = effective_nonlinear_snr(n, params.p, params.q, pm, msg);
  }
  return r;
}

AssumptionReport check_assumptions(const CsbmParams& params, std::uint64_t n) {
  params.validate();
  AssumptionReport rep;
  rep.structural = (params.p + params.q > 0.0) ? structural_info(params.p, params.q) : 0.0;
  rep.structural_zero = rep.structural == 0.0;
  const double logn = std::log(static_cast<double>(n));
  rep.moderate_ratio = rep.structural * static_cast<double>(n) / (logn * logn);
  rep.balance_ratio = params.p == params.q ? 0.0 : rep.structural / std::fabs(params.p - params.q);
  rep.attr_info = attribute_info(params.attr);
  rep.bounded_ratio = rep.attr_info / logn;
  return rep;
}

MomentEstimate moments_closed_form(std::uint64_t m, double mu2, double p, double q) {
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("moments_closed_form: p, q must be in (0, 1]");
  }
  if (!(mu2 >= 0.0)) throw std::invalid_argument("moments_closed_form: mu^T mu must be >= 0");
  MomentEstimate est;
  est.method = "closed-form";
  if (p == q) {
    // phi(., 0) is identically zero.
    return est;
  }
  const double s2 = static_cast<double>(m) * mu2;
  if (s2 == 0.0) {
    throw std::invalid_argument("moments_closed_form: m mu^T mu = 0 with p != q is singular; use Monte Carlo");
  }
  const double sign = p > q ? 1.0 : -1.0;
  const double c = std::fabs(std::log(p / q));
  const double s = std::sqrt(s2);
  const double M = c / (2.0 * s) - s;
  const double N = -c / (2.0 * s) - s;
  const double phi_m = normal_cdf(M);
  const double phi_n = normal_cdf(N);
  const double em = std::exp(-0.5 * M * M);
  const double en = std::exp(-0.5 * N * N);
  const double mean = c * (1.0 - phi_m - phi_n) + 2.0 * s2 * (phi_m - phi_n) +
                      s * std::sqrt(2.0 / std::numbers::pi) * (en - em);
  const double second = c * c + (4.0 * s2 * s2 + 4.0 * s2 - c * c) * (phi_m - phi_n) +
                        4.0 * s2 * s * kInvSqrt2Pi * (en - em) - 2.0 * c * s * kInvSqrt2Pi * (en + em);
  est.mean = sign * mean;
  est.variance = std::max(0.0, second - mean * mean);  // roundoff can dip ~-1e-15
  est.boundary_m = M;
  est.boundary_n = N;
  return est;
}

MomentEstimate moments_monte_carlo(std::uint64_t m, double mu2, double p, double q, std::uint64_t samples,
                                   std::uint64_t seed, int threads) {
  if (samples < 1000) throw std::invalid_argument("moments_monte_carlo: need at least 1e3 samples");
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("moments_monte_carlo: p, q must be in (0, 1]");
  }
  const double c = std::log(p / q);
  const double s2 = static_cast<double>(m) * mu2;
  const double sd = 2.0 * std::sqrt(s2);  // psi_gau(Z) ~ N(2 s^2, 4 s^2) in the symmetric case

  // Fixed chunking makes the reduction order independent of the thread count.
  constexpr std::uint64_t kChunk = 1u << 14;
  const std::uint64_t n_chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> sum1(n_chunks, 0.0), sum2(n_chunks, 0.0);
  const Rng base = Rng(seed).stream(RngPurpose::mc);

#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) if (threads > 1)
  for (std::int64_t chunk = 0; chunk < static_cast<std::int64_t>(n_chunks); ++chunk) {
    Rng rng = base.stream(static_cast<std::uint64_t>(chunk));
    const std::uint64_t lo = static_cast<std::uint64_t>(chunk) * kChunk;
    const std::uint64_t hi = std::min(samples, lo + kChunk);
    double a1 = 0.0, a2 = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const double z = 2.0 * s2 + sd * rng.normal();
      const double zt = phi_unchecked(z, c);
      a1 += zt;
      a2 += zt * zt;
    }
    sum1[chunk] = a1;
    sum2[chunk] = a2;
  }
  double s1 = 0.0, s2sum = 0.0;
  for (std::uint64_t i = 0; i < n_chunks; ++i) {
    s1 += sum1[i];
    s2sum += sum2[i];
  }
  MomentEstimate est;
  est.method = "monte-carlo";
  est.samples = samples;
  est.seed = seed;
  const double inv = 1.0 / static_cast<double>(samples);
  est.mean = s1 * inv;
  est.variance = std::max(0.0, (s2sum - s1 * s1 * inv) / static_cast<double>(samples - 1));
  return est;
}

double snr_empirical(std::span<const double> scores_class1, std::span<const double> scores_class_neg1) {
  if (scores_class1.size() < 2 || scores_class_neg1.size() < 2) {
    throw std::invalid_argument("snr_empirical: need at least 2 samples per class");
  }
  auto mean = [](std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  };
  const double m1 = mean(scores_class1);
  const double m2 = mean(scores_class_neg1);
  double var1 = 0.0;
  for (double x : scores_class1) var1 += (x - m1) * (x - m1);
  var1 /= static_cast<double>(scores_class1.size() - 1);
  if (!(var1 > 0.0)) throw std::invalid_argument("snr_empirical: class-1 scores have zero variance");
  return (m1 - m2) * (m1 - m2) / var1;
}

double overlapping_index(std::span<const double> density_a, std::span<const double> density_b,
                         std::span<const double> grid) {
  if (grid.size() < 2 || density_a.size() != grid.size() || density_b.size() != grid.size()) {
    throw std::invalid_argument("overlapping_index: densities and grid must share size >= 2");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (density_a[i] < 0.0 || density_b[i] < 0.0) {
      throw std::invalid_argument("overlapping_index: densities must be non-negative");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument("overlapping_index: grid must be increasing");
  }
  double mass_a = 0.0, mass_b = 0.0, overlap = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    mass_a += 0.5 * h * (density_a[i] + density_a[i + 1]);
    mass_b += 0.5 * h * (density_b[i] + density_b[i + 1]);
    overlap += 0.5 * h * (std::min(density_a[i], density_b[i]) + std::min(density_a[i + 1], density_b[i + 1]));
  }
  if (mass_a < 1.0 - 1e-6 || mass_b < 1.0 - 1e-6) {
    throw std::invalid_argument("overlapping_index: grid does not cover the density mass");
  }
  return std::clamp(overlap, 0.0, 1.0);
}

ConcentrationReport concentration_check(const AttributedGraph& g, double p, double q, double eps) {
  if (!(p > 0.0) || !(q >= 0.0)) throw std::invalid_argument("concentration_check: needs generative p > 0, q >= 0");
  const double n = static_cast<double>(g.n);
  ConcentrationReport rep;
  rep.delta1 = std::pow(n, eps - 0.5);
  rep.delta2 = std::pow(n * p, eps - 0.5);

  std::int64_t count1 = 0;
  for (std::uint32_t v = 0; v < g.n; ++v) count1 += g.labels[v] == 1 ? 1 : 0;
  const double half = n / 2.0;
  rep.class_sizes_ok = std::fabs(static_cast<double>(count1) - half) <= half * rep.delta1 &&
                       std::fabs(static_cast<double>(g.n) - static_cast<double>(count1) - half) <= half * rep.delta1;

  const double mean_deg = (p + q) * (n - 1.0) / 2.0;
  const double same_center = p / (p + q);
  const double cross_center = q / (p + q);
  bool deg_ok = true, same_ok = true, cross_ok = true;
  std::int64_t violating = 0;
  for (std::uint32_t v = 0; v < g.n; ++v) {
    auto nb = g.neighbors_of(v);
    const double deg = static_cast<double>(nb.size());
    bool node_ok = std::fabs(deg - mean_deg) <= mean_deg * rep.delta2;
    deg_ok = deg_ok && node_ok;
    if (!nb.empty()) {
      std::int64_t same = 0;
      for (std::uint32_t u : nb) same += g.labels[u] == g.labels[v] ? 1 : 0;
      const double fs = static_cast<double>(same) / deg;
      const double fc = 1.0 - fs;
      const bool s_ok = std::fabs(fs - same_center) <= same_center * rep.delta2;
      const bool c_ok = std::fabs(fc - cross_center) <= cross_center * rep.delta2;
      same_ok = same_ok && s_ok;
      cross_ok = cross_ok && c_ok;
      node_ok = node_ok && s_ok && c_ok;
    } else {
      same_ok = false;
      cross_ok = false;
      node_ok = false;
    }
    if (!node_ok) ++violating;
  }
  rep.degrees_ok = deg_ok;
  rep.same_class_fraction_ok = same_ok;
  rep.cross_class_fraction_ok = cross_ok;
  rep.violating_node_fraction = static_cast<double>(violating) / n;
  rep.all_ok = rep.class_sizes_ok && deg_ok && same_ok && cross_ok;
  return rep;
}

ErrorBounds error_bound_predictors(double rho, std::uint64_t n) {
  if (!(rho >= 0.0)) throw std::invalid_argument("error_bound_predictors: rho must be >= 0");
  ErrorBounds b;
  b.single_node = std::exp(-rho / 2.0);
  b.whole_graph = std::min(1.0, static_cast<double>(n) * b.single_node);
  return b;
}

ErrorGap error_gap_predictor(double mu_eff, double sigma_eff, double dmu1, double dmu2) {
  if (!(sigma_eff > 0.0)) throw std::invalid_argument("error_gap_predictor: sigma must be > 0");
  ErrorGap out;
  const double z = mu_eff / sigma_eff;
  out.delta_xi = std::exp(-0.5 * z * z) * kInvSqrt2Pi * (dmu1 + dmu2) / sigma_eff;
  const double s2 = sigma_eff * sigma_eff;
  out.valid = std::fabs(dmu1 * mu_eff) / s2 <= 0.1 && std::fabs(dmu2 * mu_eff) / s2 <= 0.1;
  return out;
}

PsiMoments psi_gau_moments(const AttributeSpec& spec) {
  if (spec.kind == AttributeSpec::Kind::laplace) {
    throw std::invalid_argument("psi_gau_moments: Gaussian/NEF specs only");
  }
  const double m = static_cast<double>(spec.dim());
  double gap2 = 0.0, wm = 0.0, wn = 0.0;
  for (std::size_t i = 0; i < spec.mu.size(); ++i) {
    const double d = spec.mu[i] - spec.nu[i];
    gap2 += d * d;
    wm += d * spec.mu[i];
    wn += d * spec.nu[i];
  }
  double norm_gap = 0.0;
  for (std::size_t i = 0; i < spec.mu.size(); ++i) {
    norm_gap += spec.mu[i] * spec.mu[i] - spec.nu[i] * spec.nu[i];
  }
  PsiMoments pm;
  pm.mean1 = m * (wm - norm_gap / 2.0);
  pm.mean_neg1 = m * (wn - norm_gap / 2.0);
  pm.variance = m * gap2;  // m^2 (mu-nu)^T (I/m) (mu-nu)
  return pm;
}

double effective_linear_snr(std::uint64_t n, double p, double q, const PsiMoments& psi, double w) {
  if (!(psi.variance > 0.0)) throw std::invalid_argument("effective_linear_snr: psi variance must be > 0");
  const double gap = psi.mean1 - psi.mean_neg1;
  const double nd = static_cast<double>(n);
  const double mean_factor = 1.0 + w * (p - q) * nd / 2.0;
  const double var_factor = 1.0 + w * w * (p + q) * nd / 2.0;
  return gap * gap * mean_factor * mean_factor / (psi.variance * var_factor);
}

double effective_linear_snr_infinite_w(std::uint64_t n, double p, double q, const PsiMoments& psi) {
  if (!(psi.variance > 0.0)) throw std::invalid_argument("effective_linear_snr: psi variance must be > 0");
  const double gap = psi.mean1 - psi.mean_neg1;
  return gap * gap / psi.variance * static_cast<double>(n) * structural_info(p, q) / 2.0;
}

double effective_nonlinear_snr(std::uint64_t n, double p, double q, const PsiMoments& psi,
                               const MomentEstimate& message_moments) {
  const double nd = static_cast<double>(n);
  const double gap = (psi.mean1 - psi.mean_neg1) + (p - q) * nd * message_moments.mean;
  const double var = psi.variance + (p + q) * nd / 2.0 * message_moments.variance;
  if (!(var > 0.0)) throw std::invalid_argument("effective_nonlinear_snr: zero variance");
  return gap * gap / var;
}

}  // namespace csbm
