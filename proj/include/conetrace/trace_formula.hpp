#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "conetrace/geodesic_enum.hpp"

namespace conetrace {

/// Exact rational, always normalized with a positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  bool is_integer() const { return den == 1; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct SegmentData {
  double length = 0.0;
  int morse_index = 0;
  double theta = 1.0;
  double w_factor = 1.0;
};

/// Flat surfaces: Theta = 1, no Morse index, W = length^(-(n-1)/2).
SegmentData segment_amplitude(double length, int dimension);

/// Smooth cutoff: 0 for xi <= 0, 1 for xi >= 1.
enum class CutoffProfile {
  BumpIntegral,  // normalized integral of exp(-1/(x(1-x)))
  LogisticExp,   // f(x) / (f(x) + f(1-x)), f(x) = exp(-1/x)
};

double cutoff(CutoffProfile profile, double xi);

/// k (n - 1) / 2
Rational symbol_order(int diffractions, int dimension);

/// a(xi) = C chi(xi) xi^(-s) with
/// C = L0 (2 pi)^(kn/2) exp(i k (n-3) pi / 4) prod_j i^(-m_j) D_j W_j.
struct SymbolDescriptor {
  double length = 0.0;
  double primitive_length = 0.0;
  int diffractions = 0;
  int dimension = 2;
  Rational order;  // s
  std::complex<double> prefactor;
  CutoffProfile profile = CutoffProfile::BumpIntegral;
  bool vanishing = false;  // passes through a non-diffractive cone

  std::complex<double> evaluate(double xi) const;
};

/// Throws GeometricTransitionPresent unless every transition is strictly
/// diffractive, MissingCoefficient unless there is one finite coefficient
/// per transition. Uses the primitive length, not the total length.
SymbolDescriptor assemble_symbol(const DiffractiveClosedGeodesic& chain, int dimension,
                                 std::span<const std::complex<double>> coefficients,
                                 CutoffProfile profile = CutoffProfile::BumpIntegral);

/// Closed-form circle-link coefficients along the chain (n = 2).
std::vector<std::complex<double>> chain_coefficients(const DiffractiveClosedGeodesic& chain);

inline constexpr const char* kTransformConstantProvenance =
    "analytic leading term of int chi(xi) xi^-s e^{i tau xi} dxi; matched by numeric_symbol_transform "
    "(contour-rotated quadrature) to 1e-6, oracle v1";

/// Leading singularity of Tr U(t) at t = L:
///   coefficient * (t - L + i0)^exponent          (s not an integer)
///   coefficient * (t - L + i0)^exponent log(...)  (s integer)
struct SingularityDescriptor {
  double location = 0.0;
  Rational exponent;  // -1 + k (n - 1) / 2
  bool log_flag = false;
  std::complex<double> coefficient;
  int diffractions = 0;
  std::string provenance = kTransformConstantProvenance;
};

/// Multiplies the prefactor by the transform constant of chi(xi) xi^-s:
/// Gamma(1-s) exp(i pi (1-s)/2) for non-integer s, and
/// -i^(N-1) / (N-1)! for s = N.
SingularityDescriptor time_domain_singularity(const SymbolDescriptor& symbol);

/// Constant c(s) with int chi xi^-s e^{i tau xi} ~ c(s) tau^(s-1) [log tau].
std::complex<double> transform_constant(Rational order);

struct TransformOptions {
  double taper = 0.0;  // exp(-taper xi) damping of the xi integral
  double tolerance = 1e-10;
};

/// Quadrature of C int_0^inf exp(i (t - L) xi) chi(xi) xi^(-s) exp(-taper xi) dxi
/// on each grid time. The cutoff region [0, 1] is integrated directly; the
/// tail is rotated onto xi = 1 +- i y where it decays exponentially.
/// Throws NonConvergent if a quadrature error estimate exceeds tolerance,
/// or if t = L with no taper and s <= 1 (divergent).
std::vector<std::complex<double>> numeric_symbol_transform(const SymbolDescriptor& symbol,
                                                           std::span<const double> t_grid,
                                                           const TransformOptions& options = {});

/// Slope of log|F| against log(t - L), least squares.
double fit_power_exponent(std::span<const double> tau, std::span<const std::complex<double>> values);

/// Complex b in F ~ a + b log(t - L), least squares.
std::complex<double> fit_log_slope(std::span<const double> tau, std::span<const std::complex<double>> values);

/// Leading coefficient recovered from the numeric transform by differencing
/// at tau and tau/4 (cancels the smooth part to O(tau)).
std::complex<double> estimate_leading_coefficient(const SymbolDescriptor& symbol, double tau,
                                                  const TransformOptions& options = {});

/// Predicted singularities of the wave trace from enumerated chains, one
/// per distinct length. Chains with geometric transitions are skipped and
/// listed in `excluded`; chains through a non-diffractive cone contribute
/// nothing and are listed in `vanishing`. Contributions at a shared length
/// with the leading (smallest) exponent are summed, each weighted by its
/// orientation count.
struct PredictedSingularity {
  SingularityDescriptor leading;
  std::vector<std::string> chains;
};

struct TracePrediction {
  std::vector<PredictedSingularity> singularities;
  std::vector<std::string> excluded;
  std::vector<std::string> vanishing;
};

TracePrediction predict_singularities(std::span<const DiffractiveClosedGeodesic> chains, int dimension,
                                      CutoffProfile profile = CutoffProfile::BumpIntegral);

}  // namespace conetrace
