#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace conetrace {

enum class DiffractionMethod { ClosedForm, ModeSum };

/// Kernel of exp(-i pi nu) on the link, taken against arc length.
inline constexpr const char* kSignConvention = "exp(-i*pi*nu)";
inline constexpr const char* kKernelDensity = "arc-length";

/// Guard on the distance to a pi-geodesic endpoint. Coarser than the
/// geometric classifier: cot loses precision before it overflows.
inline constexpr double kSingularityTolerance = 1e-6;

struct DiffractionCoefficient {
  std::complex<double> value;
  DiffractionMethod method = DiffractionMethod::ClosedForm;
  std::optional<double> circumference;
  std::optional<double> theta_in;
  std::optional<double> theta_out;
  /// ModeSum only: |last extrapolant - previous level| and the damping
  /// weight of the last retained mode at the smallest epsilon.
  double residual = 0.0;
  double tail_weight = 0.0;
};

/// Diffraction coefficient of a circular link of circumference alpha,
///
///   D = (i / 2 alpha) [cot(pi (delta - pi) / alpha) - cot(pi (delta + pi) / alpha)],
///
/// delta = theta_in - theta_out. This is the Abel sum of
/// (1/alpha) sum_k exp(-i pi |k| 2pi/alpha) exp(2 pi i k delta / alpha): each half
/// of the sum is a geometric series 1 / (1 - z) = 1/2 + (i/2) cot(arg z / 2).
/// Throws GeometricSingularity when theta_out is within tol of theta_in +- pi.
DiffractionCoefficient diffraction_coefficient_closed(double alpha, double theta_in, double theta_out,
                                                      double tol = kSingularityTolerance);

struct LinkMode {
  double eigenvalue = 0.0;  // mu_k of the link Laplacian
  std::complex<double> phi_in;
  std::complex<double> phi_out;
};

struct LinkSpectrum {
  std::vector<LinkMode> modes;
  int dimension = 2;
  /// ((2 - n) / 2)^2
  double shift() const;
};

/// Modes -K..K of a circle of circumference alpha with orthonormal
/// exponentials exp(2 pi i k theta / alpha) / sqrt(alpha), evaluated at the
/// given link points.
LinkSpectrum circle_link_spectrum(double alpha, double theta_in, double theta_out, std::size_t max_mode);

struct DampingSchedule {
  std::vector<double> epsilons;  // strictly decreasing, positive
  double tolerance = 1e-7;       // on the extrapolation residual
  double tail_tolerance = 1e-12; // on the damping weight of the last mode

  /// eps0, eps0/2, ..., eps0/2^(levels-1).
  static DampingSchedule halving(double eps0, int levels);
  /// eps0 = 0.008, 7 levels.
  static DampingSchedule standard();
};

/// Smallest K for which the circle spectrum is damped below
/// exp(-tail_exponent) at the schedule's smallest epsilon.
std::size_t circle_modes_for(double alpha, const DampingSchedule& schedule, double tail_exponent = 30.0);

/// Abel-damped mode sum
///
///   S(eps) = sum_k exp(-pi eps nu_k) exp(-i pi nu_k) phi_k(y) conj(phi_k(y')),
///   nu_k = sqrt(mu_k + shift),
///
/// evaluated on the schedule and extrapolated to eps = 0 by Neville's
/// polynomial scheme. Throws NonConvergent when the top two extrapolation
/// levels differ by more than schedule.tolerance or the spectrum is
/// truncated before the damping has killed the tail.
DiffractionCoefficient diffraction_coefficient_modesum(const LinkSpectrum& spectrum,
                                                       const DampingSchedule& schedule = DampingSchedule::standard());

/// Mode sum for a circle link with K from circle_modes_for.
DiffractionCoefficient diffraction_coefficient_modesum(double alpha, double theta_in, double theta_out,
                                                       const DampingSchedule& schedule = DampingSchedule::standard());

/// False iff 2 pi / alpha is a positive integer: the cone is the quotient
/// of the plane by a rotation group and its coefficient vanishes away from
/// the geometric set.
bool is_diffractive_cone(double alpha, double tol = 1e-9);

}  // namespace conetrace
