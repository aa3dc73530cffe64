#include "conetrace/diffraction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conetrace/cone_geometry.hpp"
#include "conetrace/errors.hpp"

namespace conetrace {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double cot(double x) { return std::cos(x) / std::sin(x); }

}  // namespace

DiffractionCoefficient diffraction_coefficient_closed(double alpha, double theta_in, double theta_out, double tol) {
  LinkCircle link(alpha);
  if (distance_to_geometric(link, theta_in, theta_out) <= tol)
    throw GeometricSingularity("link points are joined by a link geodesic of length pi");

  // The formula is even and alpha-periodic in delta; fmod is odd, so this
  // reduction is exactly symmetric in the two arguments.
  double delta = std::abs(std::fmod(theta_in - theta_out, alpha));
  if (delta > 0.5 * alpha) delta = alpha - delta;

  DiffractionCoefficient d;
  d.method = DiffractionMethod::ClosedForm;
  d.circumference = alpha;
  d.theta_in = theta_in;
  d.theta_out = theta_out;
  double bracket = cot(kPi * (delta - kPi) / alpha) - cot(kPi * (delta + kPi) / alpha);
  d.value = cd(0.0, bracket / (2.0 * alpha));
  return d;
}

double LinkSpectrum::shift() const {
  double h = (2.0 - dimension) / 2.0;
  return h * h;
}

LinkSpectrum circle_link_spectrum(double alpha, double theta_in, double theta_out, std::size_t max_mode) {
  LinkCircle link(alpha);
  LinkSpectrum spec;
  spec.dimension = 2;
  spec.modes.reserve(2 * max_mode + 1);
  const double norm = 1.0 / std::sqrt(alpha);
  auto mode = [&](long k) {
    double w = 2.0 * kPi * static_cast<double>(k) / alpha;
    spec.modes.push_back({w * w, std::polar(norm, w * theta_in), std::polar(norm, w * theta_out)});
  };
  mode(0);
  for (std::size_t k = 1; k <= max_mode; ++k) {
    mode(static_cast<long>(k));
    mode(-static_cast<long>(k));
  }
  return spec;
}

DampingSchedule DampingSchedule::halving(double eps0, int levels) {
  if (!(eps0 > 0.0) || levels < 2) throw ValidationError("damping schedule needs eps0 > 0 and >= 2 levels");
  DampingSchedule s;
  for (int i = 0; i < levels; ++i) s.epsilons.push_back(std::ldexp(eps0, -i));
  return s;
}

DampingSchedule DampingSchedule::standard() { return halving(0.008, 7); }

std::size_t circle_modes_for(double alpha, const DampingSchedule& schedule, double tail_exponent) {
  if (schedule.epsilons.empty()) return 0;
  double eps_min = *std::min_element(schedule.epsilons.begin(), schedule.epsilons.end());
  // exp(-pi eps nu_K) <= exp(-tail_exponent), nu_K = 2 pi K / alpha.
  double nu = tail_exponent / (kPi * eps_min);
  return static_cast<std::size_t>(std::ceil(nu * alpha / (2.0 * kPi)));
}

namespace {

void check_schedule(const DampingSchedule& schedule) {
  const auto& eps = schedule.epsilons;
  if (eps.size() < 2) throw ValidationError("damping schedule needs at least two levels");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ValidationError("damping parameters must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ValidationError("damping schedule must be strictly decreasing");
  }
}

// Damped sums sum_k exp(-pi eps nu_k) base_k at every level, extrapolated
// to eps = 0.
DiffractionCoefficient extrapolate(const std::vector<double>& nu, const std::vector<cd>& base,
                                   const DampingSchedule& schedule) {
  const auto& eps = schedule.epsilons;
  DiffractionCoefficient d;
  d.method = DiffractionMethod::ModeSum;
  if (nu.empty()) return d;

  double nu_max = *std::max_element(nu.begin(), nu.end());
  d.tail_weight = std::exp(-kPi * eps.back() * nu_max);
  if (d.tail_weight > schedule.tail_tolerance)
    throw NonConvergent("link spectrum truncated too early: last mode damped only to " +
                        std::to_string(d.tail_weight));

  // When a level is exactly twice the next one its damping factor is the
  // square of the finer factor, saving one exp per mode and level.
  const std::size_t r = eps.size();
  std::vector<bool> doubles(r, false);
  for (std::size_t j = 0; j + 1 < r; ++j) doubles[j] = eps[j] == 2.0 * eps[j + 1];
  std::vector<double> re(r, 0.0), im(r, 0.0);
  for (std::size_t k = 0; k < nu.size(); ++k) {
    double f = std::exp(-kPi * eps[r - 1] * nu[k]);
    for (std::size_t j = r; j-- > 0;) {
      if (j + 1 < r) f = doubles[j] ? f * f : std::exp(-kPi * eps[j] * nu[k]);
      re[j] += f * base[k].real();
      im[j] += f * base[k].imag();
    }
  }

  // Neville: table[i] holds the interpolant through nodes i..i+m at 0.
  // previous_top ends as the interpolant through the smallest r-1 nodes.
  std::vector<cd> table(r);
  for (std::size_t j = 0; j < r; ++j) table[j] = cd(re[j], im[j]);
  cd previous_top = table[r - 1];
  for (std::size_t m = 1; m < r; ++m) {
    for (std::size_t i = 0; i + m < r; ++i)
      table[i] = (eps[i] * table[i + 1] - eps[i + m] * table[i]) / (eps[i] - eps[i + m]);
    if (m == r - 2) previous_top = table[1];
  }
  d.value = table[0];
  d.residual = std::abs(table[0] - previous_top);
  if (d.residual > schedule.tolerance)
    throw NonConvergent("mode-sum extrapolation residual " + std::to_string(d.residual) + " exceeds tolerance");
  return d;
}

}  // namespace

DiffractionCoefficient diffraction_coefficient_modesum(const LinkSpectrum& spectrum, const DampingSchedule& schedule) {
  check_schedule(schedule);
  const double shift = spectrum.shift();
  std::vector<double> nu(spectrum.modes.size());
  std::vector<cd> base(spectrum.modes.size());
  for (std::size_t k = 0; k < nu.size(); ++k) {
    const auto& m = spectrum.modes[k];
    if (!(m.eigenvalue >= 0.0)) throw ValidationError("link eigenvalues must be nonnegative");
    nu[k] = std::sqrt(m.eigenvalue + shift);
    base[k] = std::polar(1.0, -kPi * nu[k]) * m.phi_in * std::conj(m.phi_out);
  }
  return extrapolate(nu, base, schedule);
}

DiffractionCoefficient diffraction_coefficient_modesum(double alpha, double theta_in, double theta_out,
                                                       const DampingSchedule& schedule) {
  LinkCircle link(alpha);
  check_schedule(schedule);
  // Modes +k and -k share nu_k = 2 pi k / alpha; their eigenfunction
  // products add to 2 cos(nu_k (theta_in - theta_out)) / alpha.
  const std::size_t modes = circle_modes_for(alpha, schedule);
  const double delta = theta_in - theta_out;
  std::vector<double> nu(modes + 1);
  std::vector<cd> base(modes + 1);
  nu[0] = 0.0;
  base[0] = 1.0 / alpha;
  for (std::size_t k = 1; k <= modes; ++k) {
    nu[k] = 2.0 * kPi * static_cast<double>(k) / alpha;
    base[k] = std::polar(2.0 * std::cos(nu[k] * delta) / alpha, -kPi * nu[k]);
  }
  auto d = extrapolate(nu, base, schedule);
  d.circumference = alpha;
  d.theta_in = theta_in;
  d.theta_out = theta_out;
  return d;
}

bool is_diffractive_cone(double alpha, double tol) {
  if (!(alpha > 0.0)) throw ValidationError("cone angle must be positive");
  double ratio = 2.0 * kPi / alpha;
  double nearest = std::round(ratio);
  return !(nearest >= 1.0 && std::abs(ratio - nearest) <= tol * std::max(1.0, ratio));
}

}  // namespace conetrace
