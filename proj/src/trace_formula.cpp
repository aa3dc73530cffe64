#include "conetrace/trace_formula.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <numeric>

#include "conetrace/diffraction.hpp"
#include "conetrace/errors.hpp"

namespace conetrace {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;
const cd kI{0.0, 1.0};

cd i_power(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double bump(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / (x * (1.0 - x)));
}

double bump_integral(double upper) {
  return boost::math::quadrature::gauss<double, 40>::integrate(bump, 0.0, upper);
}

double logistic_part(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// Solves the square complex system a x = b in place (partial pivoting).
std::vector<cd> solve(std::vector<std::vector<cd>> a, std::vector<cd> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      cd f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<cd> x(n);
  for (std::size_t i = n; i-- > 0;) {
    cd s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Integral of f over [a, b] for complex f, by real and imaginary parts.
template <class F>
cd gk_complex(F f, double a, double b, double tol, double& err) {
  double e_re = 0.0, e_im = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double re = GK::integrate([&](double x) { return f(x).real(); }, a, b, 15, tol, &e_re);
  double im = GK::integrate([&](double x) { return f(x).imag(); }, a, b, 15, tol, &e_im);
  err = std::max(err, std::hypot(e_re, e_im));
  return {re, im};
}

template <class F>
cd half_line_complex(F f, double a, double tol, double& err) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double e_re = 0.0, e_im = 0.0;
  double re = integrator.integrate([&](double x) { return f(x).real(); }, a,
                                   std::numeric_limits<double>::infinity(), tol, &e_re);
  double im = integrator.integrate([&](double x) { return f(x).imag(); }, a,
                                   std::numeric_limits<double>::infinity(), tol, &e_im);
  err = std::max(err, std::hypot(e_re, e_im));
  return {re, im};
}

// int_0^inf chi(xi) xi^-s exp((i tau - taper) xi) dxi, without prefactor.
cd transform_at(double tau, double s, double taper, CutoffProfile profile, double tol, double& err) {
  const cd z{-taper, tau};
  cd head = gk_complex([&](double xi) { return cutoff(profile, xi) * std::pow(xi, -s) * std::exp(z * xi); }, 0.0,
                       1.0, tol, err);
  cd tail;
  if (tau > 0.0) {
    // xi = 1 + i y
    tail = kI * std::exp(z) *
           half_line_complex([&](double y) { return std::pow(cd(1.0, y), -s) * std::exp(z * cd(0.0, y)); }, 0.0,
                             tol, err);
  } else if (tau < 0.0) {
    // xi = 1 - i y
    tail = -kI * std::exp(z) *
           half_line_complex([&](double y) { return std::pow(cd(1.0, -y), -s) * std::exp(z * cd(0.0, -y)); }, 0.0,
                             tol, err);
  } else {
    if (taper <= 0.0 && s <= 1.0) throw NonConvergent("symbol transform diverges at t = L without a taper");
    tail = half_line_complex([&](double xi) { return cd(std::pow(xi, -s) * std::exp(-taper * xi)); }, 1.0, tol, err);
  }
  return head + tail;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
  if (d == 0) throw ValidationError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational operator+(Rational a, Rational b) { return Rational(a.num * b.den + b.num * a.den, a.den * b.den); }
Rational operator-(Rational a, Rational b) { return Rational(a.num * b.den - b.num * a.den, a.den * b.den); }

SegmentData segment_amplitude(double length, int dimension) {
  if (!(length > 0.0)) throw ValidationError("segment length must be positive");
  SegmentData d;
  d.length = length;
  d.morse_index = 0;
  d.theta = 1.0;
  d.w_factor = std::pow(length, -(dimension - 1) / 2.0) * std::pow(d.theta, -0.5);
  return d;
}

double cutoff(CutoffProfile profile, double xi) {
  if (xi <= 0.0) return 0.0;
  if (xi >= 1.0) return 1.0;
  switch (profile) {
    case CutoffProfile::BumpIntegral: {
      static const double total = bump_integral(1.0);
      return bump_integral(xi) / total;
    }
    case CutoffProfile::LogisticExp: {
      double a = logistic_part(xi), b = logistic_part(1.0 - xi);
      return a / (a + b);
    }
  }
  return 1.0;
}

Rational symbol_order(int diffractions, int dimension) {
  return Rational(static_cast<std::int64_t>(diffractions) * (dimension - 1), 2);
}

cd SymbolDescriptor::evaluate(double xi) const {
  if (xi <= 0.0) return 0.0;
  return prefactor * cutoff(profile, xi) * std::pow(xi, -order.value());
}

SymbolDescriptor assemble_symbol(const DiffractiveClosedGeodesic& chain, int dimension,
                                 std::span<const cd> coefficients, CutoffProfile profile) {
  if (dimension < 2) throw ValidationError("dimension must be at least 2");
  if (chain.any_geometric)
    throw GeometricTransitionPresent("chain " + chain.id() + " has a geometric transition; the symbol needs strict diffraction");
  const std::size_t k = chain.diffractions;
  if (coefficients.size() != k || chain.transitions.size() != k || chain.traversals.size() != k)
    throw MissingCoefficient("chain " + chain.id() + " needs one diffraction coefficient per transition");
  for (const auto& d : coefficients)
    if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
      throw MissingCoefficient("non-finite diffraction coefficient on chain " + chain.id());

  SymbolDescriptor sym;
  sym.length = chain.length;
  sym.primitive_length = chain.primitive_length;
  sym.diffractions = static_cast<int>(k);
  sym.dimension = dimension;
  sym.order = symbol_order(sym.diffractions, dimension);
  sym.profile = profile;

  for (const auto& t : chain.transitions) sym.vanishing = sym.vanishing || !is_diffractive_cone(t.circumference);
  if (sym.vanishing) {
    sym.prefactor = 0.0;
    return sym;
  }

  const double kd = static_cast<double>(k);
  cd c = chain.primitive_length * std::pow(2.0 * kPi, kd * dimension / 2.0) *
         std::polar(1.0, kd * (dimension - 3) * kPi / 4.0);
  for (std::size_t j = 0; j < k; ++j) {
    SegmentData seg = segment_amplitude(chain.traversals[j].length, dimension);
    c *= i_power(-seg.morse_index) * coefficients[j] * seg.w_factor;
  }
  sym.prefactor = c;
  return sym;
}

std::vector<cd> chain_coefficients(const DiffractiveClosedGeodesic& chain) {
  std::vector<cd> out;
  out.reserve(chain.transitions.size());
  for (const auto& t : chain.transitions)
    out.push_back(diffraction_coefficient_closed(t.circumference, t.theta_in, t.theta_out).value);
  return out;
}

cd transform_constant(Rational order) {
  if (!(order.num > 0)) throw ValidationError("symbol order must be positive");
  if (order.is_integer()) {
    std::int64_t n = order.num;
    return -i_power(static_cast<int>((n - 1) % 4)) / std::tgamma(static_cast<double>(n));
  }
  double s = order.value();
  return std::tgamma(1.0 - s) * std::polar(1.0, kPi * (1.0 - s) / 2.0);
}

SingularityDescriptor time_domain_singularity(const SymbolDescriptor& symbol) {
  SingularityDescriptor d;
  d.location = symbol.length;
  d.exponent = symbol.order - Rational(1);
  d.log_flag = symbol.order.is_integer();
  d.coefficient = symbol.prefactor == cd(0.0) ? cd(0.0) : symbol.prefactor * transform_constant(symbol.order);
  d.diffractions = symbol.diffractions;
  return d;
}

std::vector<cd> numeric_symbol_transform(const SymbolDescriptor& symbol, std::span<const double> t_grid,
                                         const TransformOptions& options) {
  std::vector<cd> out(t_grid.size(), cd(0.0));
  if (symbol.prefactor == cd(0.0)) return out;
  const double s = symbol.order.value();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    double err = 0.0;
    cd v = transform_at(t_grid[i] - symbol.length, s, options.taper, symbol.profile, options.tolerance, err);
    if (!(err <= 1e3 * options.tolerance * std::max(1.0, std::abs(v))) || !std::isfinite(std::abs(v)))
      throw NonConvergent("symbol transform quadrature did not converge at t = " + std::to_string(t_grid[i]));
    out[i] = symbol.prefactor * v;
  }
  return out;
}

double fit_power_exponent(std::span<const double> tau, std::span<const cd> values) {
  const std::size_t n = std::min(tau.size(), values.size());
  if (n < 2) throw ValidationError("power fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::log(tau[i]), y = std::log(std::abs(values[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

cd fit_log_slope(std::span<const double> tau, std::span<const cd> values) {
  const std::size_t n = std::min(tau.size(), values.size());
  if (n < 2) throw ValidationError("log fit needs at least two points");
  double sx = 0, sxx = 0;
  cd sy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::log(tau[i]);
    sx += x;
    sxx += x * x;
    sy += values[i];
    sxy += x * values[i];
  }
  return (static_cast<double>(n) * sxy - sx * sy) / (n * sxx - sx * sx);
}

cd estimate_leading_coefficient(const SymbolDescriptor& symbol, double tau, const TransformOptions& options) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  const double s = symbol.order.value();
  const bool log_case = symbol.order.is_integer();
  const int smooth_terms = std::max(1, static_cast<int>(std::ceil(s))) + 1;  // 1, tau, ..., tau^(q)
  const std::size_t n = static_cast<std::size_t>(smooth_terms) + 1;

  std::vector<double> taus(n), times(n);
  for (std::size_t j = 0; j < n; ++j) {
    taus[j] = tau / std::pow(4.0, static_cast<double>(j));
    times[j] = symbol.length + taus[j];
  }
  auto values = numeric_symbol_transform(symbol, times, options);

  std::vector<std::vector<cd>> a(n, std::vector<cd>(n));
  for (std::size_t j = 0; j < n; ++j) {
    double lead = std::pow(taus[j], s - 1.0);
    if (log_case) lead *= std::log(taus[j]);
    a[j][0] = lead;
    for (int p = 0; p < smooth_terms; ++p) a[j][1 + p] = std::pow(taus[j], p);
  }
  return solve(a, values)[0];
}

TracePrediction predict_singularities(std::span<const DiffractiveClosedGeodesic> chains, int dimension,
                                      CutoffProfile profile) {
  if (dimension != 2) throw ValidationError("closed-form link coefficients are only available for n = 2");
  struct Contribution {
    SingularityDescriptor sing;
    std::string id;
  };
  std::vector<Contribution> contributions;
  TracePrediction out;
  for (const auto& chain : chains) {
    if (chain.any_geometric) {
      out.excluded.push_back(chain.id());
      continue;
    }
    auto coeffs = chain_coefficients(chain);
    auto sym = assemble_symbol(chain, dimension, coeffs, profile);
    if (sym.vanishing) {
      out.vanishing.push_back(chain.id());
      continue;
    }
    auto sing = time_domain_singularity(sym);
    sing.coefficient *= static_cast<double>(chain.orientations);
    contributions.push_back({sing, chain.id()});
  }
  std::stable_sort(contributions.begin(), contributions.end(),
                   [](const auto& a, const auto& b) { return a.sing.location < b.sing.location; });

  for (std::size_t i = 0; i < contributions.size();) {
    std::size_t j = i;
    while (j < contributions.size() &&
           contributions[j].sing.location - contributions[i].sing.location <= kLengthTolerance)
      ++j;
    Rational lead = contributions[i].sing.exponent;
    for (std::size_t q = i; q < j; ++q)
      if (contributions[q].sing.exponent.value() < lead.value()) lead = contributions[q].sing.exponent;

    PredictedSingularity p;
    p.leading.location = contributions[i].sing.location;
    p.leading.exponent = lead;
    p.leading.coefficient = 0.0;
    for (std::size_t q = i; q < j; ++q) {
      p.chains.push_back(contributions[q].id);
      if (!(contributions[q].sing.exponent == lead)) continue;
      p.leading.log_flag = contributions[q].sing.log_flag;
      p.leading.diffractions = contributions[q].sing.diffractions;
      p.leading.coefficient += contributions[q].sing.coefficient;
    }
    std::sort(p.chains.begin(), p.chains.end());
    out.singularities.push_back(std::move(p));
    i = j;
  }
  std::sort(out.excluded.begin(), out.excluded.end());
  std::sort(out.vanishing.begin(), out.vanishing.end());
  return out;
}

}  // namespace conetrace
