#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conetrace/cone_geometry.hpp"
#include "conetrace/geodesic_enum.hpp"

namespace conetrace {

enum class Check { Pass, Fail, Unchecked };

const char* to_string(Check c);

/// Greatest length of a segment joining two distinct cone points. Throws
/// ValidationError with fewer than two cone points or no such segment.
double dmax(const ConeGraph& config);

/// (n - 1) k / (2 L)
double hiwu_threshold(std::size_t diffractions, double length, int dimension);

/// Throws GeometricTransitionPresent for chains that are not strictly
/// diffractive.
double hiwu_threshold(const DiffractiveClosedGeodesic& chain, int dimension);

/// Region Im lambda > -rho log|Re lambda|, |Re lambda| > 1/rho.
struct RegionSpec {
  double rho = 0.0;

  bool contains(std::complex<double> lambda) const;
  std::string description() const;
};

bool bawu_region_contains(double rho, std::complex<double> lambda);

struct HypothesisReport {
  Check no_three_collinear = Check::Unchecked;
  std::vector<std::array<std::string, 3>> collinear_triples;  // labels, sorted
  Check non_conjugate = Check::Pass;
  Check diffraction_nonzero = Check::Unchecked;
  std::vector<std::string> non_diffractive_cones;
  Check escape = Check::Unchecked;
  std::string escape_note;
};

/// Collinearity over all triples of positioned cone points (area tolerance
/// 1e-12 * scale^2), conjugacy (always passes: flat metrics have no
/// conjugate points), nonvanishing diffraction at the given cones, and the
/// escape hypothesis, which is reported as unchecked.
HypothesisReport check_hypotheses(const ConeGraph& config, std::span<const std::size_t> witness_cones = {});

struct ChainThreshold {
  std::string chain;
  std::size_t diffractions = 0;
  double length = 0.0;
  double rho = 0.0;
};

struct ResonanceBandReport {
  int dimension = 2;
  double d_max = 0.0;
  double rho_star = 0.0;
  double epsilon = 0.0;
  std::size_t witness_segment = 0;
  std::string witness_chain;
  std::vector<ChainThreshold> thresholds;
  HypothesisReport hypotheses;
  bool applicable = false;
  std::string band;
  std::string lower_bound;
  std::string upper_bound;
};

/// Sharp logarithmic band around Im lambda = -(n-1)/(2 D_max) log|Re lambda|.
/// The witness is the back-and-forth chain along the longest segment
/// between distinct cone points. Per-chain thresholds are listed for every
/// strictly diffractive chain in `chains`. Failed hypotheses are reported,
/// not thrown; `applicable` is true only when every checked hypothesis
/// passes.
ResonanceBandReport optimal_band(const ConeGraph& config, int dimension, double epsilon,
                                 std::span<const DiffractiveClosedGeodesic> chains = {});

}  // namespace conetrace
