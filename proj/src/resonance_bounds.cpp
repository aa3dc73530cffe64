#include "conetrace/resonance_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "conetrace/diffraction.hpp"
#include "conetrace/errors.hpp"

namespace conetrace {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::size_t longest_segment(const ConeGraph& config) {
  if (config.cone_points().size() < 2) throw ValidationError("D_max needs at least two cone points");
  std::size_t best = config.segments().size();
  for (const auto& s : config.segments()) {
    if (s.a.cone == s.b.cone) continue;
    if (best == config.segments().size() || s.length > config.segment(best).length) best = s.id;
  }
  if (best == config.segments().size()) throw ValidationError("no segment joins two distinct cone points");
  return best;
}

}  // namespace

const char* to_string(Check c) {
  switch (c) {
    case Check::Pass: return "PASS";
    case Check::Fail: return "FAIL";
    case Check::Unchecked: return "UNCHECKED";
  }
  return "UNCHECKED";
}

double dmax(const ConeGraph& config) { return config.segment(longest_segment(config)).length; }

double hiwu_threshold(std::size_t diffractions, double length, int dimension) {
  if (!(length > 0.0)) throw ValidationError("chain length must be positive");
  return (dimension - 1) * static_cast<double>(diffractions) / (2.0 * length);
}

double hiwu_threshold(const DiffractiveClosedGeodesic& chain, int dimension) {
  if (chain.any_geometric)
    throw GeometricTransitionPresent("threshold needs a strictly diffractive chain; " + chain.id() + " is not");
  return hiwu_threshold(chain.diffractions, chain.length, dimension);
}

bool RegionSpec::contains(std::complex<double> lambda) const { return bawu_region_contains(rho, lambda); }

std::string RegionSpec::description() const {
  return "Im(lambda) > -" + fmt(rho) + " * log|Re(lambda)|, |Re(lambda)| > " + fmt(1.0 / rho);
}

bool bawu_region_contains(double rho, std::complex<double> lambda) {
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  double re = std::abs(lambda.real());
  if (!(re > 1.0 / rho)) return false;
  return lambda.imag() > -rho * std::log(re);
}

HypothesisReport check_hypotheses(const ConeGraph& config, std::span<const std::size_t> witness_cones) {
  HypothesisReport rep;
  const auto& cones = config.cone_points();

  if (config.has_positions()) {
    double lo_x = cones[0].position->x, hi_x = lo_x, lo_y = cones[0].position->y, hi_y = lo_y;
    for (const auto& c : cones) {
      lo_x = std::min(lo_x, c.position->x);
      hi_x = std::max(hi_x, c.position->x);
      lo_y = std::min(lo_y, c.position->y);
      hi_y = std::max(hi_y, c.position->y);
    }
    double scale = std::max(hi_x - lo_x, hi_y - lo_y);
    double tol = 1e-12 * scale * scale;
    for (std::size_t i = 0; i < cones.size(); ++i)
      for (std::size_t j = i + 1; j < cones.size(); ++j)
        for (std::size_t k = j + 1; k < cones.size(); ++k) {
          Point2 a = *cones[i].position, b = *cones[j].position, c = *cones[k].position;
          double area = 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
          if (area > tol) continue;
          std::array<std::string, 3> labels{cones[i].label, cones[j].label, cones[k].label};
          std::sort(labels.begin(), labels.end());
          rep.collinear_triples.push_back(labels);
        }
    std::sort(rep.collinear_triples.begin(), rep.collinear_triples.end());
    rep.no_three_collinear = rep.collinear_triples.empty() ? Check::Pass : Check::Fail;
  }

  rep.non_conjugate = Check::Pass;

  if (!witness_cones.empty()) {
    for (std::size_t id : witness_cones)
      if (!is_diffractive_cone(config.cone(id).link.circumference()))
        rep.non_diffractive_cones.push_back(config.cone(id).label);
    std::sort(rep.non_diffractive_cones.begin(), rep.non_diffractive_cones.end());
    rep.non_diffractive_cones.erase(std::unique(rep.non_diffractive_cones.begin(), rep.non_diffractive_cones.end()),
                                    rep.non_diffractive_cones.end());
    rep.diffraction_nonzero = rep.non_diffractive_cones.empty() ? Check::Pass : Check::Fail;
  }

  rep.escape = Check::Unchecked;
  rep.escape_note =
      "uniform escape of geodesics missing the cone points is not decidable from a finite cone graph; "
      "verify separately (e.g. exterior of convex obstacles)";
  return rep;
}

ResonanceBandReport optimal_band(const ConeGraph& config, int dimension, double epsilon,
                                 std::span<const DiffractiveClosedGeodesic> chains) {
  if (dimension < 2) throw ValidationError("dimension must be at least 2");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  ResonanceBandReport rep;
  rep.dimension = dimension;
  rep.epsilon = epsilon;
  rep.witness_segment = longest_segment(config);
  const auto& seg = config.segment(rep.witness_segment);
  rep.d_max = seg.length;
  rep.rho_star = (dimension - 1) / (2.0 * rep.d_max);
  rep.witness_chain = std::to_string(seg.id) + "+" + std::to_string(seg.id) + "-";

  for (const auto& c : chains) {
    if (c.any_geometric) continue;
    rep.thresholds.push_back({c.id(), c.diffractions, c.length, hiwu_threshold(c, dimension)});
  }

  std::array<std::size_t, 2> ends{seg.a.cone, seg.b.cone};
  rep.hypotheses = check_hypotheses(config, ends);
  rep.applicable = rep.hypotheses.no_three_collinear != Check::Fail && rep.hypotheses.non_conjugate == Check::Pass &&
                   rep.hypotheses.diffraction_nonzero == Check::Pass;

  rep.band = "(" + fmt(-rep.rho_star - epsilon) + ") log|Re(lambda)| < Im(lambda) < (" + fmt(-rep.rho_star + epsilon) +
             ") log|Re(lambda)|, |lambda| > " + fmt(1.0 / epsilon);
  rep.lower_bound = "N_rho(r) >= C r^(1 - eps) for every rho > " + fmt(rep.rho_star) +
                    " (C > 0 and eps > 0 not determined; requires nonzero diffraction along the witness chain)";
  rep.upper_bound = "N_rho(r) bounded for every rho < " + fmt(rep.rho_star);
  return rep;
}

}  // namespace conetrace
