#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "conetrace/cone_geometry.hpp"

namespace conetrace {

/// A segment traversed in one direction. Forward runs from endpoint a to
/// endpoint b.
struct Traversal {
  std::size_t segment = 0;
  bool reversed = false;
  double length = 0.0;

  /// Symbol used for canonical ordering: 2 * segment + reversed.
  std::size_t code() const { return 2 * segment + (reversed ? 1 : 0); }

  friend bool operator==(const Traversal& a, const Traversal& b) { return a.code() == b.code(); }
};

/// Diffraction at a cone point between traversal i (arriving) and
/// traversal i + 1 (leaving).
struct TransitionRecord {
  std::size_t cone = 0;
  double circumference = 0.0;
  double theta_in = 0.0;
  double theta_out = 0.0;
  Transition kind = Transition::StrictlyDiffractive;
};

struct DiffractiveClosedGeodesic {
  std::vector<Traversal> traversals;  // canonical rotation / orientation
  std::vector<TransitionRecord> transitions;
  double length = 0.0;
  std::size_t diffractions = 0;
  double primitive_length = 0.0;
  std::size_t multiplicity = 1;
  /// 2 when the reversed chain is a different oriented geodesic, 1 when
  /// the chain is its own reversal (e.g. a back-and-forth bounce).
  std::size_t orientations = 2;
  bool any_geometric = false;

  /// Canonical word, e.g. "0+1-".
  std::string id() const;
};

struct EnumerationLimits {
  double max_length = 0.0;
  std::size_t max_diffractions = 8;
  std::uint64_t node_budget = 10'000'000;
  unsigned threads = 1;
  double geometric_tolerance = kGeometricTolerance;
};

/// Lengths within this absolute distance are one DLSpec entry; also the
/// slack on the max_length bound.
inline constexpr double kLengthTolerance = 1e-9;

/// Lexicographically minimal rotation over both traversal orientations.
std::vector<Traversal> canonical_form(std::span<const Traversal> chain);

/// Same chain traversed backwards.
std::vector<Traversal> reversed_chain(std::span<const Traversal> chain);

struct PrimitiveDecomposition {
  std::vector<Traversal> primitive;
  std::size_t multiplicity = 1;
};

/// Smallest word w with chain = w^m.
PrimitiveDecomposition primitive_decompose(std::span<const Traversal> chain);

/// Fills transitions, lengths, primitive data and flags for a closed word.
/// Throws ValidationError if consecutive traversals do not connect.
DiffractiveClosedGeodesic make_closed_geodesic(const ConeGraph& graph, std::span<const Traversal> word,
                                               double geometric_tolerance = kGeometricTolerance);

/// Every canonical closed chain with length <= max_length and at most
/// max_diffractions cone-point transitions, sorted by (length, id).
///
/// Depth-first search over directed traversals. A canonical word starts
/// with its smallest symbol, so the search rooted at symbol c only extends
/// with symbols >= c and keeps a closed word when it is already canonical.
/// Roots run in parallel when limits.threads > 1; output is identical to
/// the serial run. Throws ResourceBudgetExceeded past limits.node_budget.
std::vector<DiffractiveClosedGeodesic> enumerate_closed_chains(const ConeGraph& graph,
                                                               const EnumerationLimits& limits);

struct LengthSpectrumEntry {
  double length = 0.0;
  std::vector<std::string> geodesic_ids;
  bool any_geometric_transition = false;
};

std::vector<LengthSpectrumEntry> dlspec(std::span<const DiffractiveClosedGeodesic> chains);
std::vector<LengthSpectrumEntry> dlspec(const ConeGraph& graph, const EnumerationLimits& limits);

}  // namespace conetrace
