#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace conetrace {

/// Square roots of Laplace eigenvalues, sorted, with multiplicity.
struct FrequencyList {
  std::vector<double> values;
  std::string source;
  std::vector<std::string> warnings;
};

/// Plain text, one frequency per line; '#' starts a comment, blank lines
/// are skipped. Throws ValidationError (with line number) on parse errors
/// and negative entries.
FrequencyList load_frequencies(const std::filesystem::path& path);
FrequencyList parse_frequencies(std::string_view text, std::string source = "<memory>");

/// Frequencies of the doubled a x b rectangle up to lambda_max: Neumann
/// modes (m, n >= 0) and Dirichlet modes (m, n >= 1), each
/// pi sqrt((m/a)^2 + (n/b)^2). The zero mode is included.
FrequencyList doubled_rectangle_frequencies(double width, double height, double lambda_max);

struct SmoothedTrace {
  std::vector<double> t;
  std::vector<std::complex<double>> values;
  double sigma = 0.0;
};

struct TraceOptions {
  unsigned threads = 1;
  std::size_t block = 256;  // grid points per block
};

/// sum_j exp(-i t lambda_j) exp(-sigma^2 lambda_j^2 / 2) on each grid time.
///
/// Blocks of grid points are independent: for each frequency the phase is
/// seeded once per block and advanced by a fixed rotation when the grid is
/// uniform. Frequencies are summed in chunks and the chunk sums combined
/// pairwise, so values are bit-stable for a fixed block size regardless of
/// thread count. Frequencies whose Gaussian weight is below 1e-18 of the
/// largest are skipped.
SmoothedTrace smoothed_trace(const FrequencyList& freqs, double sigma, std::span<const double> t_grid,
                             const TraceOptions& options = {});

/// 2 Re of the smoothed trace: the trace of the full wave group.
std::vector<double> full_wave_trace(const SmoothedTrace& trace);

std::vector<double> uniform_grid(double t0, double t1, double step);

struct Peak {
  double time = 0.0;
  double height = 0.0;
};

inline constexpr double kDefaultProminence = 5.0;

/// Local maxima of |trace| above prominence * median(|trace|), refined by a
/// parabola through the three samples around each maximum.
std::vector<Peak> detect_peaks(const SmoothedTrace& trace, double prominence = kDefaultProminence);

struct PredictedLength {
  double length = 0.0;
  int diffractions = 0;  // smallest k realizing the length
  bool geometric = false;
};

struct PeakMatch {
  Peak peak;
  double predicted = 0.0;
  int diffractions = 0;
};

struct AmplitudeRatio {
  double from_length = 0.0;
  double to_length = 0.0;
  int from_diffractions = 0;
  int to_diffractions = 0;
  double ratio = 0.0;  // height(to) / height(from)
};

struct ComparisonReport {
  std::vector<PeakMatch> matches;
  std::vector<Peak> unmatched;          // peaks with no prediction within tol
  std::vector<PredictedLength> unrealized;  // predictions with no peak
  std::vector<AmplitudeRatio> ratios;   // consecutive matched peaks
  double tolerance = 0.0;
};

ComparisonReport compare_with_prediction(std::span<const Peak> peaks, std::span<const PredictedLength> predictions,
                                         double tol);

}  // namespace conetrace
