#include "conetrace/spectral_compare.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "conetrace/errors.hpp"

namespace conetrace {

namespace {

using cd = std::complex<double>;

constexpr std::size_t kChunk = 1024;
constexpr double kNegligibleWeight = 1e-18;

cd pairwise_sum(std::span<const cd> v) {
  if (v.size() <= 2) {
    cd s = 0.0;
    for (auto x : v) s += x;
    return s;
  }
  std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

bool is_uniform(std::span<const double> t, std::size_t lo, std::size_t hi) {
  if (hi - lo < 3) return false;
  double step = t[lo + 1] - t[lo];
  if (!(step > 0.0)) return false;
  for (std::size_t i = lo + 1; i < hi; ++i)
    if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * step) return false;
  return true;
}

void trace_block(std::span<const double> lambda, std::span<const double> weight, std::span<const double> t,
                 std::size_t lo, std::size_t hi, std::span<cd> out) {
  const std::size_t n = hi - lo;
  const std::size_t chunks = (lambda.size() + kChunk - 1) / kChunk;
  std::vector<cd> partial(chunks * n, cd(0.0));
  const bool uniform = is_uniform(t, lo, hi);
  const double t0 = t[lo];
  const double step = uniform ? (t[hi - 1] - t0) / static_cast<double>(n - 1) : 0.0;

  for (std::size_t c = 0; c < chunks; ++c) {
    std::size_t j0 = c * kChunk, j1 = std::min(lambda.size(), j0 + kChunk);
    cd* acc = partial.data() + c * n;
    for (std::size_t j = j0; j < j1; ++j) {
      if (uniform) {
        double zr = weight[j] * std::cos(t0 * lambda[j]), zi = -weight[j] * std::sin(t0 * lambda[j]);
        const double rr = std::cos(step * lambda[j]), ri = -std::sin(step * lambda[j]);
        for (std::size_t i = 0; i < n; ++i) {
          acc[i] += cd(zr, zi);
          const double nr = zr * rr - zi * ri;
          zi = zr * ri + zi * rr;
          zr = nr;
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) acc[i] += std::polar(weight[j], -t[lo + i] * lambda[j]);
      }
    }
  }
  std::vector<cd> column(chunks);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < chunks; ++c) column[c] = partial[c * n + i];
    out[lo + i] = pairwise_sum(column);
  }
}

}  // namespace

FrequencyList parse_frequencies(std::string_view text, std::string source) {
  FrequencyList out;
  out.source = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    line = line.substr(first);
    line = line.substr(0, line.find_last_not_of(" \t\r") + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size() || !std::isfinite(v))
      throw ValidationError(out.source + ":" + std::to_string(line_no) + ": cannot parse frequency '" +
                            std::string(line) + "'");
    if (v < 0.0)
      throw ValidationError(out.source + ":" + std::to_string(line_no) + ": negative frequency " + std::string(line));
    out.values.push_back(v);
    if (end == text.size()) break;
  }
  std::sort(out.values.begin(), out.values.end());
  if (out.values.empty()) out.warnings.push_back(out.source + ": no frequencies found");
  return out;
}

FrequencyList load_frequencies(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open frequency file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_frequencies(buf.str(), path.string());
}

FrequencyList doubled_rectangle_frequencies(double width, double height, double lambda_max) {
  if (!(width > 0.0) || !(height > 0.0)) throw ValidationError("rectangle sides must be positive");
  FrequencyList out;
  out.source = "doubled rectangle " + std::to_string(width) + " x " + std::to_string(height);
  const double pi = std::numbers::pi;
  const long m_max = static_cast<long>(std::floor(lambda_max * width / pi));
  const long n_max = static_cast<long>(std::floor(lambda_max * height / pi));
  for (long m = 0; m <= m_max; ++m) {
    for (long n = 0; n <= n_max; ++n) {
      double lam = pi * std::hypot(m / width, n / height);
      if (lam > lambda_max) continue;
      out.values.push_back(lam);               // Neumann
      if (m >= 1 && n >= 1) out.values.push_back(lam);  // Dirichlet
    }
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

SmoothedTrace smoothed_trace(const FrequencyList& freqs, double sigma, std::span<const double> t_grid,
                             const TraceOptions& options) {
  if (!(sigma > 0.0)) throw ValidationError("smoothing width sigma must be positive");
  SmoothedTrace tr;
  tr.sigma = sigma;
  tr.t.assign(t_grid.begin(), t_grid.end());
  tr.values.assign(t_grid.size(), cd(0.0));
  if (freqs.values.empty() || t_grid.empty()) return tr;

  // Terms damped below kNegligibleWeight times the largest weight change
  // no digit of the sum and are dropped.
  double top = 0.0;
  for (double l : freqs.values) top = std::max(top, std::exp(-0.5 * sigma * sigma * l * l));
  std::vector<double> lambda, weight;
  for (double l : freqs.values) {
    double w = std::exp(-0.5 * sigma * sigma * l * l);
    if (w < kNegligibleWeight * top) continue;
    lambda.push_back(l);
    weight.push_back(w);
  }

  const std::size_t block = std::max<std::size_t>(1, options.block);
  const std::size_t blocks = (t_grid.size() + block - 1) / block;
  auto run = [&](std::size_t b) {
    std::size_t lo = b * block, hi = std::min(t_grid.size(), lo + block);
    trace_block(lambda, weight, tr.t, lo, hi, tr.values);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < blocks; b = next++) run(b);
      });
    for (auto& th : pool) th.join();
  }
  return tr;
}

std::vector<double> full_wave_trace(const SmoothedTrace& trace) {
  std::vector<double> out(trace.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 2.0 * trace.values[i].real();
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, double step) {
  if (!(step > 0.0) || !(t1 >= t0)) throw ValidationError("grid needs step > 0 and t1 >= t0");
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = t0 + step * static_cast<double>(i);
  return g;
}

std::vector<Peak> detect_peaks(const SmoothedTrace& trace, double prominence) {
  if (!(prominence > 0.0)) throw ValidationError("prominence must be positive");
  const std::size_t n = trace.values.size();
  if (n < 3) return {};
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(trace.values[i]);
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  double median = sorted[n / 2];
  if (n % 2 == 0) {
    double lower = *std::max_element(sorted.begin(), sorted.begin() + n / 2);
    median = 0.5 * (median + lower);
  }
  const double threshold = prominence * median;

  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(mag[i] > threshold)) continue;
    if (!(mag[i] > mag[i - 1] && mag[i] >= mag[i + 1])) continue;
    double y0 = mag[i - 1], y1 = mag[i], y2 = mag[i + 1];
    double denom = y0 - 2.0 * y1 + y2;
    double shift = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    double h = shift >= 0 ? trace.t[i + 1] - trace.t[i] : trace.t[i] - trace.t[i - 1];
    peaks.push_back({trace.t[i] + shift * h, y1 - 0.25 * (y0 - y2) * shift});
  }
  return peaks;
}

ComparisonReport compare_with_prediction(std::span<const Peak> peaks, std::span<const PredictedLength> predictions,
                                         double tol) {
  if (!(tol >= 0.0)) throw ValidationError("matching tolerance must be nonnegative");
  ComparisonReport rep;
  rep.tolerance = tol;
  std::vector<bool> realized(predictions.size(), false);
  for (const auto& p : peaks) {
    std::size_t best = predictions.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < predictions.size(); ++j) {
      double d = std::abs(p.time - predictions[j].length);
      if (d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best == predictions.size() || best_d > tol) {
      rep.unmatched.push_back(p);
      continue;
    }
    realized[best] = true;
    rep.matches.push_back({p, predictions[best].length, predictions[best].diffractions});
  }
  for (std::size_t j = 0; j < predictions.size(); ++j)
    if (!realized[j]) rep.unrealized.push_back(predictions[j]);
  for (std::size_t i = 1; i < rep.matches.size(); ++i) {
    const auto& a = rep.matches[i - 1];
    const auto& b = rep.matches[i];
    rep.ratios.push_back({a.predicted, b.predicted, a.diffractions, b.diffractions,
                          a.peak.height > 0.0 ? b.peak.height / a.peak.height : 0.0});
  }
  return rep;
}

}  // namespace conetrace
