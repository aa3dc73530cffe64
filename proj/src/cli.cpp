#include "conetrace/cli.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "conetrace/cone_geometry.hpp"
#include "conetrace/diffraction.hpp"
#include "conetrace/enumeration_cache.hpp"
#include "conetrace/errors.hpp"
#include "conetrace/geodesic_enum.hpp"
#include "conetrace/resonance_bounds.hpp"
#include "conetrace/spectral_compare.hpp"
#include "conetrace/surface_io.hpp"
#include "conetrace/trace_formula.hpp"

namespace conetrace {

namespace {

using cd = std::complex<double>;

std::string format17(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

json complex_json(cd z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json rational_json(Rational r) { return {{"num", r.num}, {"den", r.den}, {"value", r.value()}}; }

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open input file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

/// Reproducibility record. The id depends only on the command, inputs,
/// parameters and tool version; timestamps live in the sidecar file.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::map<std::string, std::string> parameters;
  std::vector<std::string> outputs;
  std::string started;

  std::string id() const {
    std::string m = command + "|" + kToolVersion;
    for (const auto& [k, v] : inputs) m += "|in:" + k + "=" + v;
    for (const auto& [k, v] : parameters) m += "|p:" + k + "=" + v;
    return sha256_hex(m).substr(0, 16);
  }

  json to_json() const {
    return {{"id", id()},          {"command", command}, {"tool_version", kToolVersion}, {"inputs", inputs},
            {"parameters", parameters}, {"outputs", outputs}, {"started", started},  {"finished", utc_now()}};
  }
};

struct Emitter {
  std::ostream& out;
  RunManifest manifest;

  void emit(json doc, const std::string& path) {
    doc["manifest_id"] = manifest.id();
    doc["command"] = manifest.command;
    doc["tool_version"] = kToolVersion;
    std::string text = doc.dump(2) + "\n";
    if (path.empty()) {
      out << text;
      return;
    }
    write_file(path, text);
    manifest.outputs.push_back(path);
  }

  void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write output file " + path);
    f << text;
  }

  void finish(const std::string& primary_out) {
    if (primary_out.empty()) return;
    write_file(primary_out + ".manifest.json", manifest.to_json().dump(2) + "\n");
  }
};

struct EnumArgs {
  std::string surface;
  double max_length = 0.0;
  std::size_t max_diffractions = 8;
  std::uint64_t node_budget = 10'000'000;
  unsigned threads = 1;
  bool no_cache = false;
  std::string out;

  EnumerationLimits limits() const {
    EnumerationLimits l;
    l.max_length = max_length;
    l.max_diffractions = max_diffractions;
    l.node_budget = node_budget;
    l.threads = threads;
    return l;
  }

  void record(RunManifest& m) const {
    m.inputs[surface] = file_hash(surface);
    m.parameters["max_length"] = format17(max_length);
    m.parameters["max_diffractions"] = std::to_string(max_diffractions);
    m.parameters["node_budget"] = std::to_string(node_budget);
  }
};

void add_enum_options(CLI::App* cmd, EnumArgs& a, bool require_length) {
  cmd->add_option("--surface", a.surface, "surface description (JSON)")->required();
  auto* len = cmd->add_option("--max-length", a.max_length, "longest closed chain to enumerate");
  if (require_length) len->required();
  cmd->add_option("--max-diffractions", a.max_diffractions, "most cone-point transitions per chain")->capture_default_str();
  cmd->add_option("--node-budget", a.node_budget, "abort enumeration past this many search nodes")->capture_default_str();
  cmd->add_option("--threads", a.threads, "worker threads")->capture_default_str();
  cmd->add_flag("--no-cache", a.no_cache, "skip the enumeration cache");
}

std::vector<DiffractiveClosedGeodesic> enumerate(const ConeGraph& g, const EnumArgs& a) {
  if (a.no_cache) return enumerate_closed_chains(g, a.limits());
  return EnumerationCache(EnumerationCache::default_directory()).enumerate(g, a.limits());
}

json dlspec_json(std::span<const LengthSpectrumEntry> spec) {
  json arr = json::array();
  for (const auto& e : spec)
    arr.push_back({{"length", e.length}, {"geodesics", e.geodesic_ids}, {"any_geometric_transition", e.any_geometric_transition}});
  return arr;
}

json singularity_json(const PredictedSingularity& p) {
  const auto& s = p.leading;
  return {{"location", s.location},
          {"exponent", rational_json(s.exponent)},
          {"log", s.log_flag},
          {"coefficient", complex_json(s.coefficient)},
          {"diffractions", s.diffractions},
          {"chains", p.chains},
          {"constant_provenance", s.provenance}};
}

json hypotheses_json(const HypothesisReport& h) {
  json triples = json::array();
  for (const auto& t : h.collinear_triples) triples.push_back(t);
  return {{"no_three_collinear", to_string(h.no_three_collinear)},
          {"collinear_triples", triples},
          {"non_conjugate", to_string(h.non_conjugate)},
          {"diffraction_nonzero", to_string(h.diffraction_nonzero)},
          {"non_diffractive_cones", h.non_diffractive_cones},
          {"escape", to_string(h.escape)},
          {"escape_note", h.escape_note}};
}

std::vector<PredictedLength> predicted_lengths(std::span<const DiffractiveClosedGeodesic> chains) {
  std::vector<PredictedLength> out;
  auto spec = dlspec(chains);
  for (const auto& e : spec) {
    PredictedLength p;
    p.length = e.length;
    p.geometric = e.any_geometric_transition;
    p.diffractions = 0;
    for (const auto& c : chains)
      if (std::abs(c.length - e.length) <= kLengthTolerance) {
        int k = static_cast<int>(c.diffractions);
        p.diffractions = p.diffractions == 0 ? k : std::min(p.diffractions, k);
      }
    out.push_back(p);
  }
  return out;
}

int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ResourceBudgetExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const GeometricSingularity& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const GeometricTransitionPresent& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const MissingCoefficient& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"conetrace: diffractive wave-trace predictions for flat cone surfaces", "conetrace"};
  app.get_formatter()->column_width(36);
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  EnumArgs geo_args;
  auto* geo = app.add_subcommand("geodesics", "enumerate closed diffractive geodesics");
  add_enum_options(geo, geo_args, true);
  geo->add_option("--out", geo_args.out, "output JSON (stdout if omitted)");

  EnumArgs dl_args;
  auto* dl = app.add_subcommand("dlspec", "diffractive length spectrum");
  add_enum_options(dl, dl_args, true);
  dl->add_option("--out", dl_args.out, "output JSON (stdout if omitted)");

  double alpha = 0.0, theta_in = 0.0, theta_out = 0.0;
  bool mode_sum = false;
  auto* dif = app.add_subcommand("diffract", "diffraction coefficient of a circular link");
  dif->add_option("--alpha", alpha, "cone angle (link circumference)")->required();
  dif->add_option("--theta-in", theta_in, "incoming link coordinate")->required();
  dif->add_option("--theta-out", theta_out, "outgoing link coordinate")->required();
  dif->add_flag("--mode-sum", mode_sum, "evaluate by Abel-damped mode sum instead of the closed form");

  EnumArgs tr_args;
  std::string transform_csv;
  double tau_min = 1e-4, tau_max = 1e-1;
  std::size_t tau_points = 41;
  auto* tr = app.add_subcommand("trace", "predicted wave-trace singularities");
  add_enum_options(tr, tr_args, true);
  tr->add_option("--out", tr_args.out, "output JSON (stdout if omitted)");
  tr->add_option("--transform-csv", transform_csv, "CSV of the numeric symbol transform near each singularity");
  tr->add_option("--tau-min", tau_min, "smallest t - L in the transform CSV")->capture_default_str();
  tr->add_option("--tau-max", tau_max, "largest t - L in the transform CSV")->capture_default_str();
  tr->add_option("--tau-points", tau_points, "log-spaced samples per singularity")->capture_default_str();

  EnumArgs cmp_args;
  cmp_args.max_diffractions = 4;
  std::string eigs, trace_csv;
  double sigma = 0.02, tmax = 10.0, tmin = 0.25, step = 0.0, prominence = kDefaultProminence, match_tol = 0.0;
  auto* cmp = app.add_subcommand("compare", "compare a smoothed spectral trace with predicted lengths");
  add_enum_options(cmp, cmp_args, false);
  cmp->add_option("--eigs", eigs, "frequency file (one sqrt-eigenvalue per line)")->required();
  cmp->add_option("--sigma", sigma, "Gaussian smoothing width in t")->capture_default_str();
  cmp->add_option("--tmax", tmax, "end of the time window; also the default --max-length")->capture_default_str();
  cmp->add_option("--tmin", tmin, "start of the time window")->capture_default_str();
  cmp->add_option("--step", step, "grid step (default sigma/4)");
  cmp->add_option("--prominence", prominence, "peak threshold as a multiple of the median |trace|")->capture_default_str();
  cmp->add_option("--match-tol", match_tol, "peak-to-length matching tolerance (default sigma)");
  cmp->add_option("--csv", trace_csv, "CSV of t, Re, Im, |trace|");
  cmp->add_option("--out", cmp_args.out, "output JSON (stdout if omitted)");

  EnumArgs band_args;
  band_args.max_diffractions = 4;
  double epsilon = 0.0;
  int dimension = 2;
  auto* bands = app.add_subcommand("bands", "resonance band thresholds");
  add_enum_options(bands, band_args, false);
  bands->add_option("--epsilon", epsilon, "band half-width")->required();
  bands->add_option("--dimension", dimension, "manifold dimension n")->capture_default_str();
  bands->add_option("--out", band_args.out, "output JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Emitter em{out, {}};
  em.manifest.started = utc_now();

  if (*geo) {
    return guarded(err, [&] {
      em.manifest.command = "geodesics";
      geo_args.record(em.manifest);
      auto g = load_surface(geo_args.surface);
      auto chains = enumerate(g, geo_args);
      json arr = json::array();
      for (const auto& c : chains) arr.push_back(chain_to_json(c));
      em.emit({{"surface", graph_to_json(g)}, {"geodesics", arr}}, geo_args.out);
      em.finish(geo_args.out);
    });
  }

  if (*dl) {
    return guarded(err, [&] {
      em.manifest.command = "dlspec";
      dl_args.record(em.manifest);
      auto g = load_surface(dl_args.surface);
      auto chains = enumerate(g, dl_args);
      em.emit({{"lengths", dlspec_json(dlspec(chains))}}, dl_args.out);
      em.finish(dl_args.out);
    });
  }

  if (*dif) {
    return guarded(err, [&] {
      em.manifest.command = "diffract";
      em.manifest.parameters = {{"alpha", format17(alpha)},
                                {"theta_in", format17(theta_in)},
                                {"theta_out", format17(theta_out)},
                                {"mode_sum", mode_sum ? "1" : "0"}};
      auto d = mode_sum ? diffraction_coefficient_modesum(alpha, theta_in, theta_out)
                        : diffraction_coefficient_closed(alpha, theta_in, theta_out);
      json doc = {{"value", complex_json(d.value)},
                  {"abs", std::abs(d.value)},
                  {"alpha", alpha},
                  {"theta_in", theta_in},
                  {"theta_out", theta_out},
                  {"method", mode_sum ? "mode_sum" : "closed_form"},
                  {"diffractive_cone", is_diffractive_cone(alpha)},
                  {"sign_convention", kSignConvention},
                  {"kernel_density", kKernelDensity}};
      if (mode_sum) {
        doc["residual"] = d.residual;
        doc["tail_weight"] = d.tail_weight;
      }
      em.emit(doc, "");
    });
  }

  if (*tr) {
    return guarded(err, [&] {
      em.manifest.command = "trace";
      tr_args.record(em.manifest);
      auto g = load_surface(tr_args.surface);
      auto chains = enumerate(g, tr_args);
      auto pred = predict_singularities(chains, g.dimension());
      json arr = json::array();
      for (const auto& p : pred.singularities) arr.push_back(singularity_json(p));
      em.emit({{"dimension", g.dimension()},
               {"sign_convention", kSignConvention},
               {"singularities", arr},
               {"excluded_geometric", pred.excluded},
               {"vanishing", pred.vanishing}},
              tr_args.out);
      if (!transform_csv.empty()) {
        if (!(tau_min > 0.0) || !(tau_max > tau_min) || tau_points < 2)
          throw ValidationError("transform CSV needs 0 < tau-min < tau-max and at least 2 points");
        std::ostringstream csv;
        csv << "location,t,re,im,abs\n";
        for (const auto& chain : chains) {
          if (chain.any_geometric) continue;
          auto sym = assemble_symbol(chain, g.dimension(), chain_coefficients(chain));
          if (sym.vanishing) continue;
          std::vector<double> times;
          for (std::size_t i = 0; i < tau_points; ++i) {
            double f = static_cast<double>(i) / static_cast<double>(tau_points - 1);
            times.push_back(sym.length + tau_min * std::pow(tau_max / tau_min, f));
          }
          auto vals = numeric_symbol_transform(sym, times);
          for (std::size_t i = 0; i < times.size(); ++i)
            csv << format17(sym.length) << ',' << format17(times[i]) << ',' << format17(vals[i].real()) << ','
                << format17(vals[i].imag()) << ',' << format17(std::abs(vals[i])) << '\n';
        }
        em.write_file(transform_csv, csv.str());
        em.manifest.outputs.push_back(transform_csv);
      }
      em.finish(tr_args.out);
    });
  }

  if (*cmp) {
    return guarded(err, [&] {
      em.manifest.command = "compare";
      if (!(sigma > 0.0)) throw ValidationError("--sigma must be positive");
      if (!(tmax > tmin)) throw ValidationError("--tmax must exceed --tmin");
      if (cmp_args.max_length <= 0.0) cmp_args.max_length = tmax;
      if (step <= 0.0) step = sigma / 4.0;
      if (match_tol <= 0.0) match_tol = sigma;
      cmp_args.record(em.manifest);
      em.manifest.inputs[eigs] = file_hash(eigs);
      em.manifest.parameters["sigma"] = format17(sigma);
      em.manifest.parameters["tmin"] = format17(tmin);
      em.manifest.parameters["tmax"] = format17(tmax);
      em.manifest.parameters["step"] = format17(step);
      em.manifest.parameters["prominence"] = format17(prominence);
      em.manifest.parameters["match_tol"] = format17(match_tol);

      auto g = load_surface(cmp_args.surface);
      auto freqs = load_frequencies(eigs);
      for (const auto& w : freqs.warnings) err << "warning: " << w << "\n";
      auto chains = enumerate(g, cmp_args);
      auto predictions = predicted_lengths(chains);

      TraceOptions opts;
      opts.threads = std::max(1u, cmp_args.threads);
      auto grid = uniform_grid(tmin, tmax, step);
      auto trace = smoothed_trace(freqs, sigma, grid, opts);
      auto peaks = detect_peaks(trace, prominence);
      auto rep = compare_with_prediction(peaks, predictions, match_tol);

      json matches = json::array(), unmatched = json::array(), unrealized = json::array(), ratios = json::array();
      for (const auto& m : rep.matches)
        matches.push_back({{"time", m.peak.time}, {"height", m.peak.height}, {"predicted", m.predicted},
                           {"diffractions", m.diffractions}});
      for (const auto& p : rep.unmatched) unmatched.push_back({{"time", p.time}, {"height", p.height}});
      for (const auto& p : rep.unrealized)
        unrealized.push_back({{"length", p.length}, {"diffractions", p.diffractions}, {"geometric", p.geometric}});
      for (const auto& r : rep.ratios)
        ratios.push_back({{"from_length", r.from_length}, {"to_length", r.to_length},
                          {"from_diffractions", r.from_diffractions}, {"to_diffractions", r.to_diffractions},
                          {"ratio", r.ratio}});
      em.emit({{"frequencies", {{"count", freqs.values.size()},
                                {"max", freqs.values.empty() ? 0.0 : freqs.values.back()},
                                {"source", freqs.source}}},
               {"sigma", sigma},
               {"tolerance", match_tol},
               {"matches", matches},
               {"unmatched_peaks", unmatched},
               {"unrealized_predictions", unrealized},
               {"amplitude_ratios", ratios},
               {"containment_ok", rep.unmatched.empty()}},
              cmp_args.out);
      if (!trace_csv.empty()) {
        std::ostringstream csv;
        csv << "t,re,im,abs\n";
        for (std::size_t i = 0; i < trace.t.size(); ++i)
          csv << format17(trace.t[i]) << ',' << format17(trace.values[i].real()) << ','
              << format17(trace.values[i].imag()) << ',' << format17(std::abs(trace.values[i])) << '\n';
        em.write_file(trace_csv, csv.str());
        em.manifest.outputs.push_back(trace_csv);
      }
      em.finish(cmp_args.out);
    });
  }

  if (*bands) {
    return guarded(err, [&] {
      em.manifest.command = "bands";
      auto g = load_surface(band_args.surface);
      if (dimension != g.dimension() && dimension != 2)
        throw ValidationError("--dimension disagrees with the surface dimension");
      if (band_args.max_length <= 0.0) band_args.max_length = 2.0 * dmax(g) * (1.0 + 1e-12);
      band_args.record(em.manifest);
      em.manifest.parameters["epsilon"] = format17(epsilon);
      em.manifest.parameters["dimension"] = std::to_string(dimension);
      auto chains = enumerate(g, band_args);
      auto rep = optimal_band(g, dimension, epsilon, chains);
      json th = json::array();
      for (const auto& t : rep.thresholds)
        th.push_back({{"chain", t.chain}, {"diffractions", t.diffractions}, {"length", t.length}, {"rho", t.rho}});
      em.emit({{"dimension", rep.dimension},
               {"d_max", rep.d_max},
               {"rho_star", rep.rho_star},
               {"epsilon", rep.epsilon},
               {"witness_segment", rep.witness_segment},
               {"witness_chain", rep.witness_chain},
               {"thresholds", th},
               {"hypotheses", hypotheses_json(rep.hypotheses)},
               {"applicable", rep.applicable},
               {"band", rep.band},
               {"lower_bound", rep.lower_bound},
               {"upper_bound", rep.upper_bound}},
              band_args.out);
      em.finish(band_args.out);
    });
  }
  return kExitUsage;
}

}  // namespace conetrace
