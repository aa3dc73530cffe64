#include "conetrace/geodesic_enum.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "conetrace/errors.hpp"

namespace conetrace {

namespace {

std::size_t start_cone(const ConeGraph& g, const Traversal& t) {
  const auto& s = g.segment(t.segment);
  return t.reversed ? s.b.cone : s.a.cone;
}

std::size_t end_cone(const ConeGraph& g, const Traversal& t) {
  const auto& s = g.segment(t.segment);
  return t.reversed ? s.a.cone : s.b.cone;
}

double start_theta(const ConeGraph& g, const Traversal& t) {
  const auto& s = g.segment(t.segment);
  return t.reversed ? s.b.theta : s.a.theta;
}

double end_theta(const ConeGraph& g, const Traversal& t) {
  const auto& s = g.segment(t.segment);
  return t.reversed ? s.a.theta : s.b.theta;
}

bool lex_less(std::span<const Traversal> a, std::size_t ra, std::span<const Traversal> b, std::size_t rb) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t x = a[(ra + i) % n].code(), y = b[(rb + i) % n].code();
    if (x != y) return x < y;
  }
  return false;
}

std::vector<Traversal> rotate_copy(std::span<const Traversal> w, std::size_t r) {
  std::vector<Traversal> out;
  out.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back(w[(r + i) % w.size()]);
  return out;
}

bool is_rotation(std::span<const Traversal> a, std::span<const Traversal> b) {
  for (std::size_t r = 0; r < a.size(); ++r)
    if (!lex_less(a, r, b, 0) && !lex_less(b, 0, a, r)) return true;
  return false;
}

bool is_canonical(std::span<const Traversal> w) {
  auto rev = reversed_chain(w);
  for (std::size_t r = 0; r < w.size(); ++r) {
    if (r > 0 && lex_less(w, r, w, 0)) return false;
    if (lex_less(rev, r, w, 0)) return false;
  }
  return true;
}

struct SearchContext {
  const ConeGraph& graph;
  const EnumerationLimits& limits;
  std::vector<std::vector<Traversal>> outgoing;  // per cone, sorted by code
  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> abort{false};
};

void search_root(SearchContext& ctx, const Traversal& root, std::vector<std::vector<Traversal>>& found) {
  const double bound = ctx.limits.max_length + kLengthTolerance;
  const std::size_t root_code = root.code();
  const std::size_t home = start_cone(ctx.graph, root);
  std::vector<Traversal> path{root};

  struct Frame {
    std::size_t next_index;
    double length;
  };
  std::vector<Frame> stack{{0, root.length}};

  auto maybe_record = [&]() {
    if (end_cone(ctx.graph, path.back()) == home && is_canonical(path)) found.push_back(path);
  };
  maybe_record();

  while (!stack.empty()) {
    if (ctx.abort.load(std::memory_order_relaxed)) return;
    Frame& top = stack.back();
    const auto& out = ctx.outgoing[end_cone(ctx.graph, path.back())];
    bool descended = false;
    if (path.size() < ctx.limits.max_diffractions) {
      while (top.next_index < out.size()) {
        const Traversal& t = out[top.next_index++];
        if (t.code() < root_code) continue;
        double len = top.length + t.length;
        if (len > bound) continue;
        if (ctx.nodes.fetch_add(1, std::memory_order_relaxed) + 1 > ctx.limits.node_budget) {
          ctx.abort = true;
          throw ResourceBudgetExceeded("enumeration exceeded node budget of " +
                                       std::to_string(ctx.limits.node_budget) + " search nodes");
        }
        path.push_back(t);
        stack.push_back({0, len});
        maybe_record();
        descended = true;
        break;
      }
    }
    if (!descended) {
      stack.pop_back();
      path.pop_back();
    }
  }
}

}  // namespace

std::string DiffractiveClosedGeodesic::id() const {
  std::string s;
  for (const auto& t : traversals) s += std::to_string(t.segment) + (t.reversed ? "-" : "+");
  return s;
}

std::vector<Traversal> reversed_chain(std::span<const Traversal> chain) {
  std::vector<Traversal> out(chain.rbegin(), chain.rend());
  for (auto& t : out) t.reversed = !t.reversed;
  return out;
}

std::vector<Traversal> canonical_form(std::span<const Traversal> chain) {
  if (chain.empty()) return {};
  auto rev = reversed_chain(chain);
  std::span<const Traversal> best = chain;
  std::size_t best_r = 0;
  for (std::size_t r = 0; r < chain.size(); ++r) {
    if (lex_less(chain, r, best, best_r)) {
      best = chain;
      best_r = r;
    }
    if (lex_less(rev, r, best, best_r)) {
      best = rev;
      best_r = r;
    }
  }
  return rotate_copy(best, best_r);
}

PrimitiveDecomposition primitive_decompose(std::span<const Traversal> chain) {
  const std::size_t n = chain.size();
  for (std::size_t p = 1; p <= n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = chain[i] == chain[i - p];
    if (periodic) return {std::vector<Traversal>(chain.begin(), chain.begin() + p), n / p};
  }
  return {std::vector<Traversal>(chain.begin(), chain.end()), 1};
}

DiffractiveClosedGeodesic make_closed_geodesic(const ConeGraph& graph, std::span<const Traversal> word,
                                               double geometric_tolerance) {
  if (word.empty()) throw ValidationError("closed chain needs at least one traversal");
  DiffractiveClosedGeodesic g;
  g.traversals = canonical_form(word);
  for (auto& t : g.traversals) t.length = graph.segment(t.segment).length;
  const std::size_t k = g.traversals.size();
  g.diffractions = k;
  for (std::size_t i = 0; i < k; ++i) {
    const Traversal& in = g.traversals[i];
    const Traversal& out = g.traversals[(i + 1) % k];
    std::size_t c = end_cone(graph, in);
    if (c != start_cone(graph, out)) throw ValidationError("traversals do not form a closed chain");
    const auto& link = graph.cone(c).link;
    TransitionRecord tr;
    tr.cone = c;
    tr.circumference = link.circumference();
    tr.theta_in = end_theta(graph, in);
    tr.theta_out = start_theta(graph, out);
    tr.kind = classify_transition(link, tr.theta_in, tr.theta_out, geometric_tolerance);
    g.any_geometric = g.any_geometric || tr.kind == Transition::Geometric;
    g.transitions.push_back(tr);
    g.length += in.length;
  }
  auto prim = primitive_decompose(g.traversals);
  g.multiplicity = prim.multiplicity;
  for (const auto& t : prim.primitive) g.primitive_length += t.length;
  g.orientations = is_rotation(reversed_chain(g.traversals), g.traversals) ? 1 : 2;
  return g;
}

std::vector<DiffractiveClosedGeodesic> enumerate_closed_chains(const ConeGraph& graph,
                                                               const EnumerationLimits& limits) {
  if (!(limits.max_length > 0.0)) throw ValidationError("max_length must be positive");
  if (limits.max_diffractions < 1) throw ValidationError("max_diffractions must be at least 1");

  SearchContext ctx{graph, limits, {}, {}, {}};
  ctx.outgoing.resize(graph.cone_points().size());
  std::vector<Traversal> roots;
  for (const auto& s : graph.segments()) {
    for (bool rev : {false, true}) {
      Traversal t{s.id, rev, s.length};
      ctx.outgoing[start_cone(graph, t)].push_back(t);
      if (s.length <= limits.max_length + kLengthTolerance) roots.push_back(t);
    }
  }
  for (auto& out : ctx.outgoing)
    std::sort(out.begin(), out.end(), [](const Traversal& a, const Traversal& b) { return a.code() < b.code(); });

  std::vector<std::vector<std::vector<Traversal>>> per_root(roots.size());
  const unsigned threads = std::max(1u, std::min<unsigned>(limits.threads, static_cast<unsigned>(roots.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < roots.size(); ++i) search_root(ctx, roots[i], per_root[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t i = next++; i < roots.size(); i = next++) search_root(ctx, roots[i], per_root[i]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          ctx.abort = true;
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<DiffractiveClosedGeodesic> chains;
  for (const auto& words : per_root)
    for (const auto& w : words) chains.push_back(make_closed_geodesic(graph, w, limits.geometric_tolerance));
  std::sort(chains.begin(), chains.end(), [](const auto& a, const auto& b) {
    if (a.length != b.length) return a.length < b.length;
    return std::lexicographical_compare(
        a.traversals.begin(), a.traversals.end(), b.traversals.begin(), b.traversals.end(),
        [](const Traversal& x, const Traversal& y) { return x.code() < y.code(); });
  });
  return chains;
}

std::vector<LengthSpectrumEntry> dlspec(std::span<const DiffractiveClosedGeodesic> chains) {
  std::vector<const DiffractiveClosedGeodesic*> sorted;
  for (const auto& c : chains) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->length < b->length; });

  std::vector<LengthSpectrumEntry> out;
  double group_start = 0.0;
  for (const auto* c : sorted) {
    if (out.empty() || c->length - group_start > kLengthTolerance) {
      out.push_back({c->length, {}, false});
      group_start = c->length;
    }
    out.back().geodesic_ids.push_back(c->id());
    out.back().any_geometric_transition = out.back().any_geometric_transition || c->any_geometric;
  }
  for (auto& e : out) std::sort(e.geodesic_ids.begin(), e.geodesic_ids.end());
  return out;
}

std::vector<LengthSpectrumEntry> dlspec(const ConeGraph& graph, const EnumerationLimits& limits) {
  auto chains = enumerate_closed_chains(graph, limits);
  return dlspec(chains);
}

}  // namespace conetrace
