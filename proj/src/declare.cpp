#include "procdrift/declare.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace procdrift {

namespace {

constexpr std::array<std::string_view, 9> kKindNames = {
    "AtMostOne",  "Response",           "AlternateResponse", "ChainResponse", "Precedence",
    "AlternatePrecedence", "ChainPrecedence", "Succession",  "NotSuccession",
};

constexpr std::array<SubsumptionEdge, 6> kEdges = {{
    {TemplateKind::ChainResponse, TemplateKind::AlternateResponse},
    {TemplateKind::AlternateResponse, TemplateKind::Response},
    {TemplateKind::ChainPrecedence, TemplateKind::AlternatePrecedence},
    {TemplateKind::AlternatePrecedence, TemplateKind::Precedence},
    {TemplateKind::Succession, TemplateKind::Response},
    {TemplateKind::Succession, TemplateKind::Precedence},
}};

TraceCheck check_response(ActivityId a, ActivityId b, std::span<const ActivityId> s) {
  TraceCheck r;
  bool b_later = false;
  for (auto it = s.rbegin(); it != s.rend(); ++it) {
    if (*it == a) {
      ++r.activations;
      if (b_later) ++r.satisfied;
    } else if (*it == b) {
      b_later = true;
    }
  }
  return r;
}

TraceCheck check_precedence(ActivityId a, ActivityId b, std::span<const ActivityId> s) {
  TraceCheck r;
  bool a_before = false;
  for (ActivityId x : s) {
    if (x == b) {
      ++r.activations;
      if (a_before) ++r.satisfied;
    } else if (x == a) {
      a_before = true;
    }
  }
  return r;
}

}  // namespace

std::string_view to_string(TemplateKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::string_view to_string(Category c) {
  switch (c) {
    case Category::immediate: return "immediate";
    case Category::eventual: return "eventual";
    case Category::negated: return "negated";
  }
  return "eventual";
}

std::optional<TemplateKind> parse_template_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == name) return static_cast<TemplateKind>(i);
  return std::nullopt;
}

std::string describe(const Constraint& c, std::span<const std::string> alphabet) {
  std::string out(to_string(c.kind));
  out += '(' + alphabet[c.a];
  if (c.b) out += ',' + alphabet[*c.b];
  return out + ')';
}

Ratio ConstraintStats::support() const {
  if (activations == 0) return Ratio(1);
  return Ratio(satisfied, activations);
}

Ratio ConstraintStats::confidence() const {
  if (traces == 0) return Ratio(0);
  return support() * Ratio(traces_with_activation, traces);
}

TraceCheck check_trace(const Constraint& c, std::span<const ActivityId> s) {
  const ActivityId a = c.a;
  const ActivityId b = c.b.value_or(a);
  const std::size_t n = s.size();
  TraceCheck r;
  switch (c.kind) {
    case TemplateKind::AtMostOne: {
      r.activations = std::count(s.begin(), s.end(), a);
      r.satisfied = r.activations == 1 ? 1 : 0;
      break;
    }
    case TemplateKind::Response:
      return check_response(a, b, s);
    case TemplateKind::AlternateResponse: {
      // Positions of the nearest a and b strictly after the current event.
      std::size_t next_a = n, next_b = n;
      for (std::size_t i = n; i-- > 0;) {
        if (s[i] == a) {
          ++r.activations;
          if (next_b < next_a) ++r.satisfied;
          next_a = i;
        } else if (s[i] == b) {
          next_b = i;
        }
      }
      break;
    }
    case TemplateKind::ChainResponse:
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] != a) continue;
        ++r.activations;
        if (i + 1 < n && s[i + 1] == b) ++r.satisfied;
      }
      break;
    case TemplateKind::Precedence:
      return check_precedence(a, b, s);
    case TemplateKind::AlternatePrecedence: {
      // Nearest a and b strictly before the current event; n means none.
      std::size_t last_a = n, last_b = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] == b) {
          ++r.activations;
          if (last_a != n && (last_b == n || last_a > last_b)) ++r.satisfied;
          last_b = i;
        } else if (s[i] == a) {
          last_a = i;
        }
      }
      break;
    }
    case TemplateKind::ChainPrecedence:
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] != b) continue;
        ++r.activations;
        if (i > 0 && s[i - 1] == a) ++r.satisfied;
      }
      break;
    case TemplateKind::Succession: {
      auto fwd = check_response(a, b, s);
      auto bwd = check_precedence(a, b, s);
      r.activations = fwd.activations + bwd.activations;
      r.satisfied = fwd.satisfied + bwd.satisfied;
      break;
    }
    case TemplateKind::NotSuccession: {
      auto resp = check_response(a, b, s);
      r.activations = resp.activations;
      r.satisfied = resp.activations - resp.satisfied;
      break;
    }
  }
  return r;
}

bool activates(const Constraint& c, std::span<const ActivityId> trace) {
  return check_trace(c, trace).activations > 0;
}

std::vector<Constraint> enumerate_constraints(std::size_t k, std::span<const TemplateKind> kinds) {
  std::vector<TemplateKind> sorted(kinds.begin(), kinds.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<Constraint> out;
  for (TemplateKind kind : sorted) {
    for (ActivityId a = 0; a < k; ++a) {
      if (arity(kind) == 1) {
        out.push_back({kind, a, std::nullopt});
        continue;
      }
      for (ActivityId b = 0; b < k; ++b)
        if (a != b) out.push_back({kind, a, b});
    }
  }
  return out;
}

std::vector<Constraint> enumerate_constraints(std::span<const std::string> alphabet,
                                              std::span<const TemplateKind> kinds) {
  return enumerate_constraints(alphabet.size(), kinds);
}

ConstraintStats measure(const Constraint& c, const EventLog& log, const SubLogWindow& window) {
  ConstraintStats stats;
  const auto& order = log.start_order();
  for (std::size_t pos = window.first; pos < window.last; ++pos) {
    auto r = check_trace(c, log.encoded(order[pos]));
    stats.activations += r.activations;
    stats.satisfied += r.satisfied;
    if (r.activations > 0) ++stats.traces_with_activation;
  }
  stats.traces = static_cast<std::int64_t>(window.size());
  return stats;
}

ConstraintStats measure(const Constraint& c, const EventLog& log) {
  SubLogWindow all;
  all.first = 0;
  all.last = log.size();
  return measure(c, log, all);
}

ConstraintMatrix confidence_matrix(const EventLog& log, std::span<const SubLogWindow> windows,
                                   std::span<const Constraint> constraints, unsigned threads) {
  const auto rows = static_cast<Eigen::Index>(constraints.size());
  const auto cols = static_cast<Eigen::Index>(windows.size());
  ConstraintMatrix out = ConstraintMatrix::Zero(rows, cols);
  const auto& order = log.start_order();
  const std::size_t n = log.size();

  // Per-trace counts once per constraint, then window sums from prefix sums.
  auto fill_row = [&](std::size_t i) {
    std::vector<std::int64_t> act(n + 1, 0), sat(n + 1, 0), has(n + 1, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
      auto r = check_trace(constraints[i], log.encoded(order[pos]));
      act[pos + 1] = act[pos] + r.activations;
      sat[pos + 1] = sat[pos] + r.satisfied;
      has[pos + 1] = has[pos] + (r.activations > 0 ? 1 : 0);
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const auto& w = windows[j];
      ConstraintStats s{act[w.last] - act[w.first], sat[w.last] - sat[w.first],
                        has[w.last] - has[w.first], static_cast<std::int64_t>(w.size())};
      out(static_cast<Eigen::Index>(i), j) = boost::rational_cast<double>(s.confidence());
    }
  };

  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, constraints.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < constraints.size(); ++i) fill_row(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < constraints.size(); i = next++) fill_row(i);
    });
  pool.clear();
  return out;
}

std::span<const SubsumptionEdge> subsumption_edges() { return kEdges; }

bool subsumes(TemplateKind stricter, TemplateKind weaker) {
  if (stricter == weaker) return true;
  for (const auto& e : kEdges)
    if (e.stricter == stricter && subsumes(e.weaker, weaker)) return true;
  return false;
}

std::vector<std::size_t> minimize_constraints(std::span<const MeasuredConstraint> constraints,
                                              double threshold) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& ci = constraints[i];
    if (ci.confidence < threshold) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < constraints.size() && !dominated; ++j) {
      const auto& cj = constraints[j];
      if (j == i || cj.confidence < threshold) continue;
      if (cj.constraint.a != ci.constraint.a || cj.constraint.b != ci.constraint.b) continue;
      dominated = cj.constraint.kind != ci.constraint.kind &&
                  subsumes(cj.constraint.kind, ci.constraint.kind);
    }
    if (!dominated) kept.push_back(i);
  }
  return kept;
}

}  // namespace procdrift
