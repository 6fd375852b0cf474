#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "procdrift/log.hpp"
#include "procdrift/series.hpp"

namespace procdrift {

enum class TemplateKind : std::uint8_t {
  AtMostOne,
  Response,
  AlternateResponse,
  ChainResponse,
  Precedence,
  AlternatePrecedence,
  ChainPrecedence,
  Succession,
  NotSuccession,
};

inline constexpr std::array<TemplateKind, 9> kAllTemplateKinds = {
    TemplateKind::AtMostOne,           TemplateKind::Response,
    TemplateKind::AlternateResponse,   TemplateKind::ChainResponse,
    TemplateKind::Precedence,          TemplateKind::AlternatePrecedence,
    TemplateKind::ChainPrecedence,     TemplateKind::Succession,
    TemplateKind::NotSuccession,
};

enum class Category : std::uint8_t { immediate, eventual, negated };

constexpr int arity(TemplateKind k) { return k == TemplateKind::AtMostOne ? 1 : 2; }

constexpr Category category(TemplateKind k) {
  switch (k) {
    case TemplateKind::ChainResponse:
    case TemplateKind::ChainPrecedence:
      return Category::immediate;
    case TemplateKind::NotSuccession:
      return Category::negated;
    default:
      return Category::eventual;
  }
}

std::string_view to_string(TemplateKind k);
std::string_view to_string(Category c);
std::optional<TemplateKind> parse_template_kind(std::string_view name);

/// `a` is the first template parameter. It is the activation for AtMostOne,
/// the Response family and NotSuccession, and the target for the Precedence
/// family, whose activation is `b`.
struct Constraint {
  TemplateKind kind = TemplateKind::Response;
  ActivityId a = 0;
  std::optional<ActivityId> b;

  auto operator<=>(const Constraint&) const = default;
};

/// "Response(a,b)" with activity labels.
std::string describe(const Constraint& c, std::span<const std::string> alphabet);

using Ratio = boost::rational<std::int64_t>;

struct TraceCheck {
  std::int64_t activations = 0;
  std::int64_t satisfied = 0;

  bool operator==(const TraceCheck&) const = default;
};

struct ConstraintStats {
  std::int64_t activations = 0;
  std::int64_t satisfied = 0;
  std::int64_t traces_with_activation = 0;
  std::int64_t traces = 0;

  /// satisfied / activations; 1 when the activation never occurs.
  Ratio support() const;
  /// support * traces_with_activation / traces.
  Ratio confidence() const;
};

/// Event-based check: every occurrence of the activation is one activation.
TraceCheck check_trace(const Constraint& c, std::span<const ActivityId> trace);

/// Whether the trace holds any activation of `c`.
bool activates(const Constraint& c, std::span<const ActivityId> trace);

std::vector<Constraint> enumerate_constraints(std::size_t alphabet_size,
                                              std::span<const TemplateKind> kinds);
std::vector<Constraint> enumerate_constraints(std::span<const std::string> alphabet,
                                              std::span<const TemplateKind> kinds);

/// Aggregates over the window's traces (positions into log.start_order()).
ConstraintStats measure(const Constraint& c, const EventLog& log, const SubLogWindow& window);
/// Aggregates over every trace of the log.
ConstraintStats measure(const Constraint& c, const EventLog& log);

/// Rows follow `constraints`, columns follow `windows`. Cells are independent,
/// so the parallel evaluation (`threads` workers, 0 = hardware concurrency) is
/// bit-identical to a sequential one.
ConstraintMatrix confidence_matrix(const EventLog& log, std::span<const SubLogWindow> windows,
                                   std::span<const Constraint> constraints,
                                   unsigned threads = 0);

struct SubsumptionEdge {
  TemplateKind stricter;
  TemplateKind weaker;
};

/// Direct edges of the template hierarchy (Chain -> Alternate -> base for both
/// families, Succession -> Response and Precedence).
std::span<const SubsumptionEdge> subsumption_edges();

/// Reflexive-transitive closure of subsumption_edges().
bool subsumes(TemplateKind stricter, TemplateKind weaker);

struct MeasuredConstraint {
  Constraint constraint;
  double confidence = 0.0;
};

/// Indices of the constraints that reach `threshold` and have no strictly
/// stricter constraint on the same (a, b) that also reaches it. Input order is
/// preserved.
std::vector<std::size_t> minimize_constraints(std::span<const MeasuredConstraint> constraints,
                                              double threshold = 0.9);

}  // namespace procdrift
