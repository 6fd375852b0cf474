#include "procdrift/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "procdrift/dfg.hpp"

namespace procdrift {

namespace {

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
double uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

enum class BlockKind { single, choice, parallel };

struct Block {
  BlockKind kind = BlockKind::single;
  std::vector<std::string> acts;
  bool loop = false;
};

std::string activity_name(std::size_t i) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i-- > 0);
  return s;
}

std::vector<Block> random_model(const GeneratorConfig& cfg, Rng& rng) {
  std::vector<std::string> acts;
  for (std::size_t i = 0; i < cfg.activities; ++i) acts.push_back(activity_name(i));
  std::shuffle(acts.begin(), acts.end(), rng);

  std::vector<Block> model;
  std::size_t i = 0;
  while (i < acts.size()) {
    const std::size_t left = acts.size() - i;
    const double u = uniform(rng);
    Block b;
    std::size_t take = 1;
    if (left >= 2 && u < 0.3) {
      b.kind = BlockKind::choice;
      take = left >= 3 && uniform(rng) < 0.5 ? 3 : 2;
    } else if (left >= 2 && u < 0.55) {
      b.kind = BlockKind::parallel;
      take = 2;
    }
    b.acts.assign(acts.begin() + static_cast<long>(i), acts.begin() + static_cast<long>(i + take));
    model.push_back(std::move(b));
    i += take;
  }
  if (cfg.loop && model.size() >= 3) model[1 + pick(rng, model.size() - 2)].loop = true;
  return model;
}

void play(const std::vector<Block>& model, Rng& rng, std::vector<std::string>& out) {
  for (const auto& b : model) {
    int rounds = 1;
    if (b.loop)
      while (rounds < 4 && uniform(rng) < 0.35) ++rounds;
    for (int r = 0; r < rounds; ++r) {
      switch (b.kind) {
        case BlockKind::single: out.push_back(b.acts[0]); break;
        case BlockKind::choice: out.push_back(b.acts[pick(rng, b.acts.size())]); break;
        case BlockKind::parallel: {
          auto order = b.acts;
          std::shuffle(order.begin(), order.end(), rng);
          out.insert(out.end(), order.begin(), order.end());
          break;
        }
      }
    }
  }
}

// Pairs ranked by how asymmetric their direct succession is; disjoint pairs first.
std::vector<std::pair<std::string, std::string>> swap_candidates(const EventLog& log,
                                                                 std::size_t count) {
  const Dfg dfg = mine_dfg(log);
  std::vector<std::tuple<long, std::string, std::string>> ranked;
  for (const auto& [arc, n] : dfg.arcs) {
    if (arc.first == arc.second) continue;
    auto back = dfg.arcs.find({arc.second, arc.first});
    const long reverse = back == dfg.arcs.end() ? 0 : static_cast<long>(back->second);
    ranked.emplace_back(static_cast<long>(n) - reverse, arc.first, arc.second);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });

  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> used;
  std::set<std::pair<std::string, std::string>> taken;
  for (int pass = 0; pass < 2 && out.size() < count; ++pass) {
    for (const auto& [score, a, b] : ranked) {
      if (out.size() >= count) break;
      if (score <= 0 || taken.count({a, b}) || taken.count({b, a})) continue;
      if (pass == 0 && (used.count(a) || used.count(b))) continue;
      out.emplace_back(a, b);
      taken.insert({a, b});
      used.insert(a);
      used.insert(b);
    }
  }
  if (out.size() < count)
    throw std::invalid_argument("log has too few directly-follows pairs to inject " +
                                std::to_string(count) + " changes");
  return out;
}

void apply_swaps(Trace& t, std::span<const std::pair<std::string, std::string>> swaps) {
  for (auto& e : t.events)
    for (const auto& [a, b] : swaps) {
      if (e.activity == a) e.activity = b;
      else if (e.activity == b) e.activity = a;
    }
}

}  // namespace

EventLog generate_log(const GeneratorConfig& cfg) {
  if (cfg.activities < 2) throw std::invalid_argument("need at least 2 activities");
  if (cfg.traces < 1) throw std::invalid_argument("need at least 1 trace");
  Rng rng(cfg.seed);
  const auto model = random_model(cfg, rng);

  using namespace std::chrono;
  const Timestamp base = sys_days{year{2020} / January / 1};
  std::vector<Trace> traces;
  traces.reserve(cfg.traces);
  std::vector<std::string> seq;
  for (std::size_t i = 0; i < cfg.traces; ++i) {
    seq.clear();
    play(model, rng, seq);
    Trace t;
    t.case_id = "case-" + std::to_string(i + 1);
    const Timestamp start = base + hours{static_cast<long>(i)};
    for (std::size_t k = 0; k < seq.size(); ++k)
      t.events.push_back({seq[k], start + minutes{static_cast<long>(k)}, {}});
    traces.push_back(std::move(t));
  }
  return EventLog(std::move(traces));
}

std::string_view to_string(DriftKind k) {
  switch (k) {
    case DriftKind::sudden: return "sudden";
    case DriftKind::gradual: return "gradual";
    case DriftKind::incremental: return "incremental";
    case DriftKind::reoccurring: return "reoccurring";
  }
  return "sudden";
}

std::optional<DriftKind> parse_drift_kind(std::string_view s) {
  for (auto k : {DriftKind::sudden, DriftKind::gradual, DriftKind::incremental,
                 DriftKind::reoccurring})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

InjectedDrift inject_drift(const EventLog& log, DriftKind kind, std::span<const double> fractions,
                           std::uint64_t seed) {
  if (fractions.empty()) throw std::invalid_argument("at least one drift fraction is required");
  std::vector<double> fr(fractions.begin(), fractions.end());
  for (double f : fr)
    if (!(f > 0.0 && f < 1.0))
      throw std::invalid_argument("drift fraction " + std::to_string(f) + " is outside (0,1)");
  std::sort(fr.begin(), fr.end());
  fr.erase(std::unique(fr.begin(), fr.end()), fr.end());

  const std::size_t n = log.size();
  std::vector<std::size_t> cuts;
  for (double f : fr) cuts.push_back(static_cast<std::size_t>(std::llround(f * static_cast<double>(n))));

  InjectedDrift out;
  out.kind = kind;
  out.fractions = fr;

  // Stage starts (positions in start order) and the cumulative swap list active from each.
  std::vector<std::size_t> stages;
  std::size_t swap_count = 0;
  switch (kind) {
    case DriftKind::sudden:
    case DriftKind::gradual:
      stages = cuts;
      swap_count = cuts.size();
      break;
    case DriftKind::incremental: {
      const std::size_t gap = std::max<std::size_t>(1, n / 25);
      for (std::size_t c : cuts)
        for (std::size_t s = 0; s < 3; ++s)
          if (c + s * gap < n) stages.push_back(c + s * gap);
      std::sort(stages.begin(), stages.end());
      stages.erase(std::unique(stages.begin(), stages.end()), stages.end());
      swap_count = stages.size();
      break;
    }
    case DriftKind::reoccurring:
      stages = cuts;
      swap_count = 1;
      break;
  }
  out.swapped = swap_candidates(log, swap_count);
  out.change_traces = stages;

  Rng rng(seed);
  std::vector<Trace> traces = log.traces();
  const auto& order = log.start_order();
  for (std::size_t pos = 0; pos < n; ++pos) {
    // Number of stages already started at this position.
    const auto active = static_cast<std::size_t>(
        std::upper_bound(stages.begin(), stages.end(), pos) - stages.begin());
    if (active == 0) continue;
    Trace& t = traces[order[pos]];
    std::span<const std::pair<std::string, std::string>> swaps(out.swapped);
    switch (kind) {
      case DriftKind::sudden:
      case DriftKind::incremental:
        apply_swaps(t, swaps.first(active));
        break;
      case DriftKind::gradual: {
        const std::size_t begin = stages[active - 1];
        const std::size_t end = active < stages.size() ? stages[active] : n;
        const double p = static_cast<double>(pos - begin + 1) / static_cast<double>(end - begin);
        const std::size_t settled = active - 1;
        apply_swaps(t, swaps.first(uniform(rng) < p ? active : settled));
        break;
      }
      case DriftKind::reoccurring:
        if (active % 2 == 1) apply_swaps(t, swaps);
        break;
    }
  }
  out.log = EventLog(std::move(traces));
  return out;
}

nlohmann::json ground_truth_json(const InjectedDrift& d) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(d.kind));
  j["fractions"] = d.fractions;
  j["change_traces"] = d.change_traces;
  auto& pairs = j["swapped"] = nlohmann::json::array();
  for (const auto& [a, b] : d.swapped) pairs.push_back({a, b});
  j["traces"] = d.log.size();
  return j;
}

}  // namespace procdrift
