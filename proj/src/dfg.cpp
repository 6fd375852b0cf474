#include "procdrift/dfg.hpp"

#include <set>
#include <sstream>

namespace procdrift {

Dfg mine_dfg(const EventLog& log) {
  if (log.empty()) throw LogError("cannot mine a DFG from an empty log");
  const auto& alphabet = log.alphabet();
  const std::size_t k = alphabet.size();

  // Count on dense id-indexed tables, convert to labels once.
  std::vector<std::uint64_t> nodes(k, 0), starts(k, 0), ends(k, 0);
  std::vector<std::uint64_t> arcs(k * k, 0);
  for (std::size_t t = 0; t < log.size(); ++t) {
    auto seq = log.encoded(t);
    starts[seq.front()]++;
    ends[seq.back()]++;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      nodes[seq[i]]++;
      if (i + 1 < seq.size()) arcs[seq[i] * k + seq[i + 1]]++;
    }
  }

  Dfg dfg;
  for (std::size_t a = 0; a < k; ++a) {
    if (nodes[a]) dfg.nodes[alphabet[a]] = nodes[a];
    if (starts[a]) dfg.starts[alphabet[a]] = starts[a];
    if (ends[a]) dfg.ends[alphabet[a]] = ends[a];
    for (std::size_t b = 0; b < k; ++b)
      if (arcs[a * k + b]) dfg.arcs[{alphabet[a], alphabet[b]}] = arcs[a * k + b];
  }
  return dfg;
}

Dfg filter_dfg(const Dfg& dfg, std::uint64_t min_arc_count) {
  Dfg out;
  std::set<std::string> keep;
  for (const auto& [arc, n] : dfg.arcs) {
    if (n < min_arc_count) continue;
    out.arcs.emplace(arc, n);
    keep.insert(arc.first);
    keep.insert(arc.second);
  }
  for (const auto& [a, n] : dfg.starts) keep.insert(a);
  for (const auto& [a, n] : dfg.ends) keep.insert(a);
  for (const auto& [a, n] : dfg.nodes)
    if (keep.count(a)) out.nodes.emplace(a, n);
  out.starts = dfg.starts;
  out.ends = dfg.ends;
  return out;
}

nlohmann::json dfg_to_json(const Dfg& dfg) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [a, n] : dfg.nodes) nodes.push_back({{"activity", a}, {"count", n}});
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& [arc, n] : dfg.arcs)
    arcs.push_back({{"from", arc.first}, {"to", arc.second}, {"count", n}});
  return {{"nodes", nodes}, {"arcs", arcs}, {"starts", dfg.starts}, {"ends", dfg.ends}};
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string dfg_to_dot(const Dfg& dfg) {
  std::ostringstream out;
  out << "digraph dfg {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n";
  out << "  \"__start__\" [shape=circle, label=\"\"];\n  \"__end__\" [shape=doublecircle, label=\"\"];\n";
  for (const auto& [a, n] : dfg.nodes) {
    auto label = dot_quote(a);
    label.insert(label.size() - 1, "\\n" + std::to_string(n));
    out << "  " << dot_quote(a) << " [label=" << label << "];\n";
  }
  for (const auto& [a, n] : dfg.starts)
    out << "  \"__start__\" -> " << dot_quote(a) << " [label=\"" << n << "\", style=dashed];\n";
  for (const auto& [arc, n] : dfg.arcs)
    out << "  " << dot_quote(arc.first) << " -> " << dot_quote(arc.second) << " [label=\"" << n
        << "\"];\n";
  for (const auto& [a, n] : dfg.ends)
    out << "  " << dot_quote(a) << " -> \"__end__\" [label=\"" << n << "\", style=dashed];\n";
  out << "}\n";
  return out.str();
}

}  // namespace procdrift
