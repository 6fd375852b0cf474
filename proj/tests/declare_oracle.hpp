#pragma once

#include <string>
#include <utility>

#include "procdrift/declare.hpp"

namespace procdrift::testing {

/// Position-by-position scanner straight from the template definitions.
/// Returns (activations, satisfied).
inline std::pair<int, int> naive_check(TemplateKind kind, int a, int b, const std::vector<ActivityId>& t) {
  const int n = static_cast<int>(t.size());
  auto is = [&](int i, int x) { return static_cast<int>(t[i]) == x; };
  auto later = [&](int i, int x) {
    for (int j = i + 1; j < n; ++j)
      if (is(j, x)) return true;
    return false;
  };
  auto earlier = [&](int i, int x) {
    for (int j = 0; j < i; ++j)
      if (is(j, x)) return true;
    return false;
  };
  int act = 0, sat = 0;
  switch (kind) {
    case TemplateKind::AtMostOne: {
      int count = 0;
      for (int i = 0; i < n; ++i) count += is(i, a);
      act = count;
      sat = count == 1 ? 1 : 0;
      break;
    }
    case TemplateKind::Response:
      for (int i = 0; i < n; ++i)
        if (is(i, a)) act++, sat += later(i, b);
      break;
    case TemplateKind::AlternateResponse:
      for (int i = 0; i < n; ++i) {
        if (!is(i, a)) continue;
        act++;
        for (int j = i + 1; j < n; ++j) {
          if (is(j, b)) {
            bool clean = true;
            for (int k = i + 1; k < j; ++k) clean = clean && !is(k, a);
            if (clean) {
              sat++;
              break;
            }
          }
        }
      }
      break;
    case TemplateKind::ChainResponse:
      for (int i = 0; i < n; ++i)
        if (is(i, a)) act++, sat += (i + 1 < n && is(i + 1, b));
      break;
    case TemplateKind::Precedence:
      for (int i = 0; i < n; ++i)
        if (is(i, b)) act++, sat += earlier(i, a);
      break;
    case TemplateKind::AlternatePrecedence:
      for (int i = 0; i < n; ++i) {
        if (!is(i, b)) continue;
        act++;
        for (int j = i - 1; j >= 0; --j) {
          if (is(j, a)) {
            bool clean = true;
            for (int k = j + 1; k < i; ++k) clean = clean && !is(k, b);
            if (clean) {
              sat++;
              break;
            }
          }
        }
      }
      break;
    case TemplateKind::ChainPrecedence:
      for (int i = 0; i < n; ++i)
        if (is(i, b)) act++, sat += (i > 0 && is(i - 1, a));
      break;
    case TemplateKind::Succession: {
      auto r = naive_check(TemplateKind::Response, a, b, t);
      auto p = naive_check(TemplateKind::Precedence, a, b, t);
      act = r.first + p.first;
      sat = r.second + p.second;
      break;
    }
    case TemplateKind::NotSuccession:
      for (int i = 0; i < n; ++i)
        if (is(i, a)) act++, sat += !later(i, b);
      break;
  }
  return {act, sat};
}

}  // namespace procdrift::testing
