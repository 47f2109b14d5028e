#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bridge_rate/path.hpp"

namespace bridge_rate {

/// A bounded Lipschitz functional on C([0,1]) with declared constants.
struct TestFunctional {
  std::string name;
  double lip_const = 1.0;
  double sup_bound = 1.0;
  std::function<double(const PathSample&)> evaluate;

  double operator()(const PathSample& p) const { return evaluate(p); }
};

inline TestFunctional constant_functional(double c) {
  return {"const", 0.0, std::fabs(c), [c](const PathSample&) { return c; }};
}

/// Fixed battery F1..F5, each with Lipschitz constant and sup bound <= 1.
inline std::vector<TestFunctional> functional_battery() {
  return {
      {"F1", 0.0, 1.0, [](const PathSample&) { return 1.0; }},
      {"F2", 1.0, 1.0, [](const PathSample& p) { return std::min(supnorm(p), 1.0); }},
      {"F3", 1.0, 1.0, [](const PathSample& p) { return std::clamp(p.at(0.5), -1.0, 1.0); }},
      {"F4", 1.0, 1.0, [](const PathSample& p) { return std::min(1.0, integral_abs(p)); }},
      // sin of the half-sum keeps the Lipschitz constant at 1
      {"F5", 1.0, 1.0, [](const PathSample& p) { return std::sin(0.5 * (p.at(0.25) + p.at(0.75))); }},
  };
}

inline const TestFunctional& find_functional(const std::vector<TestFunctional>& battery,
                                             const std::string& name) {
  for (const auto& f : battery) {
    if (f.name == name) return f;
  }
  fail(ErrorCode::InvalidArgument, "unknown functional '" + name + "'");
}

}  // namespace bridge_rate
