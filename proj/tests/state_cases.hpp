#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prefsel/alecto.hpp"

namespace prefsel::testing {

// Hand-derived transition table for the allocation state machine. Accuracy -1
// means "not enough issued to judge".
struct StateCase {
  const char* label;
  std::vector<PrefState> before;
  std::vector<double> accuracy;
  std::vector<PrefState> after;
  std::optional<std::size_t> temporal;
  unsigned max_aggressive = 5;
  unsigned block_epochs = 8;
};

inline std::vector<std::optional<double>> judged(const std::vector<double>& acc) {
  std::vector<std::optional<double>> out;
  for (double a : acc) out.push_back(a < 0 ? std::nullopt : std::optional<double>(a));
  return out;
}

inline std::string render(const std::vector<PrefState>& states) {
  std::string s = "[";
  for (std::size_t i = 0; i < states.size(); ++i) s += (i ? "," : "") + states[i].str();
  return s + "]";
}

inline const std::vector<StateCase>& state_cases() {
  constexpr PrefState U = PrefState::ui();
  const auto A = [](int m) { return PrefState::ia(m); };
  const auto B = [](int n) { return PrefState::ib(n); };
  constexpr double X = -1;
  static const std::vector<StateCase> cases{
      // Promotion out of UI.
      {"promote one, park the rest", {U, U, U}, {.8, .3, .1}, {A(0), B(0), B(0)}, {}},
      {"promote all above PB", {U, U, U}, {.8, .9, .76}, {A(0), A(0), A(0)}, {}},
      {"unjudged UI parked on promotion", {U, U, U}, {.8, X, X}, {A(0), B(0), B(0)}, {}},
      {"promotion keeps a DB demotion", {U, U, U}, {.8, .3, .04}, {A(0), B(0), B(-8)}, {}},
      {"PB itself does not promote", {U, U, U}, {.75, .75, .75}, {U, U, U}, {}},
      {"DB itself does not block", {U, U, U}, {.05, .05, .05}, {U, U, U}, {}},
      {"all unjudged stays UI", {U, U, U}, {X, X, X}, {U, U, U}, {}},
      {"just above PB promotes", {U, U, U}, {.76, .5, .5}, {A(0), B(0), B(0)}, {}},
      // Temporal exception.
      {"temporal loses a tie of two", {U, U}, {.9, .85}, {A(0), B(0)}, 1},
      {"temporal parked with stride promoted", {U, U, U}, {.9, .2, .95}, {A(0), B(0), B(0)}, 2},
      {"lone temporal candidate promoted", {U, U, U}, {.3, .2, .95}, {B(0), B(0), A(0)}, 2},
      {"temporal parked among three", {U, U, U, U}, {.9, .8, .1, .99}, {A(0), A(0), B(0), B(0)}, 3},
      {"temporal at index 0", {U, U, U}, {.9, .9, .9}, {B(0), A(0), A(0)}, 0},
      {"IA does not count as a candidate", {A(1), U, U}, {.9, .3, .95}, {A(2), B(0), A(0)}, 2},
      {"lone temporal with another IA", {A(2), U}, {.9, .9}, {A(3), A(0)}, 1},
      {"temporal as sole candidate at 0", {U, U}, {.9, .1}, {A(0), B(0)}, 0},
      // IA climbs and falls.
      {"IA climbs above PB", {A(2), B(0), B(0)}, {.9, X, X}, {A(3), B(0), B(0)}, {}},
      {"IA falls below DB", {A(2), B(0), B(0)}, {.03, X, X}, {A(1), B(0), B(0)}, {}},
      {"IA holds between DB and PB", {A(2), B(0), B(0)}, {.5, X, X}, {A(2), B(0), B(0)}, {}},
      {"IA saturates at M", {A(5), B(0), B(0)}, {.99, X, X}, {A(5), B(0), B(0)}, {}},
      {"IA reaches M", {A(4), B(0), B(0)}, {.9, X, X}, {A(5), B(0), B(0)}, {}},
      {"IA_1 falls to IA_0", {A(1), B(0), B(0)}, {.04, X, X}, {A(0), B(0), B(0)}, {}},
      {"unjudged IA holds", {A(3), B(0), B(0)}, {X, X, X}, {A(3), B(0), B(0)}, {}},
      {"IA at PB holds", {A(2), B(0), B(0)}, {.75, X, X}, {A(2), B(0), B(0)}, {}},
      {"IA at DB holds", {A(2), B(0), B(0)}, {.05, X, X}, {A(2), B(0), B(0)}, {}},
      {"IA_M falls one level", {A(5), U, U}, {.04, .9, .9}, {A(4), A(0), A(0)}, {}},
      // IA_0 exit and release.
      {"IA_0 exit releases IB_0", {A(0), B(0), B(0)}, {.5, X, X}, {U, U, U}, {}},
      {"IA_0 at PB exits", {A(0), B(0), B(0)}, {.75, X, X}, {U, U, U}, {}},
      {"IA_0 below DB exits", {A(0), B(0), B(0)}, {.03, X, X}, {U, U, U}, {}},
      {"no release while an IA remains", {A(0), A(0), B(0)}, {.5, .9, X}, {U, A(1), B(0)}, {}},
      {"release spares cooling IB", {A(0), B(-3), B(0)}, {.5, X, X}, {U, B(-2), U}, {}},
      {"IA_0 climbs", {A(0), B(0), B(0)}, {.76, X, X}, {A(1), B(0), B(0)}, {}},
      {"exited IA_0 parked by a promotion", {A(0), U, B(0)}, {.3, .9, X}, {B(0), A(0), B(0)}, {}},
      {"exited IA_0 and idle UI parked", {U, A(0), U}, {.9, .03, .2}, {A(0), B(0), B(0)}, {}},
      {"all IA_0 exit together", {A(0), A(0), A(0), A(0)}, {.3, .3, .3, .3}, {U, U, U, U}, {}},
      // Blocking from UI.
      {"UI below DB blocks", {U, U, U}, {.04, .5, .5}, {B(-8), U, U}, {}},
      {"all blocked", {U, U, U}, {0, 0, 0}, {B(-8), B(-8), B(-8)}, {}},
      {"single prefetcher blocked", {U}, {.04}, {B(-8)}, {}},
      {"block beside a steady IA", {A(3), U, B(-2)}, {.5, .04, X}, {A(3), B(-8), B(-1)}, {}},
      {"block beside a promotion", {A(1), U, U}, {.6, .04, .9}, {A(1), B(-8), A(0)}, {}},
      // Cool-down.
      {"cool-down beside an IA", {A(1), B(-8), B(-1)}, {X, X, X}, {A(1), B(-7), B(0)}, {}},
      {"cool-down to IB_0 then release", {U, B(-1), B(-5)}, {X, X, X}, {U, U, B(-4)}, {}},
      {"IB ignores its accuracy", {A(2), B(-8), B(0)}, {.9, .9, .9}, {A(3), B(-7), B(0)}, {}},
      {"all cooling", {B(-8), B(-8), B(-8)}, {X, X, X}, {B(-7), B(-7), B(-7)}, {}},
      {"all IB_0 released", {B(0), B(0), B(0)}, {X, X, X}, {U, U, U}, {}},
      {"IB_0 held by a fresh IA", {B(0), B(0), U}, {X, X, .9}, {B(0), B(0), A(0)}, {}},
      // Non-default bounds.
      {"M=0 saturates at IA_0", {A(0), B(0)}, {.9, X}, {A(0), B(0)}, {}, 0, 8},
      {"N=1 blocks for one epoch", {U, U}, {.01, .9}, {B(-1), A(0)}, {}, 5, 1},
  };
  return cases;
}

}  // namespace prefsel::testing
