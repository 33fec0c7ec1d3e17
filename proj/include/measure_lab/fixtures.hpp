#pragma once

// Bundled automaton fixtures. Kept byte-identical to fixtures/*.json
// (checked by the test suite).

#include <array>
#include <string_view>

namespace measure_lab::fixtures {

struct Fixture {
  std::string_view file_name;
  std::string_view json;
};

inline constexpr std::string_view kFibonacci = R"json({
  "beta": {"minpoly": [-1, -1, 1]},
  "alphabet": [0, 1],
  "states": ["p", "q"],
  "edges": [
    {"from": "p", "to": "p", "label": 0},
    {"from": "p", "to": "q", "label": 1},
    {"from": "q", "to": "p", "label": 0}
  ],
  "initial": ["p"],
  "terminal": ["p", "q"]
}
)json";

inline constexpr std::string_view kExample1Edge7 = R"json({
  "beta": {"minpoly": [-1, -1, 1]},
  "alphabet": [-1, 0, 1],
  "states": ["(0,0)", "(1,0)", "(-1,1)", "(-1,0)", "(1,-1)"],
  "edges": [
    {"from": "(0,0)", "to": "(0,0)", "label": 0},
    {"from": "(0,0)", "to": "(1,0)", "label": -1},
    {"from": "(0,0)", "to": "(-1,0)", "label": 1},
    {"from": "(1,0)", "to": "(-1,1)", "label": 1},
    {"from": "(-1,1)", "to": "(0,0)", "label": 1},
    {"from": "(-1,0)", "to": "(1,-1)", "label": -1},
    {"from": "(1,-1)", "to": "(0,0)", "label": -1}
  ],
  "initial": ["(0,0)"],
  "terminal": ["(0,0)"]
}
)json";

inline constexpr std::string_view kExample1Edge9 = R"json({
  "beta": {"minpoly": [-1, -1, 1]},
  "alphabet": [-1, 0, 1],
  "states": ["(0,0)", "(1,0)", "(-1,1)", "(-1,0)", "(1,-1)"],
  "edges": [
    {"from": "(0,0)", "to": "(0,0)", "label": 0},
    {"from": "(0,0)", "to": "(1,0)", "label": -1},
    {"from": "(0,0)", "to": "(-1,0)", "label": 1},
    {"from": "(1,0)", "to": "(-1,1)", "label": 1},
    {"from": "(-1,1)", "to": "(1,0)", "label": 0},
    {"from": "(-1,1)", "to": "(0,0)", "label": 1},
    {"from": "(-1,0)", "to": "(1,-1)", "label": -1},
    {"from": "(1,-1)", "to": "(-1,0)", "label": 0},
    {"from": "(1,-1)", "to": "(0,0)", "label": -1}
  ],
  "initial": ["(0,0)"],
  "terminal": ["(0,0)"]
}
)json";

inline constexpr std::string_view kFullShift4 = R"json({
  "beta": {"minpoly": [-2, 1]},
  "alphabet": [0, 1, 2, 3],
  "states": ["s"],
  "edges": [
    {"from": "s", "to": "s", "label": 0},
    {"from": "s", "to": "s", "label": 1},
    {"from": "s", "to": "s", "label": 2},
    {"from": "s", "to": "s", "label": 3}
  ],
  "initial": ["s"],
  "terminal": ["s"]
}
)json";

inline constexpr std::string_view kFig3 = R"json({
  "beta": {"minpoly": [1, -3, 1]},
  "alphabet": [0, 1, 2],
  "states": ["q0", "q1"],
  "edges": [
    {"from": "q0", "to": "q0", "label": 0},
    {"from": "q0", "to": "q0", "label": 1},
    {"from": "q0", "to": "q1", "label": 2},
    {"from": "q1", "to": "q1", "label": 1},
    {"from": "q1", "to": "q0", "label": 0}
  ],
  "initial": ["q0"],
  "terminal": ["q0", "q1"]
}
)json";

inline constexpr std::array<Fixture, 5> kAll{{
    {"fibonacci.json", kFibonacci},
    {"example1-7edge.json", kExample1Edge7},
    {"example1-9edge.json", kExample1Edge9},
    {"fullshift4.json", kFullShift4},
    {"fig3.json", kFig3},
}};

}  // namespace measure_lab::fixtures
