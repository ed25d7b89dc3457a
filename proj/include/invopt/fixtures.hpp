#pragma once

// Worked examples embedded as problem documents. The same documents ship as
// fixtures/*.json; a test keeps the two in sync.

#include "invopt/io.hpp"

#include <array>
#include <string>
#include <string_view>

namespace invopt::fixtures {

struct Fixture {
  int id;
  std::string_view file;  // name under fixtures/
  std::string_view title;
  std::string_view text;
};

inline constexpr std::string_view kExample1 = R"({
  "schema_version": "1",
  "model": "nlo-dg",
  "A": [[1, 0], [0, 1], [-2, -1]],
  "b": [-6, -6, -10],
  "x_hat": [-2, 6],
  "omega": {
    "variable_order": ["a[1,1]", "a[1,2]", "a[2,1]", "a[2,2]", "a[3,1]", "a[3,2]"],
    "G": [[-1, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0],
          [0, 0, 0, -1, 0, 0], [0, 0, 0, 1, 0, 0],
          [0, 1, 0, 0, 0, 0], [0, -1, 0, 0, 0, 0],
          [0, 0, 1, 0, 0, 0], [0, 0, -1, 0, 0, 0],
          [0, 0, 0, 0, 1, 0],
          [0, 0, 0, 0, 0, -1], [0, 0, 0, 0, 0, 1],
          [0, 0, 0, 2, 1, 0]],
    "h": [-1, 1.5, -2, 3, 0, 0, 0, 0, -2, 2, -0.5, 2]
  }
}
)";

inline constexpr std::string_view kExample2 = R"({
  "schema_version": "1",
  "model": "nlo-sd",
  "A": [[1, 0], [0, 1], [-2, -1]],
  "b": [-6, -6, -10],
  "x_hat": [-2, 6],
  "prior": {"xi": [1, 1, 1], "norm": "L2"}
}
)";

inline constexpr std::string_view kExample3 = R"({
  "schema_version": "1",
  "model": "rlo-iu-dg",
  "A": [[1, 0], [0, 1], [-2, -1]],
  "b": [-6, -6, -10],
  "x_hat": [-2, 6],
  "uncertain_columns": [[1], [2], [1, 2]],
  "omega": {
    "variable_order": ["alpha[1,1]", "alpha[2,2]", "alpha[3,1]", "alpha[3,2]"],
    "G": [[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1], [1, 1, 1, 1]],
    "h": [-0.5, -0.5, -0.5, -0.5, 2.5]
  }
}
)";

inline constexpr std::string_view kExample4 = R"({
  "schema_version": "1",
  "model": "rlo-iu-sd",
  "A": [[1, 0], [0, 1], [-2, -1]],
  "b": [-6, -6, -10],
  "x_hat": [-2, 6],
  "uncertain_columns": [[1], [2], [1, 2]],
  "alpha": [[0.5], [0.5], [1, 0]],
  "prior": {"xi": [1, 1, 1], "norm": "L1"}
}
)";

inline constexpr std::string_view kExample5 = R"({
  "schema_version": "1",
  "model": "rlo-ccu-dg",
  "A": [[1, 0], [0, 1], [-2, -1]],
  "b": [-6, -6, -10],
  "x_hat": [-2, 6],
  "uncertain_columns": [[1], [2], [1, 2]],
  "alpha": [[2.5], [0.5], [2, 1]],
  "omega": {
    "variable_order": ["gamma[1]", "gamma[2]", "gamma[3]"],
    "G": [[-1, 0, 0], [0, -1, 0], [0, 0, -1], [1, 1, 1]],
    "h": [-0.2, -0.2, -0.2, 1]
  }
}
)";

inline constexpr std::string_view kExample6 = R"({
  "schema_version": "1",
  "model": "rlo-ccu-sd",
  "A": [[1, 0], [0, 1], [-2, -1]],
  "b": [-6, -6, -10],
  "x_hat": [-2, 6],
  "uncertain_columns": [[1], [2], [1, 2]],
  "alpha": [[2.5], [0.5], [2, 1]],
  "prior": {"estimates": [0.2, 1, 1], "norm": "L1"}
}
)";

inline constexpr std::string_view kExample7 = R"({
  "schema_version": "1",
  "model": "nlo-sd",
  "A": [[1, 0], [0, 1], [1, 1], [-1, -1]],
  "b": [-3, -3, 0, -10],
  "x_hat": [2, 2],
  "prior": {"xi": [1, 1, 1, 1], "norm": "L2"}
}
)";

inline constexpr std::string_view kExample8 = R"({
  "schema_version": "1",
  "model": "nlo-sd",
  "A": [[1, 0], [0, 1], [-1, -1]],
  "b": [2, -4, 0],
  "x_hat": [2, 2],
  "prior": {"xi": [1, 1, 1], "norm": "L2"}
}
)";

inline constexpr std::string_view kIuSdNominalInfeasible = R"({
  "schema_version": "1",
  "model": "rlo-iu-sd",
  "A": [[1, 0], [0, 1], [-2, -1]],
  "b": [-6, -6, -10],
  "x_hat": [-2, 16],
  "uncertain_columns": [[1], [2], [1, 2]],
  "alpha": [[0.5], [0.5], [1, 0]],
  "prior": {"norm": "L1"}
}
)";

inline constexpr std::array<Fixture, 9> kAll = {{
    {1, "example1.json", "nominal, duality gap", kExample1},
    {2, "example2.json", "nominal, strong duality (L2)", kExample2},
    {3, "example3.json", "interval uncertainty, duality gap", kExample3},
    {4, "example4.json", "interval uncertainty, strong duality (L1)", kExample4},
    {5, "example5.json", "cardinality-constrained uncertainty, duality gap", kExample5},
    {6, "example6.json", "cardinality-constrained uncertainty, strong duality (L1)", kExample6},
    {7, "appendixB-ex7.json", "trivial cost vector and constraint", kExample7},
    {8, "appendixB-ex8.json", "trivial constraint, nontrivial cost vector", kExample8},
    {9, "iu-sd-nominal-infeasible.json", "observation violates a nominal row", kIuSdNominalInfeasible},
}};

inline const Fixture& get(int id) {
  for (const auto& f : kAll)
    if (f.id == id) return f;
  throw Error(ErrorCode::InvalidArgument, "no embedded example " + std::to_string(id));
}

inline io::ProblemFile load(int id) { return io::parse_problem(std::string(get(id).text)); }

}  // namespace invopt::fixtures
