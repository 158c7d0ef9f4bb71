#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orex/functional.hpp"
#include "orex/model.hpp"

namespace orex::io {

/// Basis description for functional problems. Generated bases (monomial,
/// piecewise-linear hats) can be evaluated anywhere; an explicit matrix
/// basis must ship its own target values.
struct BasisSpec {
  enum class Type { monomial, piecewise_linear, explicit_matrix };
  Type type = Type::monomial;
  int degree = 0;                  // monomial
  std::vector<double> knots;       // piecewise_linear
  Matrix values;                   // explicit_matrix
};

struct LevelSpec {
  std::vector<double> points;
  double epsilon = 0.0;
  BasisSpec basis;
};

struct TargetSpec {
  enum class Type { point, average, vector };
  Type type = Type::point;
  double x = 0.0;                  // point
  double domain_lo = 0.0;          // average
  double domain_hi = 1.0;
  Vector b;                        // vector
};

struct FunctionalProblem {
  std::vector<LevelSpec> levels;
  TargetSpec target;
};

struct ProblemFile {
  enum class Kind { functional, hilbert };
  std::string version = "1";
  Kind kind = Kind::hilbert;
  std::optional<FunctionalProblem> functional;
  std::optional<MultiFidelityProblem> hilbert;
  std::optional<Observation> data;                  // hilbert data
  std::optional<std::vector<Vector>> level_data;    // functional data
};

/// Parses and schema-validates a problem file. Throws SchemaError on any
/// malformed input.
ProblemFile parse_problem(const std::string& json_text);

std::string problem_to_json(const ProblemFile& file);

/// Materializes the level matrices (basis values at all points of levels
/// t..T) and the target vector from a functional problem description.
struct BuiltFunctional {
  std::vector<functional::ApproximabilityLevel> levels;
  functional::FunctionalTarget target;
};
BuiltFunctional build_functional(const FunctionalProblem& problem);

/// Stacked data vector for a functional problem (levels concatenated).
Vector stack_level_data(const std::vector<Vector>& level_data);

// JSON helpers shared with report emission.
Matrix matrix_from_json_text(const std::string& text);

}  // namespace orex::io
