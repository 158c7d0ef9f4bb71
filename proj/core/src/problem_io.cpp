#include "orex/problem_io.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace orex::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw SchemaError("problem file: " + msg);
}

double number_at(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    fail(std::string("missing numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("entries")) {
    fail(std::string(what) + ": expected {rows, cols, entries}");
  }
  const auto rows = j["rows"].get<Index>();
  const auto cols = j["cols"].get<Index>();
  if (rows < 0 || cols < 0) fail(std::string(what) + ": negative dimensions");
  const auto& entries = j["entries"];
  if (!entries.is_array() ||
      static_cast<Index>(entries.size()) != rows * cols) {
    fail(std::string(what) + ": entries length must equal rows*cols");
  }
  Matrix m(rows, cols);
  Index at = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c, ++at) {
      const auto& e = entries[static_cast<std::size_t>(at)];
      if (!e.is_number()) fail(std::string(what) + ": non-numeric entry");
      m(i, c) = e.get<double>();
    }
  }
  if (!all_finite(m)) fail(std::string(what) + ": non-finite entry");
  return m;
}

json matrix_to_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index c = 0; c < m.cols(); ++c) entries.push_back(m(i, c));
  }
  j["entries"] = entries;
  return j;
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) {
    const auto& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) fail(std::string(what) + ": non-numeric entry");
    v(i) = e.get<double>();
  }
  if (!v.allFinite()) fail(std::string(what) + ": non-finite entry");
  return v;
}

std::vector<double> doubles_from_json(const json& j, const char* what) {
  const Vector v = vector_from_json(j, what);
  return {v.data(), v.data() + v.size()};
}

BasisSpec basis_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) fail("basis: missing type");
  BasisSpec basis;
  const std::string type = j["type"].get<std::string>();
  if (type == "monomial") {
    basis.type = BasisSpec::Type::monomial;
    basis.degree = j.contains("degree") ? j["degree"].get<int>() : 0;
    if (basis.degree < 0) fail("basis: negative degree");
  } else if (type == "piecewise_linear") {
    basis.type = BasisSpec::Type::piecewise_linear;
    if (!j.contains("knots")) fail("basis: piecewise_linear needs knots");
    basis.knots = doubles_from_json(j["knots"], "basis knots");
    if (basis.knots.size() < 2 ||
        !std::is_sorted(basis.knots.begin(), basis.knots.end())) {
      fail("basis: knots must be sorted with at least two entries");
    }
  } else if (type == "matrix") {
    basis.type = BasisSpec::Type::explicit_matrix;
    if (!j.contains("values")) fail("basis: matrix type needs values");
    basis.values = matrix_from_json(j["values"], "basis values");
  } else {
    fail("basis: unknown type '" + type + "'");
  }
  return basis;
}

json basis_to_json(const BasisSpec& basis) {
  json j;
  switch (basis.type) {
    case BasisSpec::Type::monomial:
      j["type"] = "monomial";
      j["degree"] = basis.degree;
      break;
    case BasisSpec::Type::piecewise_linear:
      j["type"] = "piecewise_linear";
      j["knots"] = basis.knots;
      break;
    case BasisSpec::Type::explicit_matrix:
      j["type"] = "matrix";
      j["values"] = matrix_to_json(basis.values);
      break;
  }
  return j;
}

}  // namespace

Matrix matrix_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail("matrix: not valid JSON");
  return matrix_from_json(j, "matrix");
}

ProblemFile parse_problem(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) fail("not valid JSON");
  if (!j.is_object()) fail("top level must be an object");

  ProblemFile file;
  if (j.contains("version")) file.version = j["version"].get<std::string>();
  if (!j.contains("kind") || !j["kind"].is_string()) fail("missing kind");
  const std::string kind = j["kind"].get<std::string>();
  if (!j.contains("payload") || !j["payload"].is_object()) {
    fail("missing payload");
  }
  const json& payload = j["payload"];

  if (kind == "hilbert") {
    file.kind = ProblemFile::Kind::hilbert;
    MultiFidelityProblem p;
    for (const char* key : {"p0", "p1", "lambda0", "lambda1", "q"}) {
      if (!payload.contains(key)) {
        fail(std::string("hilbert payload missing '") + key + "'");
      }
    }
    p.k0.op = matrix_from_json(payload["p0"], "p0");
    p.k1.op = matrix_from_json(payload["p1"], "p1");
    p.k0.radius = number_at(payload, "epsilon0");
    p.k1.radius = number_at(payload, "epsilon1");
    p.lambda0 = matrix_from_json(payload["lambda0"], "lambda0");
    p.lambda1 = matrix_from_json(payload["lambda1"], "lambda1");
    p.q = matrix_from_json(payload["q"], "q");
    if (!(p.k0.radius > 0.0) || !(p.k1.radius > 0.0)) {
      fail("epsilons must be positive");
    }
    const Index n = p.k0.op.cols();
    if (p.k1.op.cols() != n || p.lambda0.cols() != n ||
        p.lambda1.cols() != n || p.q.cols() != n) {
      fail("hilbert payload: operator column counts disagree");
    }
    file.hilbert = std::move(p);

    if (j.contains("data")) {
      const json& data = j["data"];
      Observation obs;
      obs.y0 = data.contains("y0") ? vector_from_json(data["y0"], "y0")
                                   : Vector(0);
      obs.y1 = data.contains("y1") ? vector_from_json(data["y1"], "y1")
                                   : Vector(0);
      if (obs.y0.size() != file.hilbert->lambda0.rows() ||
          obs.y1.size() != file.hilbert->lambda1.rows()) {
        fail("data lengths disagree with the observation maps");
      }
      file.data = std::move(obs);
    }
  } else if (kind == "functional") {
    file.kind = ProblemFile::Kind::functional;
    FunctionalProblem fp;
    if (!payload.contains("levels") || !payload["levels"].is_array() ||
        payload["levels"].empty()) {
      fail("functional payload needs a nonempty levels array");
    }
    for (const json& jl : payload["levels"]) {
      LevelSpec level;
      if (!jl.contains("points")) fail("level: missing points");
      level.points = doubles_from_json(jl["points"], "level points");
      level.epsilon = number_at(jl, "epsilon");
      if (!(level.epsilon > 0.0)) fail("level: epsilon must be positive");
      if (!jl.contains("basis")) fail("level: missing basis");
      level.basis = basis_from_json(jl["basis"]);
      fp.levels.push_back(std::move(level));
    }
    if (!payload.contains("target") || !payload["target"].is_object()) {
      fail("functional payload needs a target");
    }
    const json& jt = payload["target"];
    const std::string ttype =
        jt.contains("type") ? jt["type"].get<std::string>() : "point";
    if (ttype == "point") {
      fp.target.type = TargetSpec::Type::point;
      fp.target.x = number_at(jt, "x");
    } else if (ttype == "average") {
      fp.target.type = TargetSpec::Type::average;
      if (!jt.contains("domain") || !jt["domain"].is_array() ||
          jt["domain"].size() != 2) {
        fail("average target needs domain [lo, hi]");
      }
      fp.target.domain_lo = jt["domain"][0].get<double>();
      fp.target.domain_hi = jt["domain"][1].get<double>();
      if (!(fp.target.domain_hi > fp.target.domain_lo)) {
        fail("average target: empty domain");
      }
    } else if (ttype == "vector") {
      fp.target.type = TargetSpec::Type::vector;
      if (!jt.contains("b")) fail("vector target needs b");
      fp.target.b = vector_from_json(jt["b"], "target b");
    } else {
      fail("unknown target type '" + ttype + "'");
    }
    file.functional = std::move(fp);

    if (j.contains("data")) {
      const json& data = j["data"];
      if (!data.contains("y") || !data["y"].is_array()) {
        fail("functional data needs y as an array of per-level arrays");
      }
      std::vector<Vector> level_data;
      for (const json& arr : data["y"]) {
        level_data.push_back(vector_from_json(arr, "data level"));
      }
      if (level_data.size() != file.functional->levels.size()) {
        fail("data level count disagrees with the levels");
      }
      for (std::size_t t = 0; t < level_data.size(); ++t) {
        if (static_cast<std::size_t>(level_data[t].size()) !=
            file.functional->levels[t].points.size()) {
          fail("data length disagrees with level points");
        }
      }
      file.level_data = std::move(level_data);
    }
  } else {
    fail("unknown kind '" + kind + "'");
  }
  return file;
}

std::string problem_to_json(const ProblemFile& file) {
  json j;
  j["version"] = file.version;
  if (file.kind == ProblemFile::Kind::hilbert) {
    j["kind"] = "hilbert";
    const MultiFidelityProblem& p = *file.hilbert;
    json payload;
    payload["p0"] = matrix_to_json(p.k0.op);
    payload["p1"] = matrix_to_json(p.k1.op);
    payload["epsilon0"] = p.k0.radius;
    payload["epsilon1"] = p.k1.radius;
    payload["lambda0"] = matrix_to_json(p.lambda0);
    payload["lambda1"] = matrix_to_json(p.lambda1);
    payload["q"] = matrix_to_json(p.q);
    j["payload"] = payload;
    if (file.data) {
      json data;
      data["y0"] = std::vector<double>(file.data->y0.data(),
                                       file.data->y0.data() +
                                           file.data->y0.size());
      data["y1"] = std::vector<double>(file.data->y1.data(),
                                       file.data->y1.data() +
                                           file.data->y1.size());
      j["data"] = data;
    }
  } else {
    j["kind"] = "functional";
    const FunctionalProblem& fp = *file.functional;
    json payload;
    payload["levels"] = json::array();
    for (const LevelSpec& level : fp.levels) {
      json jl;
      jl["points"] = level.points;
      jl["epsilon"] = level.epsilon;
      jl["basis"] = basis_to_json(level.basis);
      payload["levels"].push_back(jl);
    }
    json jt;
    switch (fp.target.type) {
      case TargetSpec::Type::point:
        jt["type"] = "point";
        jt["x"] = fp.target.x;
        break;
      case TargetSpec::Type::average:
        jt["type"] = "average";
        jt["domain"] = {fp.target.domain_lo, fp.target.domain_hi};
        break;
      case TargetSpec::Type::vector:
        jt["type"] = "vector";
        jt["b"] = std::vector<double>(fp.target.b.data(),
                                      fp.target.b.data() + fp.target.b.size());
        break;
    }
    payload["target"] = jt;
    j["payload"] = payload;
    if (file.level_data) {
      json data;
      data["y"] = json::array();
      for (const Vector& v : *file.level_data) {
        data["y"].push_back(std::vector<double>(v.data(), v.data() + v.size()));
      }
      j["data"] = data;
    }
  }
  return j.dump(2) + "\n";
}

namespace {

// Hat-function value at x for knot index j.
double hat_value(const std::vector<double>& knots, std::size_t j, double x) {
  const double xj = knots[j];
  if (j > 0) {
    const double left = knots[j - 1];
    if (x >= left && x <= xj) {
      return xj > left ? (x - left) / (xj - left) : 1.0;
    }
  }
  if (j + 1 < knots.size()) {
    const double right = knots[j + 1];
    if (x >= xj && x <= right) {
      return right > xj ? (right - x) / (right - xj) : 1.0;
    }
  }
  return 0.0;
}

Index basis_size(const BasisSpec& basis) {
  switch (basis.type) {
    case BasisSpec::Type::monomial:
      return basis.degree + 1;
    case BasisSpec::Type::piecewise_linear:
      return static_cast<Index>(basis.knots.size());
    case BasisSpec::Type::explicit_matrix:
      return basis.values.rows();
  }
  return 0;
}

double basis_value(const BasisSpec& basis, Index j, double x) {
  switch (basis.type) {
    case BasisSpec::Type::monomial:
      return std::pow(x, static_cast<double>(j));
    case BasisSpec::Type::piecewise_linear:
      return hat_value(basis.knots, static_cast<std::size_t>(j), x);
    case BasisSpec::Type::explicit_matrix:
      throw SchemaError("explicit matrix basis cannot be evaluated at a point");
  }
  return 0.0;
}

// Mean of basis function j over [lo, hi].
double basis_average(const BasisSpec& basis, Index j, double lo, double hi) {
  const double width = hi - lo;
  switch (basis.type) {
    case BasisSpec::Type::monomial: {
      const double p = static_cast<double>(j) + 1.0;
      return (std::pow(hi, p) - std::pow(lo, p)) / (p * width);
    }
    case BasisSpec::Type::piecewise_linear: {
      // Exact integral of the hat supported inside [lo, hi].
      const auto& knots = basis.knots;
      const std::size_t idx = static_cast<std::size_t>(j);
      double integral = 0.0;
      if (idx > 0) integral += 0.5 * (knots[idx] - knots[idx - 1]);
      if (idx + 1 < knots.size()) {
        integral += 0.5 * (knots[idx + 1] - knots[idx]);
      }
      return integral / width;
    }
    case BasisSpec::Type::explicit_matrix:
      throw SchemaError("explicit matrix basis cannot be averaged");
  }
  return 0.0;
}

}  // namespace

BuiltFunctional build_functional(const FunctionalProblem& problem) {
  BuiltFunctional out;
  const std::size_t t_count = problem.levels.size();

  // Points of levels t..T, in level order.
  std::vector<std::vector<double>> tail_points(t_count);
  for (std::size_t t = t_count; t-- > 0;) {
    if (t + 1 < t_count) tail_points[t] = tail_points[t + 1];
    tail_points[t].insert(tail_points[t].begin(),
                          problem.levels[t].points.begin(),
                          problem.levels[t].points.end());
  }

  for (std::size_t t = 0; t < t_count; ++t) {
    const LevelSpec& spec = problem.levels[t];
    functional::ApproximabilityLevel level;
    level.epsilon = spec.epsilon;
    level.m_t = static_cast<Index>(spec.points.size());

    const Index width = static_cast<Index>(tail_points[t].size());
    if (spec.basis.type == BasisSpec::Type::explicit_matrix) {
      if (spec.basis.values.cols() != width) {
        throw SchemaError(
            "explicit basis matrix width disagrees with the points of "
            "levels t..T");
      }
      level.basis_eval = spec.basis.values;
    } else {
      const Index nt = basis_size(spec.basis);
      level.basis_eval = Matrix(nt, width);
      for (Index jb = 0; jb < nt; ++jb) {
        for (Index c = 0; c < width; ++c) {
          level.basis_eval(jb, c) =
              basis_value(spec.basis, jb,
                          tail_points[t][static_cast<std::size_t>(c)]);
        }
      }
    }
    out.levels.push_back(std::move(level));
  }

  const BasisSpec& basis0 = problem.levels.front().basis;
  const Index n0 = out.levels.front().basis_eval.rows();
  switch (problem.target.type) {
    case TargetSpec::Type::point: {
      out.target.b = Vector(n0);
      for (Index jb = 0; jb < n0; ++jb) {
        out.target.b(jb) = basis_value(basis0, jb, problem.target.x);
      }
      break;
    }
    case TargetSpec::Type::average: {
      out.target.b = Vector(n0);
      for (Index jb = 0; jb < n0; ++jb) {
        out.target.b(jb) = basis_average(basis0, jb, problem.target.domain_lo,
                                         problem.target.domain_hi);
      }
      break;
    }
    case TargetSpec::Type::vector: {
      if (problem.target.b.size() != n0) {
        throw SchemaError("target b length disagrees with dim(V0)");
      }
      out.target.b = problem.target.b;
      break;
    }
  }
  return out;
}

Vector stack_level_data(const std::vector<Vector>& level_data) {
  Index total = 0;
  for (const Vector& v : level_data) total += v.size();
  Vector out(total);
  Index at = 0;
  for (const Vector& v : level_data) {
    out.segment(at, v.size()) = v;
    at += v.size();
  }
  return out;
}

}  // namespace orex::io
