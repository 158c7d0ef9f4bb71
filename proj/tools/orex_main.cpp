// orex: worst-case-optimal recovery from two-fidelity observations with
// deterministic error certificates.
//
// Subcommands:
//   estimate  - linear-functional estimation over approximability sets
//   recover   - global / local / consistent recovery in Hilbert spaces
//   validate  - run the certificate checks on a problem file
//   generate  - fabricate stylized problem instances

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orex/chebyshev.hpp"
#include "orex/functional.hpp"
#include "orex/generators.hpp"
#include "orex/global.hpp"
#include "orex/local.hpp"
#include "orex/oracle.hpp"
#include "orex/problem_io.hpp"

namespace {

using nlohmann::json;
using namespace orex;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitSchema = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitInconsistent = 4;

struct CommonFlags {
  std::string output;
  double tol_rank = kRankTol;
  double tol_eig = 1e-9;
  double tol_cert = 1e-7;
  std::int64_t budget = 20000;
  std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output);
    if (!out) throw Error("cannot write file: " + output);
    out << text;
  }
}

std::vector<double> to_std(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

json report_skeleton(const io::ProblemFile& file) {
  json rep;
  rep["version"] = file.version;
  rep["kind"] = file.kind == io::ProblemFile::Kind::hilbert ? "hilbert"
                                                            : "functional";
  return rep;
}

const char* kernel_case_name(KernelCase c) {
  switch (c) {
    case KernelCase::none: return "none";
    case KernelCase::ker_in_p1: return "ker_in_p1";
    case KernelCase::ker_in_lambda1: return "ker_in_lambda1";
  }
  return "none";
}

// ---------------------------------------------------------------------------
// estimate

int cmd_estimate(const std::string& path, const CommonFlags& flags) {
  const io::ProblemFile file = io::parse_problem(read_file(path));
  if (file.kind != io::ProblemFile::Kind::functional) {
    throw SchemaError("estimate expects a functional problem file");
  }
  const io::BuiltFunctional built = io::build_functional(*file.functional);
  const functional::EstimatorWeights weights =
      functional::estimate_weights(built.levels, built.target);
  const functional::EstimatorWeights sparse =
      functional::sparsify_level0(weights, built.levels, built.target);

  json rep = report_skeleton(file);
  rep["gwce"] = weights.gwce;
  rep["objective"] = weights.objective;
  rep["weights"] = json::array();
  for (const Vector& block : weights.a) rep["weights"].push_back(to_std(block));
  rep["sparsified_weights"] = json::array();
  for (const Vector& block : sparse.a) {
    rep["sparsified_weights"].push_back(to_std(block));
  }
  Index nnz = 0;
  for (Index i = 0; i < sparse.a.front().size(); ++i) {
    if (sparse.a.front()(i) != 0.0) ++nnz;
  }
  rep["level0_nnz"] = nnz;
  if (file.level_data) {
    const Vector y = io::stack_level_data(*file.level_data);
    rep["estimate"] = functional::apply(weights, y);
  }
  emit(rep.dump(2) + "\n", flags.output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// recover

json chebyshev_to_json(const ChebyshevReport& cheb) {
  json j;
  j["tau_star"] = cheb.tau_star;
  j["radius_sq_upper"] = cheb.radius_sq_upper;
  j["ortho_residual_r"] = cheb.ortho_residual_r;
  j["ortho_residual_s"] = cheb.ortho_residual_s;
  j["exact"] = cheb.exact;
  j["newton_converged"] = cheb.newton_converged;
  j["boundary_minimizer"] = cheb.boundary_minimizer;
  j["one_ellipsoid"] = cheb.one_ellipsoid;
  j["candidate_minima"] = cheb.candidate_minima;
  return j;
}

int cmd_recover(const std::string& path, const std::string& mode,
                bool emit_map, const CommonFlags& flags) {
  const io::ProblemFile file = io::parse_problem(read_file(path));
  if (file.kind != io::ProblemFile::Kind::hilbert) {
    throw SchemaError("recover expects a hilbert problem file");
  }
  const MultiFidelityProblem& p = *file.hilbert;
  json rep = report_skeleton(file);
  rep["mode"] = mode;

  if (mode == "global") {
    const GlobalSolution sol = solve_global(p);
    rep["gwce"] = std::sqrt(sol.gwce_sq);
    rep["gwce_sq"] = sol.gwce_sq;
    rep["tau_sharp"] = sol.tau_sharp;
    rep["c0"] = sol.c0;
    rep["c1"] = sol.c1;
    if (file.data) {
      const CompoundOperators ops = lift(p, flags.tol_rank);
      const Vector y = ops.data_dim() == p.lambda0.rows()
                           ? file.data->y0
                           : stack_observation(*file.data);
      const GlobalEstimate est = global_recover(sol, ops, y);
      rep["estimate"] = to_std(est.estimate);
      rep["bound"] = est.bound;
    }
    if (emit_map) {
      json m;
      m["rows"] = sol.map_matrix.rows();
      m["cols"] = sol.map_matrix.cols();
      std::vector<double> entries;
      for (Index i = 0; i < sol.map_matrix.rows(); ++i) {
        for (Index c = 0; c < sol.map_matrix.cols(); ++c) {
          entries.push_back(sol.map_matrix(i, c));
        }
      }
      m["entries"] = entries;
      rep["map"] = m;
    }
  } else if (mode == "local") {
    if (!file.data) throw SchemaError("local recovery needs data");
    const LocalReport local = local_recover(p, *file.data, flags.tol_cert);
    rep["estimate"] = to_std(local.estimate);
    rep["radius"] = local.radius;
    rep["tau_y"] = local.tau_y;
    rep["c0"] = local.c0;
    rep["c1"] = local.c1;
    rep["certified"] = local.certified;
    rep["kernel_case"] = kernel_case_name(local.kernel_case);
    rep["certificate"] = chebyshev_to_json(local.cheb);
  } else if (mode == "consistent") {
    if (!file.data) throw SchemaError("consistent recovery needs data");
    const CompoundOperators ops = lift(p, flags.tol_rank);
    const Vector y = ops.data_dim() == p.lambda0.rows()
                         ? file.data->y0
                         : stack_observation(*file.data);
    const ConsistentEstimate est = consistent_estimate(ops, y);
    rep["estimate"] = to_std(ops.q_tilde() * est.f);
    rep["f"] = to_std(est.f);
    rep["tau_bar"] = est.tau_bar;
    rep["lwce_factor2_bound"] = est.lwce_factor2_bound;
  } else {
    throw SchemaError("unknown mode '" + mode + "'");
  }
  emit(rep.dump(2) + "\n", flags.output);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate

struct CheckList {
  json checks = json::array();
  bool all_pass = true;

  void add(const std::string& name, bool pass, double measured,
           double threshold) {
    json c;
    c["name"] = name;
    c["pass"] = pass;
    c["measured"] = measured;
    c["threshold"] = threshold;
    checks.push_back(c);
    all_pass = all_pass && pass;
  }
  void add_le(const std::string& name, double measured, double threshold) {
    add(name, measured <= threshold, measured, threshold);
  }
};

int cmd_validate_hilbert(const io::ProblemFile& file, json& rep,
                         const CommonFlags& flags) {
  const MultiFidelityProblem& p = *file.hilbert;
  CheckList checks;

  const ValidationReport val = validate(p, flags.tol_eig);
  checks.add("model-nondegenerate", val.ok, val.ok ? 1.0 : 0.0, 1.0);
  rep["kernel_case"] = kernel_case_name(val.kernel_case);
  if (!val.ok) {
    rep["checks"] = checks.checks;
    rep["all_pass"] = false;
    return kExitCheckFailure;
  }

  const CompoundOperators ops = lift(p, flags.tol_rank);
  checks.add_le("lift-kernel-residual",
                (ops.lambda() * ops.kernel_basis()).norm(), 1e-9);

  Vector y;
  if (file.data) {
    y = ops.data_dim() == p.lambda0.rows() ? file.data->y0
                                           : stack_observation(*file.data);
  } else {
    y = Vector::Zero(ops.data_dim());
  }

  const ChebyshevReport cheb = chebyshev_center(ops, y, flags.tol_cert);
  const double radius = std::sqrt(std::max(0.0, cheb.radius_sq_upper));
  rep["radius"] = radius;
  rep["exact"] = cheb.exact;

  if (!cheb.one_ellipsoid && !cheb.boundary_minimizer) {
    const RegPoint pt = eig_point(ops, y, cheb.tau_star);
    const double kr = (ops.r() * pt.f_tau).squaredNorm() +
                      (ops.r() * pt.h_tau).squaredNorm();
    const double ks = (ops.s() * pt.f_tau).squaredNorm() +
                      (ops.s() * pt.h_tau).squaredNorm();
    checks.add_le("kappa-identity-r", std::abs(kr - 1.0), 1e-6);
    checks.add_le("kappa-identity-s", std::abs(ks - 1.0), 1e-6);
  }
  if (cheb.exact) {
    // Witnesses must be feasible; the constraint active at tau* is tight.
    double excess = 0.0;
    for (const Vector* w : {&cheb.witness_plus, &cheb.witness_minus}) {
      excess = std::max({excess, (ops.r() * *w).norm() - 1.0,
                         (ops.s() * *w).norm() - 1.0});
    }
    checks.add_le("witness-feasible", excess, 1e-6);
    double tight = 0.0;
    for (const Vector* w : {&cheb.witness_plus, &cheb.witness_minus}) {
      if (cheb.tau_star < 1.0) {
        tight = std::max(tight, std::abs((ops.r() * *w).norm() - 1.0));
      }
      if (cheb.tau_star > 0.0 && ops.s().rows() > 0) {
        tight = std::max(tight, std::abs((ops.s() * *w).norm() - 1.0));
      }
    }
    checks.add_le("witness-active-tight", tight, 1e-6);
  }

  const oracle::SampleBudget budget{flags.budget, flags.seed};
  const double half_diam = oracle::sampled_half_diameter(ops, y, budget);
  checks.add_le("sandwich-lower-le-radius", half_diam, radius + 1e-7);

  const double sdp = sdp_value(ops, y);
  const double sdp_err = std::abs(sdp - cheb.radius_sq_upper) /
                         std::max(1e-12, cheb.radius_sq_upper);
  checks.add_le("sdp-agreement-rel", sdp_err, 0.01);

  const GlobalSolution global = solve_global(p);
  const double sampled =
      oracle::sampled_gwce(global.map_matrix, ops, budget);
  checks.add_le("global-validity", sampled,
                std::sqrt(global.gwce_sq) + 1e-7);
  checks.add_le("local-le-global", radius, std::sqrt(global.gwce_sq) + 1e-7);

  const ConsistentEstimate cons = consistent_estimate(ops, y);
  const double cons_lwce =
      oracle::sampled_lwce(ops, y, ops.q_tilde() * cons.f, budget);
  checks.add_le("consistent-factor2", cons_lwce,
                cons.lwce_factor2_bound + 1e-6);

  rep["checks"] = checks.checks;
  rep["all_pass"] = checks.all_pass;
  return checks.all_pass ? kExitOk : kExitCheckFailure;
}

int cmd_validate_functional(const io::ProblemFile& file, json& rep,
                            const CommonFlags& flags) {
  const io::BuiltFunctional built = io::build_functional(*file.functional);
  CheckList checks;

  const functional::EstimatorWeights weights =
      functional::estimate_weights(built.levels, built.target);
  const functional::EstimatorWeights sparse =
      functional::sparsify_level0(weights, built.levels, built.target);
  rep["gwce"] = weights.gwce;

  // Constraint residual of the level-0 interpolation block.
  const functional::AssembledSystem sys =
      functional::assemble(built.levels, built.target);
  Vector stacked(sys.total_m);
  Index at = 0;
  for (const Vector& block : weights.a) {
    stacked.segment(at, block.size()) = block;
    at += block.size();
  }
  checks.add_le("constraint-residual",
                (sys.m.front() * stacked - sys.b).norm(), 1e-9);

  Index nnz = 0;
  for (Index i = 0; i < sparse.a.front().size(); ++i) {
    if (sparse.a.front()(i) != 0.0) ++nnz;
  }
  checks.add_le("level0-sparsity", static_cast<double>(nnz),
                static_cast<double>(sys.m.front().rows()));
  checks.add_le("sparsify-objective-drift",
                std::abs(sparse.objective - weights.objective),
                1e-9 * (1.0 + weights.objective));

  // V0-exactness and sampled worst case over model-consistent tuples.
  std::mt19937_64 rng(flags.seed ^ 0xFEEDFACEULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Index n0 = sys.m.front().rows();
  double exact_err = 0.0;
  for (int rep_i = 0; rep_i < 16; ++rep_i) {
    Vector coeff(n0);
    for (Index i = 0; i < n0; ++i) coeff(i) = gauss(rng);
    const Vector y = sys.m.front().transpose() * coeff;
    const double truth = built.target.b.dot(coeff);
    exact_err = std::max(exact_err,
                         std::abs(functional::apply(weights, y) - truth));
  }
  checks.add_le("v0-exactness", exact_err, 1e-9);

  // Sampled worst case over model-consistent tuples: f0 is a V0 element
  // plus a perturbation bounded by epsilon_0 at the sampled sites (target
  // included), each bias f_{t-1} - f_t a V_t element plus its own bounded
  // perturbation. The sup-norm constraint is enforced on these sites only.
  double worst = 0.0;
  const std::size_t t_count = built.levels.size();
  const std::int64_t draws = std::max<std::int64_t>(1, flags.budget / 10);
  for (std::int64_t d = 0; d < draws; ++d) {
    Vector coeff0(sys.m.front().rows());
    for (Index i = 0; i < coeff0.size(); ++i) coeff0(i) = gauss(rng);
    Vector vals = sys.m.front().transpose() * coeff0;  // f0 at all points
    for (Index i = 0; i < vals.size(); ++i) {
      vals(i) += built.levels.front().epsilon * unif(rng);
    }
    const double truth =
        built.target.b.dot(coeff0) + built.levels.front().epsilon * unif(rng);

    Vector y(sys.total_m);
    y.head(sys.m_counts.front()) = vals.head(sys.m_counts.front());
    Vector tail = vals.tail(vals.size() - sys.m_counts.front());
    Index at_level = sys.m_counts.front();
    for (std::size_t t = 1; t < t_count; ++t) {
      const Matrix& basis = sys.m[t];
      Vector coeff(basis.rows());
      for (Index i = 0; i < coeff.size(); ++i) coeff(i) = gauss(rng);
      Vector bias = basis.transpose() * coeff;  // points of levels t..T
      for (Index i = 0; i < bias.size(); ++i) {
        bias(i) += built.levels[t].epsilon * unif(rng);
      }
      tail -= bias;  // now f_t at the points of levels t..T
      y.segment(at_level, sys.m_counts[t]) = tail.head(sys.m_counts[t]);
      at_level += sys.m_counts[t];
      tail = tail.tail(tail.size() - sys.m_counts[t]).eval();
    }
    worst = std::max(worst,
                     std::abs(functional::apply(weights, y) - truth));
  }
  checks.add_le("empirical-worst-case", worst, weights.gwce + 1e-8);

  rep["checks"] = checks.checks;
  rep["all_pass"] = checks.all_pass;
  return checks.all_pass ? kExitOk : kExitCheckFailure;
}

int cmd_validate(const std::string& path, const CommonFlags& flags) {
  const io::ProblemFile file = io::parse_problem(read_file(path));
  json rep = report_skeleton(file);
  rep["seed"] = flags.seed;
  rep["budget"] = flags.budget;
  const int code = file.kind == io::ProblemFile::Kind::hilbert
                       ? cmd_validate_hilbert(file, rep, flags)
                       : cmd_validate_functional(file, rep, flags);
  emit(rep.dump(2) + "\n", flags.output);
  return code;
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const std::string& type, Index n, Index m0, Index m1, Index z,
                 double eps0, double eps1, const std::string& laplacian_file,
                 const CommonFlags& flags) {
  io::ProblemFile file;
  file.kind = io::ProblemFile::Kind::hilbert;
  if (type == "digital-twin") {
    gen::TwinConfig cfg;
    cfg.n = n;
    cfg.m0 = m0;
    cfg.m1 = m1;
    cfg.z = z;
    cfg.eps0 = eps0;
    cfg.eps1 = eps1;
    cfg.seed = flags.seed;
    file.hilbert = gen::digital_twin(cfg);
  } else if (type == "graph-signal") {
    gen::GraphConfig cfg;
    cfg.n = n;
    cfg.m0 = m0;
    cfg.m1 = m1;
    cfg.eps0 = eps0;
    cfg.eps1 = eps1;
    cfg.seed = flags.seed;
    if (laplacian_file.empty()) {
      file.hilbert = gen::graph_signal(cfg);
    } else {
      const Matrix lap =
          io::matrix_from_json_text(read_file(laplacian_file));
      file.hilbert = gen::graph_signal_from(lap, cfg);
    }
  } else if (type == "disk-slice") {
    // Single hyperellipsoid |f| <= 1 sliced by one observation.
    MultiFidelityProblem p;
    p.k0.op = Matrix::Identity(2, 2);
    p.k0.radius = 1.0;
    p.k1.op = Matrix(0, 2);
    p.k1.radius = 1.0;
    p.lambda0 = Matrix(1, 2);
    p.lambda0 << 1.0, 0.0;
    p.lambda1 = Matrix(0, 2);
    p.q = Matrix::Identity(2, 2);
    file.hilbert = p;
    Observation obs;
    obs.y0 = Vector::Constant(1, 0.5);
    obs.y1 = Vector(0);
    file.data = obs;
  } else {
    throw SchemaError("unknown generator type '" + type + "'");
  }
  if (type != "disk-slice") {
    file.data = gen::consistent_data(*file.hilbert, flags.seed + 1);
  }
  emit(io::problem_to_json(file), flags.output);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"worst-case-optimal recovery with deterministic certificates"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string path;
  std::string mode = "global";
  bool emit_map = false;
  std::string gen_type = "digital-twin";
  Index gen_n = 6, gen_m0 = 4, gen_m1 = 2, gen_z = 2;
  double gen_eps0 = 1.0, gen_eps1 = 0.5;
  std::string gen_laplacian;

  const auto add_common = [&](CLI::App* cmd, bool with_file = true) {
    if (with_file) {
      cmd->add_option("file", path, "problem file (JSON)")->required();
    }
    cmd->add_option("-o,--output", flags.output, "write the report here");
    cmd->add_option("--tol-rank", flags.tol_rank,
                    "singular-value threshold for rank decisions");
    cmd->add_option("--tol-eig", flags.tol_eig,
                    "nondegeneracy / definiteness tolerance");
    cmd->add_option("--tol-cert", flags.tol_cert,
                    "orthogonality certificate tolerance");
    cmd->add_option("--budget", flags.budget, "sampling budget");
    cmd->add_option("--seed", flags.seed, "sampling seed");
  };

  CLI::App* estimate = app.add_subcommand(
      "estimate", "optimal linear-functional estimation (functional files)");
  add_common(estimate);

  CLI::App* recover = app.add_subcommand(
      "recover", "optimal recovery in Hilbert spaces (hilbert files)");
  add_common(recover);
  recover->add_option("--mode", mode, "global | local | consistent");
  recover->add_flag("--emit-map", emit_map,
                    "include the materialized linear map (global mode)");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "run the certificate check suite");
  add_common(validate_cmd);

  CLI::App* generate =
      app.add_subcommand("generate", "fabricate stylized instances");
  add_common(generate, false);
  generate->add_option("--type", gen_type,
                       "digital-twin | graph-signal | disk-slice");
  generate->add_option("-n", gen_n, "object dimension");
  generate->add_option("--m0", gen_m0, "high-fidelity observations");
  generate->add_option("--m1", gen_m1, "low-fidelity observations");
  generate->add_option("-z", gen_z, "quantity-of-interest dimension");
  generate->add_option("--eps0", gen_eps0, "radius of K0");
  generate->add_option("--eps1", gen_eps1, "radius of K1");
  generate->add_option("--laplacian", gen_laplacian,
                       "graph Laplacian file for graph-signal instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) return cmd_estimate(path, flags);
    if (recover->parsed()) return cmd_recover(path, mode, emit_map, flags);
    if (validate_cmd->parsed()) return cmd_validate(path, flags);
    if (generate->parsed()) {
      return cmd_generate(gen_type, gen_n, gen_m0, gen_m1, gen_z, gen_eps0,
                          gen_eps1, gen_laplacian, flags);
    }
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const InvalidInputError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const InconsistentDataError& e) {
    std::cerr << "inconsistent data: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const ModelDegeneracyError& e) {
    std::cerr << "model degeneracy: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const InfeasibleModelError& e) {
    std::cerr << "model degeneracy: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const EndpointDegenerateError& e) {
    std::cerr << "model degeneracy: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}
