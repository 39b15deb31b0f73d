#include "teq/cli.hpp"

#include "teq/error.hpp"
#include "teq/io.hpp"
#include "teq/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

namespace teq::cli {

using Row = nlohmann::ordered_json;

Dims ProblemOptions::dims() const {
  if (dim < 1) throw ConfigError("--dim must be at least 1");
  Dims d(static_cast<std::size_t>(dim), gen.n);
  if (dim > 1 && n2 > 0) d[1] = n2;
  if (dim > 2 && n3 > 0) d[2] = n3;
  for (Index n : d)
    if (n < 1) throw ConfigError("mode sizes must be positive");
  return d;
}

Index default_n_min(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::fractional_gl: return 128;
    case GeneratorKind::random_spd_hss: return 32;
    default: return 64;
  }
}

Problem build_problem(const ProblemOptions& opt, Index n_min) {
  const Dims dims = opt.dims();
  Problem p;
  for (std::size_t t = 0; t < dims.size(); ++t) {
    // Deterministic kinds of equal size share one matrix (and its cached spectra).
    if (opt.gen.kind != GeneratorKind::random_spd_hss && t > 0 && dims[t] == dims[0]) {
      p.coeffs.push_back(p.coeffs.front());
      continue;
    }
    GeneratorSpec spec = opt.gen;
    spec.n = dims[t];
    spec.seed = opt.seed + t;
    p.coeffs.push_back(build_coefficient(spec, n_min));
  }
  if (opt.rhs_path.empty()) {
    p.B = Tensor::random(dims, opt.seed);
  } else {
    p.B = load_tensor(opt.rhs_path);
    if (p.B.dims() != dims) throw DimensionError("right-hand side dims do not match the problem");
  }
  return p;
}

double relative_residual(const std::vector<HMatrix>& coeffs, const Tensor& X, const Tensor& B) {
  std::vector<FiberMap> ops;
  for (const auto& H : coeffs) ops.emplace_back([H](const Matrix& M) { return H.matvec(M); });
  const double nb = B.norm();
  const double r = residual_norm_ops(ops, X, B);
  return nb > 0.0 ? r / nb : r;
}

std::vector<SweepRow> accuracy_sweep(const SweepOptions& opt) {
  if (opt.points < 1 || opt.runs < 1) throw ConfigError("sweep needs at least one point and one run");
  if (!(opt.p_min >= 1.0 && opt.p_max >= opt.p_min)) throw ConfigError("sweep needs 1 <= p_min <= p_max");
  SolverConfig cfg;
  cfg.eps = opt.eps;
  cfg.n_min = opt.n_min;
  cfg.backend = opt.backend;
  cfg.validate();

  const Vector lam = laplace1d_eigenvalues(opt.n);
  const double kappa_d = lam.maxCoeff() / lam.minCoeff();
  const ClusterTree tree = ClusterTree::build(opt.n, opt.n_min);
  std::vector<SweepRow> rows;

  auto measure = [&](const HMatrix& H, const Matrix& C) {
    DncSolver solver(cfg);
    const Tensor B = Tensor::from_matrix(C);
    const Matrix X = solver.solve({H, H}, B).to_matrix();
    const Matrix A = H.dense();
    return (A * X + X * A - C).norm() / C.norm();
  };
  auto finish = [&](SweepRow& r, int depth) {
    const double f = (depth + 1.0) * (depth + 1.0) * opt.eps;
    r.depth = depth;
    r.bound = f * r.kappa;
    r.bound_sqrt = f * std::sqrt(r.kappa);
    rows.push_back(r);
  };

  for (int i = 0; i < opt.points; ++i) {
    const double p =
        opt.points == 1 ? opt.p_min : opt.p_min + (opt.p_max - opt.p_min) * i / (opt.points - 1);
    const double kappa = std::pow(kappa_d, p);
    if (opt.general) {
      for (int r = 0; r < opt.runs; ++r) {
        SweepRow row{"general", i, p, kappa, opt.seed + static_cast<std::uint64_t>(i * opt.runs + r)};
        const RandomSpd R = gen_random_spd_hss(opt.n, p, opt.band, row.seed);
        const HMatrix H = HMatrix::from_dense(R.A, tree, 1e-15);
        row.residual = measure(H, accuracy_rhs(R.Q));
        finish(row, H.depth());
      }
    }
    if (opt.mmatrix) {
      // Deterministic instance: one run per kappa point.
      SweepRow row{"mmatrix", i, p, kappa, 0};
      const double c = shift_for_condition(opt.n, kappa);
      const HMatrix H = HMatrix::from_banded(gen_shifted_laplace(opt.n, c), opt.n_min);
      row.residual = measure(H, accuracy_rhs(laplace1d_eigenvectors(opt.n)));
      finish(row, H.depth());
    }
  }
  return rows;
}

double envelope_slope(const std::vector<SweepRow>& rows, const std::string& kind) {
  std::map<int, std::pair<double, double>> env;  // point -> (kappa, max residual)
  for (const auto& r : rows) {
    if (r.kind != kind) continue;
    auto& e = env[r.point];
    e.first = r.kappa;
    e.second = std::max(e.second, r.residual);
  }
  if (env.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(env.size());
  for (const auto& [pt, e] : env) {
    const double x = std::log(e.first), y = std::log(std::max(e.second, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Common {
  ProblemOptions problem;
  std::string gen = "laplace1d";
  Index n_min = 0;  // 0: per-generator default
  Index n_min_inner = 0;
  double eps = 1e-6;
  std::string backend = "fadi";
  std::string out_path;
  std::string format = "csv";
  bool deterministic = false;
  std::string save_path;
};

void add_output_options(CLI::App& sub, Common& c) {
  sub.add_option("--out", c.out_path, "Write the report to FILE instead of stdout");
  sub.add_option("--format", c.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  sub.add_flag("--deterministic", c.deterministic,
               "Single-threaded run (otherwise TEQ_THREADS caps the worker threads)");
}

void add_problem_options(CLI::App& sub, Common& c) {
  sub.add_option("--dim", c.problem.dim, "Number of modes d")->check(CLI::PositiveNumber);
  sub.add_option("--gen", c.gen,
                 "Coefficient generator: laplace1d, shifted_laplace, fractional_gl, random_spd_hss. "
                 "fractional_gl uses the unscaled symmetrized Grunwald-Letnikov weights "
                 "(no h^-order factor), so its spectrum lies in (0, 2^order] for every n");
  sub.add_option("--n", c.problem.gen.n, "Size of mode 1")->check(CLI::PositiveNumber);
  sub.add_option("--n2", c.problem.n2, "Size of mode 2 (default: n)");
  sub.add_option("--n3", c.problem.n3, "Size of mode 3 (default: n)");
  sub.add_option("--nmin", c.n_min, "Recursion base size (default depends on the generator)");
  sub.add_option("--nmin-inner", c.n_min_inner, "Base size inside nested Kronecker-sum solves");
  sub.add_option("--eps", c.eps, "Relative tolerance of every update equation");
  sub.add_option("--backend", c.backend, "Low-rank solver")->check(CLI::IsMember({"fadi", "adi", "rk", "ek"}));
  sub.add_option("--seed", c.problem.seed, "Seed of random coefficients and right-hand side");
  sub.add_option("--order", c.problem.gen.order, "fractional_gl order in (1, 2)");
  sub.add_option("--power", c.problem.gen.power, "random_spd_hss exponent p >= 1");
  sub.add_option("--band", c.problem.gen.band, "random_spd_hss lower bandwidth of the random factor");
  sub.add_option("--shift", c.problem.gen.shift, "shifted_laplace diagonal shift");
  sub.add_option("--rhs", c.problem.rhs_path, "Right-hand side tensor dump (default: random)");
  add_output_options(sub, c);
}

SolverConfig make_config(Common& c) {
  c.problem.gen.kind = generator_from_string(c.gen);
  SolverConfig cfg;
  cfg.eps = c.eps;
  cfg.n_min = c.n_min > 0 ? c.n_min : default_n_min(c.problem.gen.kind);
  cfg.n_min_inner = c.n_min_inner;
  cfg.backend = backend_from_string(c.backend);
  cfg.parallel = !c.deterministic;
  if (c.deterministic) set_thread_budget(1);
  cfg.validate();
  return cfg;
}

class Report {
 public:
  void add(Row r) { rows_.push_back(std::move(r)); }

  void write(const Common& c, std::ostream& fallback) const {
    std::ofstream file;
    if (!c.out_path.empty()) {
      file.open(c.out_path);
      if (!file) throw std::runtime_error("cannot open " + c.out_path + " for writing");
    }
    std::ostream& os = c.out_path.empty() ? fallback : file;
    if (c.format == "json") {
      os << nlohmann::ordered_json(rows_).dump(2) << '\n';
      return;
    }
    if (rows_.empty()) return;
    bool first = true;
    for (const auto& [key, value] : rows_.front().items()) {
      os << (first ? "" : ",") << key;
      first = false;
    }
    os << '\n';
    for (const auto& r : rows_) {
      first = true;
      for (const auto& [key, value] : r.items()) {
        os << (first ? "" : ",") << (value.is_string() ? value.get<std::string>() : value.dump());
        first = false;
      }
      os << '\n';
    }
  }

 private:
  std::vector<Row> rows_;
};

Row describe(const Common& c, const SolverConfig& cfg, const Dims& dims) {
  Row r;
  r["dim"] = dims.size();
  r["gen"] = c.gen;
  r["n1"] = dims[0];
  r["n2"] = dims.size() > 1 ? dims[1] : 1;
  r["n3"] = dims.size() > 2 ? dims[2] : 1;
  r["nmin"] = cfg.n_min;
  r["eps"] = cfg.eps;
  r["backend"] = to_string(cfg.backend);
  r["threads"] = cfg.parallel ? thread_budget() : 1;
  return r;
}

void add_stats(Row& r, const SolveStats& st) {
  r["time_total"] = st.time_total;
  r["time_dense"] = st.time_dense;
  r["time_lowrank"] = st.time_lowrank;
  r["time_rhs"] = st.time_rhs;
  r["time_spectra"] = st.time_spectra;
  r["max_rank"] = st.max_update_rank();
  r["max_shifts"] = st.max_shifts();
  r["updates"] = st.updates.size();
}

void print_warnings(const SolveStats& st, std::ostream& err) {
  for (const auto& w : st.warnings) err << "warning: " << w << '\n';
}

int cmd_solve(Common& c, double max_residual, std::ostream& out, std::ostream& err) {
  const SolverConfig cfg = make_config(c);
  const Problem p = build_problem(c.problem, cfg.n_min);
  DncSolver solver(cfg);
  const Tensor X = solver.solve(p.coeffs, p.B);
  const SolveStats st = solver.stats();
  print_warnings(st, err);
  Row r = describe(c, cfg, p.B.dims());
  const double res = relative_residual(p.coeffs, X, p.B);
  r["residual"] = res;
  add_stats(r, st);
  if (c.problem.gen.kind == GeneratorKind::fractional_gl) r["scaling"] = "unscaled";
  Report rep;
  rep.add(std::move(r));
  rep.write(c, out);
  if (!c.save_path.empty()) save_tensor(c.save_path, X);
  if (max_residual > 0.0 && !(res <= max_residual)) {
    err << "residual " << res << " exceeds " << max_residual << '\n';
    return kToleranceBreach;
  }
  return kOk;
}

int cmd_validate(Common& c, double tol, std::ostream& out, std::ostream& err) {
  const SolverConfig cfg = make_config(c);
  const Problem p = build_problem(c.problem, cfg.n_min);
  DncSolver solver(cfg);
  const Tensor X = solver.solve(p.coeffs, p.B);
  const SolveStats st = solver.stats();
  print_warnings(st, err);

  std::vector<Matrix> dense;
  double sa = 0.0, sb = 0.0;
  int ell = 0;
  for (const auto& H : p.coeffs) {
    dense.push_back(H.dense());
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(dense.back()).eigenvalues();
    sa += ev.minCoeff();
    sb += ev.maxCoeff();
    ell = std::max(ell, H.depth());
  }
  const double kappa = sb / sa;
  const Tensor ref = lyapnd_diag(dense, p.B);
  const double err_diag = (X - ref).norm() / ref.norm();

  // Brute-force Kronecker-sum solve for tiny problems.
  double err_kron = -1.0;
  if (p.B.size() <= 2048) {
    const Index N = p.B.size();
    Matrix K = Matrix::Zero(N, N);
    for (Index col = 0; col < N; ++col) {
      Tensor e(p.B.dims());
      e.data()[col] = 1.0;
      K.col(col) = kron_sum_apply(dense, e).vec();
    }
    const Vector x = K.llt().solve(p.B.vec());
    err_kron = (X.vec() - x).norm() / x.norm();
  }
  const double res = relative_residual(p.coeffs, X, p.B);
  const double err_tol = tol > 0.0 ? tol : 100.0 * cfg.eps * kappa;
  const double res_tol = (ell + 1.0) * (ell + 1.0) * kappa * cfg.eps;
  const bool pass = err_diag <= err_tol && err_kron <= err_tol && res <= res_tol;

  Row r = describe(c, cfg, p.B.dims());
  r["kappa"] = kappa;
  r["depth"] = ell;
  r["residual"] = res;
  r["residual_bound"] = res_tol;
  r["error_diag"] = err_diag;
  r["error_kron"] = err_kron;
  r["error_tol"] = err_tol;
  add_stats(r, st);
  r["pass"] = pass;
  Report rep;
  rep.add(std::move(r));
  rep.write(c, out);
  if (!pass) {
    err << "validation failed: error " << err_diag << " (tol " << err_tol << "), residual " << res
        << " (bound " << res_tol << ")\n";
    return kToleranceBreach;
  }
  return kOk;
}

int cmd_bench(Common& c, std::vector<Index> sizes, int repeat, bool dense_baseline,
              std::ostream& out, std::ostream& err) {
  const SolverConfig cfg = make_config(c);
  if (sizes.empty()) sizes = {c.problem.gen.n, 2 * c.problem.gen.n, 4 * c.problem.gen.n};
  std::sort(sizes.begin(), sizes.end());
  if (repeat < 1) throw ConfigError("--repeat must be positive");
  Report rep;
  for (Index n : sizes) {
    ProblemOptions po = c.problem;
    po.gen.n = n;
    po.n2 = po.n3 = 0;
    const Problem p = build_problem(po, cfg.n_min);
    Tensor X;
    SolveStats best;
    best.time_total = INFINITY;
    for (int k = 0; k < repeat; ++k) {
      DncSolver solver(cfg);
      X = solver.solve(p.coeffs, p.B);
      const SolveStats st = solver.stats();
      if (st.time_total < best.time_total) best = st;
    }
    print_warnings(best, err);
    Row r = describe(c, cfg, p.B.dims());
    r["n"] = n;
    add_stats(r, best);
    r["residual"] = relative_residual(p.coeffs, X, p.B);
    if (dense_baseline) {
      std::vector<Matrix> dense;
      for (const auto& H : p.coeffs) dense.push_back(H.dense());
      const auto t0 = Clock::now();
      lyapnd_diag(dense, p.B);
      r["time_diag"] = seconds_since(t0);
    }
    rep.add(std::move(r));
  }
  rep.write(c, out);
  return kOk;
}

int cmd_sweep(Common& c, SweepOptions so, const std::string& kind, std::ostream& out,
              std::ostream& err) {
  if (c.deterministic) set_thread_budget(1);
  so.general = kind != "mmatrix";
  so.mmatrix = kind != "general";
  so.backend = backend_from_string(c.backend);
  const auto rows = accuracy_sweep(so);
  Report rep;
  bool pass = true;
  for (const auto& s : rows) {
    const double limit = s.kind == "mmatrix" ? s.bound_sqrt : s.bound;
    pass = pass && s.residual <= limit;
    Row r;
    r["kind"] = s.kind;
    r["point"] = s.point;
    r["power"] = s.power;
    r["kappa"] = s.kappa;
    r["seed"] = s.seed;
    r["residual"] = s.residual;
    r["bound"] = s.bound;
    r["bound_sqrt"] = s.bound_sqrt;
    r["depth"] = s.depth;
    rep.add(std::move(r));
  }
  rep.write(c, out);
  if (so.general) err << "general SPD envelope slope: " << envelope_slope(rows, "general") << '\n';
  if (so.mmatrix) err << "M-matrix envelope slope: " << envelope_slope(rows, "mmatrix") << '\n';
  if (!pass) {
    err << "some residuals exceed their theoretical bound\n";
    return kToleranceBreach;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Divide-and-conquer solver for tensor Sylvester equations with hierarchical coefficients"};
  app.name("teq");
  app.require_subcommand(1);

  Common c;
  double max_residual = 0.0;
  double tol = 0.0;
  std::vector<Index> sizes;
  int repeat = 1;
  bool dense_baseline = false;
  SweepOptions so;
  std::string sweep_kind = "both";

  auto* solve = app.add_subcommand("solve", "Solve one generated problem and report residual and timings");
  add_problem_options(*solve, c);
  solve->add_option("--save", c.save_path, "Write the solution as a tensor dump");
  solve->add_option("--max-residual", max_residual, "Exit with code 2 above this relative residual");

  auto* validate = app.add_subcommand("validate", "Compare against dense diagonalization (and brute force when tiny)");
  add_problem_options(*validate, c);
  validate->add_option("--tol", tol, "Relative error tolerance (default 100 eps kappa)");

  auto* bench = app.add_subcommand("bench", "Time solves over increasing n and emit one row per size");
  add_problem_options(*bench, c);
  bench->add_option("--sizes", sizes, "Sizes to run (default n, 2n, 4n)")->delimiter(',');
  bench->add_option("--repeat", repeat, "Repetitions per size; the fastest is reported");
  bench->add_flag("--dense-baseline", dense_baseline, "Also time the dense diagonalization solver");

  auto* sweep = app.add_subcommand("sweep", "Residual versus condition number on Lyapunov equations");
  sweep->add_option("--n", so.n, "Matrix size")->check(CLI::PositiveNumber);
  sweep->add_option("--nmin", so.n_min, "Recursion base size");
  sweep->add_option("--eps", so.eps, "Relative tolerance of every update equation");
  sweep->add_option("--runs", so.runs, "Random instances per condition number");
  sweep->add_option("--points", so.points, "Number of condition numbers");
  sweep->add_option("--pmin", so.p_min, "Smallest power of the Laplacian spectrum");
  sweep->add_option("--pmax", so.p_max, "Largest power of the Laplacian spectrum");
  sweep->add_option("--band", so.band, "Lower bandwidth of the random orthogonal factor");
  sweep->add_option("--seed", so.seed, "First seed");
  sweep->add_option("--kind", sweep_kind, "Which families to run")
      ->check(CLI::IsMember({"general", "mmatrix", "both"}));
  sweep->add_option("--backend", c.backend, "Low-rank solver")->check(CLI::IsMember({"fadi", "adi", "rk", "ek"}));
  add_output_options(*sweep, c);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }

  try {
    if (*solve) return cmd_solve(c, max_residual, out, err);
    if (*validate) return cmd_validate(c, tol, out, err);
    if (*bench) return cmd_bench(c, sizes, repeat, dense_baseline, out, err);
    if (*sweep) return cmd_sweep(c, so, sweep_kind, out, err);
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const DimensionError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const StructureError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kInvalidConfig;
}

}  // namespace teq::cli
