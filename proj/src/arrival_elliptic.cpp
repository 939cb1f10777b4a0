#include <algorithm>
#include <chrono>
#include <cmath>
#include <array>
#include <limits>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include "lsflab/arrival.hpp"
#include "lsflab/diffops.hpp"

namespace lsflab {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// The 19-point stencil: center, 6 axis neighbors, 12 edge neighbors.
struct Offset {
  int d[3];
};
constexpr Offset kStencil[19] = {
    {{0, 0, 0}},   {{1, 0, 0}},   {{-1, 0, 0}},  {{0, 1, 0}},   {{0, -1, 0}},
    {{0, 0, 1}},   {{0, 0, -1}},  {{1, 1, 0}},   {{1, -1, 0}},  {{-1, 1, 0}},
    {{-1, -1, 0}}, {{1, 0, 1}},   {{1, 0, -1}},  {{-1, 0, 1}},  {{-1, 0, -1}},
    {{0, 1, 1}},   {{0, 1, -1}},  {{0, -1, 1}},  {{0, -1, -1}},
};

// Unknowns are the interior nodes {psi0 < 0}. A stencil neighbor outside the
// interior is replaced, row by row, by the linear extrapolation
// u_i (1 - 1/theta) along the ray i -> neighbor, theta being the zero crossing
// of psi0 on that ray. The boundary value u = 0 is thus imposed sub-grid.
struct Layout {
  std::vector<std::size_t> interior;
  std::vector<long> slot;                // grid index -> unknown or -1
  std::vector<std::size_t> plain_rows;   // rows whose stencil is all interior
  std::vector<std::size_t> cut_rows;     // unknown indices of the other rows
  std::vector<std::array<double, 19>> cut_coef;  // per cut row: 1 - 1/theta, or NaN
  std::vector<std::array<long, 19>> cut_cols;    // per cut row: column or -1
  long size() const { return static_cast<long>(interior.size()); }
};

Layout make_layout(const ScalarField& psi0) {
  const auto& g = psi0.grid;
  Layout L;
  L.slot.assign(g.size(), -1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (psi0[i] < 0.0) {
      if (g.boundary_distance(g.node(i)) < 2) {
        throw ConfigError("interior touches the grid boundary");
      }
      L.slot[i] = static_cast<long>(L.interior.size());
      L.interior.push_back(i);
    }
  }
  if (L.interior.empty()) throw ConfigError("initial field has no interior nodes");
  for (std::size_t a = 0; a < L.interior.size(); ++a) {
    const std::size_t idx = L.interior[a];
    const Node n = g.node(idx);
    std::array<double, 19> coef{};
    std::array<long, 19> cols{};
    bool cut = false;
    for (int s = 0; s < 19; ++s) {
      const auto& o = kStencil[s].d;
      const std::size_t m = g.index(n.i + o[0], n.j + o[1], n.k + o[2]);
      cols[s] = L.slot[m];
      coef[s] = std::numeric_limits<double>::quiet_NaN();
      if (cols[s] < 0) {
        cut = true;
        const double theta = std::max(psi0[idx] / (psi0[idx] - psi0[m]), 0.05);
        coef[s] = 1.0 - 1.0 / theta;
      }
    }
    if (cut) {
      L.cut_rows.push_back(a);
      L.cut_coef.push_back(coef);
      L.cut_cols.push_back(cols);
    } else {
      L.plain_rows.push_back(idx);
    }
  }
  return L;
}

// Derivatives of F = 1 + A(p):H with respect to the 19 stencil values.
struct RowEval {
  double F = 0.0;
  std::array<double, 19> dF{};
};

RowEval eval_row(const std::array<double, 19>& v, double h, double eps, bool want_jac) {
  const double ih2 = 1.0 / (h * h);
  const double i2h = 0.5 / h;
  const double q4 = 0.25 * ih2;
  Vec3 p(i2h * (v[1] - v[2]), i2h * (v[3] - v[4]), i2h * (v[5] - v[6]));
  Mat3 H;
  H(0, 0) = ih2 * (v[1] - 2 * v[0] + v[2]);
  H(1, 1) = ih2 * (v[3] - 2 * v[0] + v[4]);
  H(2, 2) = ih2 * (v[5] - 2 * v[0] + v[6]);
  H(0, 1) = H(1, 0) = q4 * (v[7] - v[8] - v[9] + v[10]);
  H(0, 2) = H(2, 0) = q4 * (v[11] - v[12] - v[13] + v[14]);
  H(1, 2) = H(2, 1) = q4 * (v[15] - v[16] - v[17] + v[18]);
  Mat3 A = Mat3::Identity();
  Vec3 dFdp = Vec3::Zero();
  if (eps > 0.0) {
    const double D = p.squaredNorm() + eps * eps;
    A -= p * p.transpose() / D;
    if (want_jac) {
      const Vec3 Hp = H * p;
      dFdp = -(2.0 / D) * Hp + (2.0 * p.dot(Hp) / (D * D)) * p;
    }
  }
  RowEval r;
  r.F = 1.0 + (A.array() * H.array()).sum();
  if (!want_jac) return r;
  r.dF[0] = -2.0 * ih2 * A.trace();
  for (int ax = 0; ax < 3; ++ax) {
    r.dF[1 + 2 * ax] = A(ax, ax) * ih2 + dFdp[ax] * i2h;
    r.dF[2 + 2 * ax] = A(ax, ax) * ih2 - dFdp[ax] * i2h;
  }
  const double cxy = 2.0 * A(0, 1) * q4, cxz = 2.0 * A(0, 2) * q4, cyz = 2.0 * A(1, 2) * q4;
  r.dF[7] = cxy, r.dF[8] = -cxy, r.dF[9] = -cxy, r.dF[10] = cxy;
  r.dF[11] = cxz, r.dF[12] = -cxz, r.dF[13] = -cxz, r.dF[14] = cxz;
  r.dF[15] = cyz, r.dF[16] = -cyz, r.dF[17] = -cyz, r.dF[18] = cyz;
  return r;
}

class EllipticProblem {
 public:
  EllipticProblem(const UniformGrid& g, const Layout& L, kernels::Backend backend)
      : L_(L), work_(g, 0.0), backend_(backend) {
    const std::size_t sy = static_cast<std::size_t>(g.nx());
    const std::size_t sz = sy * static_cast<std::size_t>(g.ny());
    for (int s = 0; s < 19; ++s) {
      const auto& o = kStencil[s].d;
      stride_[s] = static_cast<long>(o[0]) + static_cast<long>(sy) * o[1] +
                   static_cast<long>(sz) * o[2];
    }
  }

  void scatter(const Eigen::VectorXd& x) {
    for (std::size_t a = 0; a < L_.interior.size(); ++a) {
      work_[L_.interior[a]] = x[static_cast<long>(a)];
    }
  }

  // F = 1 + A(grad u) : hess u per interior row; eps <= 0 gives the Laplacian.
  Eigen::VectorXd residual(const Eigen::VectorXd& x, double eps) {
    scatter(x);
    Eigen::VectorXd r(L_.size());
    const double h = work_.grid.h();
    if (eps > 0.0) {
      std::vector<double> rp(L_.plain_rows.size());
      kernels::elliptic_residual(backend_, work_.grid, work_.values.data(), rp.data(),
                                 L_.plain_rows, eps);
      for (std::size_t k = 0; k < rp.size(); ++k) r[L_.slot[L_.plain_rows[k]]] = rp[k];
    } else {
      for (std::size_t idx : L_.plain_rows) {
        r[L_.slot[idx]] = eval_row(gather_plain(idx), h, eps, false).F;
      }
    }
    for (std::size_t c = 0; c < L_.cut_rows.size(); ++c) {
      r[static_cast<long>(L_.cut_rows[c])] = eval_row(gather_cut(c, x), h, eps, false).F;
    }
    return r;
  }

  SpMat jacobian(const Eigen::VectorXd& x, double eps) {
    scatter(x);
    const double h = work_.grid.h();
    std::vector<Triplet> trip;
    trip.reserve(L_.interior.size() * 19);
    for (std::size_t idx : L_.plain_rows) {
      const long row = L_.slot[idx];
      const RowEval e = eval_row(gather_plain(idx), h, eps, true);
      for (int s = 0; s < 19; ++s) {
        if (e.dF[s] != 0.0) {
          trip.emplace_back(row, L_.slot[static_cast<std::size_t>(static_cast<long>(idx) + stride_[s])], e.dF[s]);
        }
      }
    }
    for (std::size_t c = 0; c < L_.cut_rows.size(); ++c) {
      const long row = static_cast<long>(L_.cut_rows[c]);
      const RowEval e = eval_row(gather_cut(c, x), h, eps, true);
      double diag = 0.0;
      for (int s = 0; s < 19; ++s) {
        const long col = L_.cut_cols[c][s];
        if (col >= 0) {
          if (col == row) {
            diag += e.dF[s];
          } else if (e.dF[s] != 0.0) {
            trip.emplace_back(row, col, e.dF[s]);
          }
        } else {
          diag += e.dF[s] * L_.cut_coef[c][s];
        }
      }
      trip.emplace_back(row, row, diag);
    }
    SpMat J(L_.size(), L_.size());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

  // Nonlinear Gauss-Seidel sweep, one scalar Newton update per row.
  void gauss_seidel_sweep(Eigen::VectorXd& x, double eps) {
    const double h = work_.grid.h();
    std::size_t c = 0;
    for (std::size_t a = 0; a < L_.interior.size(); ++a) {
      const bool is_cut = c < L_.cut_rows.size() && L_.cut_rows[c] == a;
      scatter_one(a, x);
      std::array<double, 19> v = is_cut ? gather_cut(c, x) : gather_plain(L_.interior[a]);
      const RowEval e = eval_row(v, h, eps, true);
      double d = e.dF[0];
      if (is_cut) {
        for (int s = 1; s < 19; ++s) {
          if (L_.cut_cols[c][s] < 0) d += e.dF[s] * L_.cut_coef[c][s];
        }
        ++c;
      }
      if (d < 0.0) x[static_cast<long>(a)] -= e.F / d;
      work_[L_.interior[a]] = x[static_cast<long>(a)];
    }
  }

  ScalarField interior_field(const Eigen::VectorXd& x) const {
    ScalarField u(work_.grid, 0.0);
    for (std::size_t a = 0; a < L_.interior.size(); ++a) {
      u[L_.interior[a]] = std::max(0.0, x[static_cast<long>(a)]);
    }
    return u;
  }

 private:
  void scatter_one(std::size_t a, const Eigen::VectorXd& x) {
    work_[L_.interior[a]] = x[static_cast<long>(a)];
  }

  std::array<double, 19> gather_plain(std::size_t idx) const {
    std::array<double, 19> v;
    for (int s = 0; s < 19; ++s) {
      v[s] = work_[static_cast<std::size_t>(static_cast<long>(idx) + stride_[s])];
    }
    return v;
  }

  std::array<double, 19> gather_cut(std::size_t c, const Eigen::VectorXd& x) const {
    const std::size_t a = L_.cut_rows[c];
    const double ui = x[static_cast<long>(a)];
    std::array<double, 19> v;
    for (int s = 0; s < 19; ++s) {
      const long col = L_.cut_cols[c][s];
      v[s] = col >= 0 ? x[col] : ui * L_.cut_coef[c][s];
    }
    return v;
  }

  const Layout& L_;
  ScalarField work_;
  kernels::Backend backend_;
  std::array<long, 19> stride_{};
};

struct NewtonStats {
  int iterations = 0;
  int linear_failures = 0;
  int gs_sweeps = 0;
  double residual = 0.0;
  bool converged = false;
};

NewtonStats newton(EllipticProblem& P, Eigen::VectorXd& x, double eps, int max_iters,
                   double tol) {
  NewtonStats st;
  Eigen::VectorXd r = P.residual(x, eps);
  double rn = r.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < max_iters; ++it) {
    if (rn <= tol) {
      st.converged = true;
      break;
    }
    ++st.iterations;
    const SpMat J = P.jacobian(x, eps);
    Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(1e-11);
    solver.setMaxIterations(4000);
    solver.compute(J);
    Eigen::VectorXd dx;
    bool ok = solver.info() == Eigen::Success;
    if (ok) {
      dx = solver.solve(-r);
      ok = solver.info() == Eigen::Success && dx.allFinite();
      ok = ok && std::isfinite(solver.error());
    }
    if (!ok) {
      ++st.linear_failures;
      for (int s = 0; s < 50; ++s) P.gauss_seidel_sweep(x, eps);
      st.gs_sweeps += 50;
      r = P.residual(x, eps);
      rn = r.lpNorm<Eigen::Infinity>();
      continue;
    }
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k <= 20; ++k) {
      const Eigen::VectorXd xt = x + lambda * dx;
      Eigen::VectorXd rt = P.residual(xt, eps);
      const double rtn = rt.lpNorm<Eigen::Infinity>();
      if (rt.allFinite() && rtn < rn) {
        x = xt;
        r = std::move(rt);
        rn = rtn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (rn <= tol) st.converged = true;
  st.residual = rn;
  return st;
}

}  // namespace

ScalarField solve_poisson(const ScalarField& initial) {
  const Layout L = make_layout(initial);
  EllipticProblem P(initial.grid, L, kernels::Backend::openmp);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(L.size());
  newton(P, x, 0.0, 3, 1e-9);
  return P.interior_field(x);
}

ArrivalResult solve_elliptic_regularized(const ScalarField& initial, const SolveConfig& config) {
  config.validate();
  initial.check_finite();
  const auto t0 = std::chrono::steady_clock::now();
  const double h = initial.grid.h();
  const Layout L = make_layout(initial);
  EllipticProblem P(initial.grid, L, config.backend);

  ArrivalResult res;
  res.method = SolveMethod::elliptic_regularized;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(L.size());
  const NewtonStats ps = newton(P, x, 0.0, 3, 1e-9);
  res.diagnostics["poisson_residual"] = ps.residual;

  int total_iters = 0;
  for (std::size_t s = 0; s < config.epsilon_schedule.size(); ++s) {
    const double eps = config.epsilon_schedule[s];
    if (eps < h) {
      std::ostringstream os;
      os << "epsilon " << eps << " is below the grid spacing " << h;
      res.warnings.push_back(os.str());
    }
    const NewtonStats st = newton(P, x, eps, config.max_newton_iters, config.residual_tol);
    total_iters += st.iterations;
    const std::string tag = "eps[" + std::to_string(s) + "]";
    res.diagnostics[tag + ".newton_iters"] = st.iterations;
    res.diagnostics[tag + ".residual"] = st.residual;
    res.diagnostics[tag + ".linear_failures"] = st.linear_failures;
    res.diagnostics[tag + ".gauss_seidel_sweeps"] = st.gs_sweeps;
    if (!st.converged) {
      std::ostringstream os;
      os << "Newton stagnated at epsilon " << eps << " with residual " << st.residual;
      res.warnings.push_back(os.str());
    }
    res.per_epsilon.emplace_back(eps, P.interior_field(x));
  }
  res.u = res.per_epsilon.back().second;
  if (config.richardson && res.per_epsilon.size() >= 2) {
    const auto& [e1, u1] = res.per_epsilon[res.per_epsilon.size() - 2];
    const auto& [e2, u2] = res.per_epsilon.back();
    for (std::size_t i = 0; i < res.u.values.size(); ++i) {
      res.u[i] = std::max(0.0, (e1 * u2[i] - e2 * u1[i]) / (e1 - e2));
    }
  }
  res.u.check_finite();
  res.extinction_time = extinction_time(res.u);
  res.diagnostics["newton_iters"] = total_iters;
  res.diagnostics["unknowns"] = static_cast<double>(L.size());
  res.diagnostics["final_residual"] =
      res.diagnostics["eps[" + std::to_string(config.epsilon_schedule.size() - 1) + "].residual"];
  res.diagnostics["wallclock_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace lsflab
