#include <algorithm>
#include <chrono>
#include <cmath>

#include "lsflab/arrival.hpp"
#include "lsflab/diffops.hpp"

namespace lsflab {

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::parabolic: return "parabolic";
    case SolveMethod::elliptic_regularized: return "elliptic";
    case SolveMethod::both: return "both";
  }
  return "?";
}

SolveMethod solve_method_from_string(const std::string& s) {
  if (s == "parabolic") return SolveMethod::parabolic;
  if (s == "elliptic" || s == "elliptic_regularized") return SolveMethod::elliptic_regularized;
  if (s == "both") return SolveMethod::both;
  throw ConfigError("unknown method '" + s + "'");
}

void SolveConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 0.5)) throw ConfigError("cfl must lie in (0, 0.5]");
  if (epsilon_schedule.empty()) throw ConfigError("epsilon schedule is empty");
  for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
    if (!(epsilon_schedule[i] > 0.0)) throw ConfigError("epsilon values must be positive");
    if (i > 0 && !(epsilon_schedule[i] < epsilon_schedule[i - 1])) {
      throw ConfigError("epsilon schedule must be strictly decreasing");
    }
  }
  if (max_newton_iters < 1) throw ConfigError("max_newton_iters must be >= 1");
  if (!(residual_tol > 0.0)) throw ConfigError("residual_tol must be positive");
  if (reinit_every < 1 || reinit_iters < 0) throw ConfigError("bad reinitialization settings");
  if (!(band_halfwidth >= 3.0)) throw ConfigError("band half-width must be >= 3h");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  for (std::size_t i = 1; i < snapshot_times.size(); ++i) {
    if (!(snapshot_times[i] > snapshot_times[i - 1])) {
      throw ConfigError("snapshot times must be increasing");
    }
  }
}

namespace {

void build_band(const UniformGrid& g, const std::vector<double>& psi, double width,
                std::vector<std::size_t>& band, std::vector<std::size_t>& reinit_nodes) {
  band.clear();
  reinit_nodes.clear();
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  std::vector<std::uint8_t> in(psi.size(), 0);
  for (int k = 1; k < nz - 1; ++k)
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (std::abs(psi[idx]) < width) {
          band.push_back(idx);
          in[idx] = 1;
        }
      }
  const std::size_t sy = static_cast<std::size_t>(nx);
  const std::size_t sz = sy * static_cast<std::size_t>(ny);
  for (int k = 1; k < nz - 1; ++k)
    for (int j = 1; j < ny - 1; ++j)
      for (int i = 1; i < nx - 1; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (in[idx] || in[idx - 1] || in[idx + 1] || in[idx - sy] || in[idx + sy] ||
            in[idx - sz] || in[idx + sz]) {
          reinit_nodes.push_back(idx);
        }
      }
}

void mark_frozen(const UniformGrid& g, const std::vector<double>& psi,
                 const std::vector<std::size_t>& nodes, double keep,
                 std::vector<std::uint8_t>& frozen) {
  const std::size_t sy = static_cast<std::size_t>(g.nx());
  const std::size_t sz = sy * static_cast<std::size_t>(g.ny());
  const std::size_t off[6] = {1, sy, sz, 1, sy, sz};
  for (std::size_t idx : nodes) {
    const bool neg = psi[idx] < 0.0;
    bool cut = false;
    for (int a = 0; a < 3; ++a) {
      cut = cut || ((psi[idx + off[a]] < 0.0) != neg) || ((psi[idx - off[a + 3]] < 0.0) != neg);
    }
    frozen[idx] = (cut || std::abs(psi[idx]) < keep) ? 1 : 0;
  }
}

}  // namespace

ArrivalResult solve_parabolic(const ScalarField& initial, const SolveConfig& config) {
  config.validate();
  initial.check_finite();
  const auto t0 = std::chrono::steady_clock::now();
  const UniformGrid& g = initial.grid;
  const double h = g.h();
  const double dt = config.cfl * h * h / (2.0 * kDim);
  const double W = config.band_halfwidth * h;
  const std::size_t N = g.size();

  std::vector<double> psi(N), next(N), psi0(N);
  for (std::size_t i = 0; i < N; ++i) psi[i] = std::clamp(initial[i], -W, W);

  ArrivalResult res;
  res.method = SolveMethod::parabolic;
  res.u = ScalarField(g, 0.0);
  std::vector<std::uint8_t> crossed(N, 1);
  std::size_t remaining = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (initial[i] < 0.0) {
      crossed[i] = 0;
      ++remaining;
    }
  }

  std::vector<std::size_t> band, reinit_nodes;
  std::vector<std::uint8_t> frozen(N, 0);
  std::size_t next_snapshot = 0;
  long step = 0;
  long recrossings = 0;
  long reinit_calls = 0;
  double t = 0.0;
  const auto backend = config.backend;

  auto reinitialize = [&]() {
    build_band(g, psi, W, band, reinit_nodes);
    for (std::size_t i = 0; i < N; ++i) {
      if (std::abs(psi[i]) >= W) psi[i] = psi[i] < 0.0 ? -W : W;
    }
    if (config.reinit_iters > 0) {
      psi0 = psi;
      mark_frozen(g, psi, reinit_nodes, config.reinit_keep * h, frozen);
      next = psi;
      for (int it = 0; it < config.reinit_iters; ++it) {
        kernels::reinit_step(backend, g, psi.data(), psi0.data(), next.data(), reinit_nodes,
                             frozen, 0.3 * h);
        std::swap(psi, next);
      }
      for (std::size_t idx : reinit_nodes) psi[idx] = std::clamp(psi[idx], -W, W);
      build_band(g, psi, W, band, reinit_nodes);
    }
    ++reinit_calls;
  };

  build_band(g, psi, W, band, reinit_nodes);
  next = psi;
  while (remaining > 0) {
    if (step >= config.max_steps) {
      res.complete = false;
      res.warnings.push_back("stopped at max_steps before extinction");
      break;
    }
    while (next_snapshot < config.snapshot_times.size() &&
           config.snapshot_times[next_snapshot] <= t + 0.5 * dt) {
      res.snapshots.push_back({t, ScalarField(g, psi)});
      ++next_snapshot;
    }
    kernels::mcf_step(backend, g, psi.data(), next.data(), band, dt, config.delta);
    for (std::size_t idx : band) {
      const double a = psi[idx], b = next[idx];
      if (!std::isfinite(b)) {
        throw NumericalError("non-finite level-set value at step " + std::to_string(step));
      }
      if (!crossed[idx]) {
        if (b >= 0.0) {
          const double frac = a < 0.0 ? -a / (b - a) : 0.0;
          res.u[idx] = t + dt * frac;
          crossed[idx] = 1;
          --remaining;
        }
      } else if (b < 0.0 && initial[idx] < 0.0) {
        ++recrossings;
        next[idx] = 0.0;
      }
    }
    for (std::size_t idx : band) psi[idx] = next[idx];
    t += dt;
    ++step;
    if (step % config.reinit_every == 0) {
      reinitialize();
      next = psi;
    }
  }
  while (next_snapshot < config.snapshot_times.size()) {
    res.snapshots.push_back({config.snapshot_times[next_snapshot], ScalarField(g, psi)});
    ++next_snapshot;
  }
  res.extinction_time = extinction_time(res.u);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.diagnostics["steps"] = static_cast<double>(step);
  res.diagnostics["dt"] = dt;
  res.diagnostics["recrossings"] = static_cast<double>(recrossings);
  res.diagnostics["reinit_calls"] = static_cast<double>(reinit_calls);
  res.diagnostics["final_time"] = t;
  res.diagnostics["wallclock_s"] = wall;
  return res;
}

double extinction_time(const ScalarField& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, v);
  return m;
}

double extinction_time(const ArrivalResult& r) { return extinction_time(r.u); }

double max_gradient_norm(const ScalarField& u) {
  const auto& g = u.grid;
  double m = 0.0;
  for (int k = 1; k < g.nz() - 1; ++k)
    for (int j = 1; j < g.ny() - 1; ++j)
      for (int i = 1; i < g.nx() - 1; ++i) {
        if (!(u.at(i, j, k) > 0.0)) continue;
        m = std::max(m, central_gradient(u, Node{i, j, k}).norm());
      }
  return m;
}

double clearing_distance(const ScalarField& u, const ScalarField& initial, double T) {
  if (!(u.grid == initial.grid)) throw ConfigError("grid mismatch");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (u[i] > T) m = std::min(m, -initial[i]);
  }
  return m;
}

}  // namespace lsflab
