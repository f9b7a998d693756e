#include "mbgk/integrate.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include "mbgk/errors.hpp"
#include "mbgk/parallel.hpp"

namespace mbgk {

ImexTableau ImexTableau::ars222() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  const double d = 1.0 - 1.0 / (2.0 * g);
  ImexTableau t;
  t.a_impl = MatrixXd::Zero(3, 3);
  t.a_expl = MatrixXd::Zero(3, 3);
  t.a_impl(1, 1) = g;
  t.a_impl(2, 1) = 1.0 - g;
  t.a_impl(2, 2) = g;
  t.a_expl(1, 0) = g;
  t.a_expl(2, 0) = d;
  t.a_expl(2, 1) = 1.0 - d;
  t.b_impl = Eigen::Vector3d(0.0, 1.0 - g, g);
  t.b_expl = Eigen::Vector3d(d, 1.0 - d, 0.0);
  return t;
}

double ImexTableau::consistency_error() const {
  const int s = stages();
  double err = 0.0;
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j) {
      err = std::max(err, std::abs(a_expl(i, j)));
      err = std::max(err, std::abs(a_impl(i, j)));
    }
  for (int i = 0; i < s; ++i) err = std::max(err, std::abs(a_expl(i, i)));
  err = std::max(err, std::abs(b_impl.sum() - 1.0));
  err = std::max(err, std::abs(b_expl.sum() - 1.0));
  const VectorXd c_impl = a_impl.rowwise().sum();
  const VectorXd c_expl = a_expl.rowwise().sum();
  err = std::max(err, (c_impl - c_expl).cwiseAbs().maxCoeff());
  err = std::max(err, std::abs(b_impl.dot(c_impl) - 0.5));
  err = std::max(err, std::abs(b_expl.dot(c_expl) - 0.5));
  return err;
}

double StepControl::imex_limit(const SpatialGrid& grid, const VelocityGrid& vgrid) {
  return grid.dx() / (2.0 * vgrid.max_abs());
}

double StepControl::explicit_limit(double eps, const SpatialGrid& grid,
                                   const VelocityGrid& vgrid, double lambda_max) {
  return eps * grid.dx() /
         (2.0 * eps * vgrid.max_abs() + grid.dx() * lambda_max);
}

double max_total_frequency(const SpeciesSet& sp, const std::vector<MomentState>& moments) {
  double worst = 0.0;
  for (const auto& m : moments) {
    const PairwiseCoefficients c = mixture_moments(sp, m);
    worst = std::max(worst, c.lambda.rowwise().sum().maxCoeff());
  }
  return worst;
}

namespace {

void axpy(ChuState& y, double a, const ChuState& x) {
  for (int i = 0; i < y.species(); ++i) {
    y.g[i] += a * x.g[i];
    y.h[i] += a * x.h[i];
  }
}

ChuState transport_term(const ChuState& f, const SpatialGrid& grid,
                        const VelocityGrid& vgrid) {
  ChuState out;
  out.g.reserve(f.species());
  out.h.reserve(f.species());
  for (int i = 0; i < f.species(); ++i) {
    out.g.push_back(advect(f.g[i], grid, vgrid));
    out.h.push_back(advect(f.h[i], grid, vgrid));
  }
  return out;
}

struct FailedCell {
  int cell = -1;
  MomentState moments;
  double dt_eff = 0.0;
};

}  // namespace

StepDiagnostics imex_step(ChuState& state, double dt, double eps,
                          const ImexTableau& tableau, const SpatialGrid& grid,
                          const VelocityGrid& vgrid, const SpeciesSet& sp,
                          const GstConfig& cfg, int threads) {
  const int ns = tableau.stages();
  const int cells = state.cells();

  StepDiagnostics diag;
  diag.min_temperature_source = std::numeric_limits<double>::infinity();

  // One attempt at the given step size. On GST non-convergence in any cell the
  // certified step for the worst cell is reported back through dt_retry.
  auto attempt = [&](double dt_try, double& dt_retry, ChuState& result) -> bool {
    diag.max_gst_iterations = 0;
    diag.total_gst_iterations = 0;
    diag.max_momentum_drift = 0.0;
    diag.max_energy_drift = 0.0;
    diag.min_temperature_source = std::numeric_limits<double>::infinity();

    std::vector<ChuState> k_transport(ns), k_collision(ns);
    ChuState stage = state;
    bool ok = true;
    dt_retry = dt_try;

    for (int s = 0; s < ns; ++s) {
      ChuState star = state;
      for (int r = 0; r < s; ++r) {
        if (tableau.a_expl(s, r) != 0.0) axpy(star, dt_try * tableau.a_expl(s, r), k_transport[r]);
        if (tableau.a_impl(s, r) != 0.0) axpy(star, dt_try * tableau.a_impl(s, r), k_collision[r]);
      }

      const double a_ss = tableau.a_impl(s, s);
      if (a_ss > 0.0) {
        const double dt_eff = a_ss * dt_try;
        stage = star;
        std::mutex merge;
        std::vector<FailedCell> failures;
        parallel_for(cells, threads, [&](int lo, int hi) {
          int local_max_it = 0;
          long local_tot_it = 0;
          double local_pdrift = 0.0, local_edrift = 0.0, local_src = std::numeric_limits<double>::infinity();
          std::vector<FailedCell> local_failures;
          for (int c = lo; c < hi; ++c) {
            const MomentState m_star = cell_moments_from_chu(sp, star, vgrid, c);
            auto [m_new, rep] = solve_moments(sp, m_star, dt_eff, eps, cfg);
            local_max_it = std::max(local_max_it, rep.iterations);
            local_tot_it += rep.iterations;
            local_pdrift = std::max(local_pdrift, rep.momentum_drift);
            local_edrift = std::max(local_edrift, rep.energy_drift);
            local_src = std::min(local_src, rep.min_temperature_source);
            if (!rep.converged) {
              local_failures.push_back({c, m_star, dt_eff});
              continue;
            }
            const PairwiseCoefficients coeffs = interaction_matrices(sp, m_new);
            const PairTargets targets = chu_targets(sp, m_new, coeffs, vgrid);
            implicit_relax_cell(stage, c, targets, coeffs.lambda, dt_eff, eps);
          }
          std::lock_guard<std::mutex> lock(merge);
          diag.max_gst_iterations = std::max(diag.max_gst_iterations, local_max_it);
          diag.total_gst_iterations += local_tot_it;
          diag.max_momentum_drift = std::max(diag.max_momentum_drift, local_pdrift);
          diag.max_energy_drift = std::max(diag.max_energy_drift, local_edrift);
          diag.min_temperature_source = std::min(diag.min_temperature_source, local_src);
          failures.insert(failures.end(), local_failures.begin(), local_failures.end());
        });

        if (!failures.empty()) {
          double dt_cert = dt_try;
          for (const auto& fc : failures) {
            const ContractionBudget budget = contraction_budget(sp, fc.moments, fc.dt_eff, eps);
            const TimeStepSelection sel =
                select_time_step(budget, fc.dt_eff, cfg.contraction_target);
            dt_cert = std::min(dt_cert, sel.dt1 / a_ss);
          }
          dt_retry = dt_cert;
          ok = false;
          return false;
        }

        // Stage collision term recovered from the stage identity:
        // K = (f^(s) - f^(s,*)) / (a_ss dt) = (1/eps) sum_j lambda (M - f^(s)).
        ChuState kc = stage;
        axpy(kc, -1.0, star);
        for (int i = 0; i < kc.species(); ++i) {
          kc.g[i] /= dt_eff;
          kc.h[i] /= dt_eff;
        }
        k_collision[s] = std::move(kc);
      } else {
        stage = std::move(star);
        k_collision[s] = ChuState::zeros(state.species(), state.points(), cells);
      }

      k_transport[s] = transport_term(stage, grid, vgrid);
    }

    result = state;
    for (int s = 0; s < ns; ++s) {
      if (tableau.b_expl(s) != 0.0) axpy(result, dt_try * tableau.b_expl(s), k_transport[s]);
      if (tableau.b_impl(s) != 0.0) axpy(result, dt_try * tableau.b_impl(s), k_collision[s]);
    }
    return ok;
  };

  ChuState result;
  double dt_retry = dt;
  if (attempt(dt, dt_retry, result)) {
    state = std::move(result);
    diag.dt_used = dt;
    if (!std::isfinite(diag.min_temperature_source)) diag.min_temperature_source = 0.0;
    return diag;
  }

  diag.retried = true;
  double dt_ignored = dt_retry;
  if (!attempt(dt_retry, dt_ignored, result)) {
    std::ostringstream msg;
    msg << "imex_step: moment solve failed to converge even at the certified step "
        << dt_retry << " (original dt " << dt << ")";
    throw Error(ErrorCategory::numeric, msg.str());
  }
  state = std::move(result);
  diag.dt_used = dt_retry;
  if (!std::isfinite(diag.min_temperature_source)) diag.min_temperature_source = 0.0;
  return diag;
}

namespace {

// Explicit collision term (1/eps) sum_j lambda_ij (G_ij - g_i) at the current state.
ChuState collision_term(const ChuState& f, double eps, const VelocityGrid& vgrid,
                        const SpeciesSet& sp, int threads) {
  const int cells = f.cells();
  ChuState out = ChuState::zeros(f.species(), f.points(), cells);
  parallel_for(cells, threads, [&](int lo, int hi) {
    for (int c = lo; c < hi; ++c) {
      const MomentState m = cell_moments_from_chu(sp, f, vgrid, c);
      const PairwiseCoefficients coeffs = mixture_moments(sp, m);
      const PairTargets targets = chu_targets(sp, m, coeffs, vgrid);
      for (int i = 0; i < f.species(); ++i) {
        Eigen::ArrayXd gacc = Eigen::ArrayXd::Zero(f.points());
        Eigen::ArrayXd hacc = Eigen::ArrayXd::Zero(f.points());
        for (int j = 0; j < f.species(); ++j) {
          gacc += coeffs.lambda(i, j) * (targets.G[i].col(j) - f.g[i].col(c));
          hacc += coeffs.lambda(i, j) * (targets.H[i].col(j) - f.h[i].col(c));
        }
        out.g[i].col(c) = gacc / eps;
        out.h[i].col(c) = hacc / eps;
      }
    }
  });
  return out;
}

}  // namespace

StepDiagnostics explicit_step(ChuState& state, double dt, double eps,
                              const SpatialGrid& grid, const VelocityGrid& vgrid,
                              const SpeciesSet& sp, int threads) {
  StepDiagnostics diag;
  diag.dt_used = dt;

  auto rhs = [&](const ChuState& f) {
    ChuState k = transport_term(f, grid, vgrid);
    axpy(k, 1.0, collision_term(f, eps, vgrid, sp, threads));
    return k;
  };

  const ChuState k1 = rhs(state);
  ChuState mid = state;
  axpy(mid, dt, k1);
  const ChuState k2 = rhs(mid);

  axpy(state, 0.5 * dt, k1);
  axpy(state, 0.5 * dt, k2);
  return diag;
}

}  // namespace mbgk
