#include "mbgk/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "mbgk/errors.hpp"

namespace mbgk {

namespace {

// Toro's pressure function for one side: f_K(p) and its derivative.
struct SideFunction {
  double rho, p, a, A, B, gamma;

  SideFunction(const RiemannState& st, double g)
      : rho(st.rho), p(st.p), a(std::sqrt(g * st.p / st.rho)),
        A(2.0 / ((g + 1.0) * st.rho)), B((g - 1.0) / (g + 1.0) * st.p), gamma(g) {}

  double value(double pm) const {
    if (pm > p) return (pm - p) * std::sqrt(A / (pm + B));
    return 2.0 * a / (gamma - 1.0) * (std::pow(pm / p, (gamma - 1.0) / (2.0 * gamma)) - 1.0);
  }

  double deriv(double pm) const {
    if (pm > p) {
      const double q = std::sqrt(A / (pm + B));
      return q * (1.0 - 0.5 * (pm - p) / (pm + B));
    }
    return 1.0 / (rho * a) * std::pow(pm / p, -(gamma + 1.0) / (2.0 * gamma));
  }
};

}  // namespace

double sod_star_pressure(const RiemannState& left, const RiemannState& right,
                         double gamma) {
  if (!(left.rho > 0 && right.rho > 0 && left.p > 0 && right.p > 0))
    throw_domain("sod_star_pressure: states must have positive density and pressure");
  const SideFunction fl(left, gamma), fr(right, gamma);
  const double du = right.u - left.u;

  // Pressure positivity (no vacuum generation) for the given data.
  if (2.0 * fl.a / (gamma - 1.0) + 2.0 * fr.a / (gamma - 1.0) <= du)
    throw_domain("sod_star_pressure: data generate vacuum");

  auto f = [&](double pm) { return fl.value(pm) + fr.value(pm) + du; };

  double lo = 1e-8, hi = 10.0 * std::max(left.p, right.p);
  while (f(hi) < 0.0) hi *= 10.0;  // extreme shock; extend the bracket
  if (f(lo) > 0.0) lo = std::min(lo, 1e-14);

  // Bisection with Newton acceleration whenever the Newton step stays bracketed.
  double pm = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fv = f(pm);
    if (fv > 0.0)
      hi = pm;
    else
      lo = pm;
    const double dfv = fl.deriv(pm) + fr.deriv(pm);
    double next = pm - fv / dfv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - pm) <= 1e-15 * pm) return next;
    pm = next;
    if (hi - lo <= 1e-15 * pm) break;
  }
  return pm;
}

RiemannState sod_exact(const RiemannState& left, const RiemannState& right,
                       double gamma, double xi) {
  const double ps = sod_star_pressure(left, right, gamma);
  const SideFunction fl(left, gamma), fr(right, gamma);
  const double us = 0.5 * (left.u + right.u) + 0.5 * (fr.value(ps) - fl.value(ps));
  const double mu2 = (gamma - 1.0) / (gamma + 1.0);

  RiemannState out;
  if (xi <= us) {
    // Left of the contact.
    if (ps > left.p) {  // left shock
      const double sl = left.u - fl.a * std::sqrt((gamma + 1.0) / (2.0 * gamma) * ps / left.p +
                                                  (gamma - 1.0) / (2.0 * gamma));
      if (xi <= sl) return left;
      out.rho = left.rho * (ps / left.p + mu2) / (mu2 * ps / left.p + 1.0);
      out.u = us;
      out.p = ps;
      return out;
    }
    const double a_star = fl.a * std::pow(ps / left.p, (gamma - 1.0) / (2.0 * gamma));
    const double head = left.u - fl.a;
    const double tail = us - a_star;
    if (xi <= head) return left;
    if (xi >= tail) {
      out.rho = left.rho * std::pow(ps / left.p, 1.0 / gamma);
      out.u = us;
      out.p = ps;
      return out;
    }
    // Inside the left fan.
    const double factor = 2.0 / (gamma + 1.0) + mu2 / fl.a * (left.u - xi);
    out.rho = left.rho * std::pow(factor, 2.0 / (gamma - 1.0));
    out.u = 2.0 / (gamma + 1.0) * (fl.a + (gamma - 1.0) / 2.0 * left.u + xi);
    out.p = left.p * std::pow(factor, 2.0 * gamma / (gamma - 1.0));
    return out;
  }

  // Right of the contact.
  if (ps > right.p) {  // right shock
    const double sr = right.u + fr.a * std::sqrt((gamma + 1.0) / (2.0 * gamma) * ps / right.p +
                                                 (gamma - 1.0) / (2.0 * gamma));
    if (xi >= sr) return right;
    out.rho = right.rho * (ps / right.p + mu2) / (mu2 * ps / right.p + 1.0);
    out.u = us;
    out.p = ps;
    return out;
  }
  const double a_star = fr.a * std::pow(ps / right.p, (gamma - 1.0) / (2.0 * gamma));
  const double head = right.u + fr.a;
  const double tail = us + a_star;
  if (xi >= head) return right;
  if (xi <= tail) {
    out.rho = right.rho * std::pow(ps / right.p, 1.0 / gamma);
    out.u = us;
    out.p = ps;
    return out;
  }
  const double factor = 2.0 / (gamma + 1.0) - mu2 / fr.a * (right.u - xi);
  out.rho = right.rho * std::pow(factor, 2.0 / (gamma - 1.0));
  out.u = 2.0 / (gamma + 1.0) * (-fr.a + (gamma - 1.0) / 2.0 * right.u + xi);
  out.p = right.p * std::pow(factor, 2.0 * gamma / (gamma - 1.0));
  return out;
}

namespace {

VectorXd pack(const MomentState& st) {
  const int N = st.count(), d = st.dim();
  VectorXd x(N * (d + 1));
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < d; ++k) x(i * d + k) = st.u()(i, k);
  x.tail(N) = st.T();
  return x;
}

MomentState unpack(const MomentState& like, const VectorXd& x) {
  const int N = like.count(), d = like.dim();
  MatrixXd u(N, d);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < d; ++k) u(i, k) = x(i * d + k);
  return MomentState(d, like.n(), u, x.tail(N));
}

bool temperatures_positive(const VectorXd& x, int N) {
  return (x.tail(N).array() > 0.0).all();
}

// One damped Newton run from the given initial guess. Returns false on
// stagnation or a singular Jacobian.
bool newton_attempt(const SpeciesSet& sp, const MomentState& state_n, double dt,
                    double eps, VectorXd& x) {
  const int N = state_n.count(), d = state_n.dim();
  const int m = N * (d + 1);

  auto residual = [&](const VectorXd& xv) {
    return be_residual(sp, unpack(state_n, xv), state_n, dt, eps);
  };

  VectorXd r = residual(x);
  for (int it = 0; it < 80; ++it) {
    // Finite-difference Jacobian, central where positivity allows.
    MatrixXd J(m, m);
    for (int j = 0; j < m; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(j)));
      VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      if (temperatures_positive(xm, N)) {
        J.col(j) = (residual(xp) - residual(xm)) / (2.0 * h);
      } else {
        J.col(j) = (residual(xp) - r) / h;
      }
    }

    Eigen::FullPivLU<MatrixXd> lu(J);
    if (!lu.isInvertible()) return false;
    const VectorXd step = lu.solve(-r);

    double alpha = 1.0;
    bool accepted = false;
    const double r0 = r.norm();
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      const VectorXd xn = x + alpha * step;
      if (!temperatures_positive(xn, N)) continue;
      const VectorXd rn = residual(xn);
      if (rn.norm() <= (1.0 - 1e-4 * alpha) * r0 || rn.norm() < 1e-14) {
        x = xn;
        r = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;

    const double xtol = 1e-13 * (1.0 + x.cwiseAbs().maxCoeff());
    if ((alpha * step).cwiseAbs().maxCoeff() <= xtol && r.norm() < 1e-9) return true;
  }
  return false;
}

}  // namespace

MomentState newton_moments(const SpeciesSet& sp, const MomentState& state_n,
                           double dt, double eps) {
  if (state_n.count() == 1) return state_n;

  VectorXd x = pack(state_n);
  if (newton_attempt(sp, state_n, dt, eps, x)) return unpack(state_n, x);

  // Continuation in dt: march the solution up from a step small enough for
  // plain Newton, doubling until the requested dt is reached.
  const int max_halvings = 60;
  int k = 1;
  for (; k <= max_halvings; ++k) {
    x = pack(state_n);
    if (newton_attempt(sp, state_n, dt * std::ldexp(1.0, -k), eps, x)) break;
  }
  if (k > max_halvings)
    throw Error(ErrorCategory::numeric, "newton_moments: continuation failed to start");
  for (--k; k >= 0; --k) {
    if (!newton_attempt(sp, state_n, dt * std::ldexp(1.0, -k), eps, x))
      throw Error(ErrorCategory::numeric, "newton_moments: continuation stalled");
  }
  return unpack(state_n, x);
}

}  // namespace mbgk
