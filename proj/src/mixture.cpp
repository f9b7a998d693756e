#include "mbgk/mixture.hpp"

#include <cmath>

#include "mbgk/errors.hpp"

namespace mbgk {

namespace {

// 32 pi^2 / (3 (2 pi)^{3/2}) == (16/3) sqrt(pi/2)
const double kHsPrefactor = 32.0 * M_PI * M_PI / (3.0 * std::pow(2.0 * M_PI, 1.5));

}  // namespace

SpeciesSet::SpeciesSet(std::vector<std::string> names, VectorXd mass, VectorXd diameter)
    : names_(std::move(names)), mass_(std::move(mass)), diam_(std::move(diameter)) {
  const int n = static_cast<int>(mass_.size());
  if (n < 1) throw_domain("SpeciesSet: need at least one species");
  if (diam_.size() != n) throw_domain("SpeciesSet: mass/diameter size mismatch");
  if (static_cast<int>(names_.size()) != n)
    throw_domain("SpeciesSet: name count mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(mass_(i) > 0.0)) throw_domain("SpeciesSet: mass must be positive");
    if (!(diam_(i) > 0.0)) throw_domain("SpeciesSet: diameter must be positive");
  }

  c_lambda_.resize(n, n);
  cA_unit_.resize(n, n);
  cB_unit_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double mi = mass_(i), mj = mass_(j);
      const double dd = diam_(i) + diam_(j);
      const double msum = mi + mj;
      c_lambda_(i, j) = kHsPrefactor * mi * mj / (msum * msum) * dd * dd;
      // A_ij = cA_unit * rho_i rho_j * Psi_ij, and similarly for B; these are
      // the closed forms of the composite rho_i rho_j lambda_ij lambda_ji /
      // (rho_i lambda_ij + rho_j lambda_ji) expressions under the HS model.
      cA_unit_(i, j) = kHsPrefactor * mi * mj * dd * dd / (msum * msum * msum);
      cB_unit_(i, j) = 0.5 * kHsPrefactor * dd * dd / (msum * msum);
    }
  }
}

SpeciesSet::SpeciesSet(VectorXd mass, VectorXd diameter)
    : SpeciesSet(std::vector<std::string>(mass.size(), std::string()),
                 std::move(mass), std::move(diameter)) {
  for (int i = 0; i < count(); ++i) names_[i] = "species" + std::to_string(i + 1);
}

MomentState::MomentState(int dim, VectorXd n, MatrixXd u, VectorXd T)
    : dim_(dim), n_(std::move(n)), u_(std::move(u)), T_(std::move(T)) {
  if (dim_ < 1 || dim_ > 3) throw_domain("MomentState: dim must be 1, 2, or 3");
  const int N = static_cast<int>(n_.size());
  if (N < 1) throw_domain("MomentState: need at least one species");
  if (u_.rows() != N || u_.cols() != dim_)
    throw_domain("MomentState: velocity must be N x dim");
  if (T_.size() != N) throw_domain("MomentState: temperature size mismatch");
  for (int i = 0; i < N; ++i) {
    if (!(n_(i) > 0.0) || !std::isfinite(n_(i)))
      throw_domain("MomentState: density must be positive and finite");
    if (!(T_(i) > 0.0) || !std::isfinite(T_(i)))
      throw_domain("MomentState: temperature must be positive and finite");
  }
  if (!u_.allFinite()) throw_domain("MomentState: velocity must be finite");
}

VectorXd MomentState::rho(const SpeciesSet& sp) const {
  return sp.masses().cwiseProduct(n_);
}

VectorXd MomentState::s() const { return u_.rowwise().squaredNorm(); }

VectorXd MomentState::energy(const SpeciesSet& sp) const {
  const VectorXd r = rho(sp);
  return 0.5 * r.cwiseProduct(s()) + 0.5 * dim_ * n_.cwiseProduct(T_);
}

double MomentState::total_energy(const SpeciesSet& sp) const {
  return energy(sp).sum();
}

VectorXd MomentState::total_momentum(const SpeciesSet& sp) const {
  return u_.transpose() * rho(sp);
}

double hs_psi(const SpeciesSet& sp, int i, int j, double T_i, double T_j) {
  if (T_i < 0.0 || T_j < 0.0) throw_domain("hs_psi: negative temperature");
  return std::sqrt(T_i / sp.mass(i) + T_j / sp.mass(j));
}

double hs_collision_frequency(const SpeciesSet& sp, int i, int j, double n_j,
                              double T_i, double T_j) {
  if (!(n_j > 0.0)) throw_domain("hs_collision_frequency: density must be positive");
  return sp.c_lambda(i, j) * n_j * hs_psi(sp, i, j, T_i, T_j);
}

PairwiseCoefficients mixture_moments(const SpeciesSet& sp, const MomentState& st) {
  const int N = st.count();
  const int d = st.dim();
  const VectorXd rho = st.rho(sp);
  const VectorXd& n = st.n();
  const VectorXd& T = st.T();
  const MatrixXd& u = st.u();

  PairwiseCoefficients c;
  c.psi.resize(N, N);
  c.lambda.resize(N, N);
  c.alpha.resize(N, N);
  c.beta.resize(N, N);
  c.T_pair.resize(N, N);
  c.u_pair.assign(d, MatrixXd(N, N));

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      c.psi(i, j) = hs_psi(sp, i, j, T(i), T(j));
      c.lambda(i, j) = sp.c_lambda(i, j) * n(j) * c.psi(i, j);
    }

  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const double rl_i = rho(i) * c.lambda(i, j);
      const double rl_j = rho(j) * c.lambda(j, i);
      const double nl_i = n(i) * c.lambda(i, j);
      const double nl_j = n(j) * c.lambda(j, i);
      c.alpha(i, j) = rl_i / (rl_i + rl_j);
      c.beta(i, j) = nl_i / (nl_i + nl_j);
      for (int k = 0; k < d; ++k)
        c.u_pair[k](i, j) = c.alpha(i, j) * u(i, k) + c.alpha(j, i) * u(j, k);
      const double du2 = (u.row(i) - u.row(j)).squaredNorm();
      c.T_pair(i, j) = c.beta(i, j) * T(i) + c.beta(j, i) * T(j) +
                       (1.0 / d) * (rl_i * rl_j / (rl_i + rl_j)) * du2 / (nl_i + nl_j);
    }
  }
  return c;
}

PairwiseCoefficients interaction_matrices(const SpeciesSet& sp, const MomentState& st) {
  const int N = st.count();
  const int d = st.dim();
  PairwiseCoefficients c = mixture_moments(sp, st);
  const VectorXd rho = st.rho(sp);

  c.A.resize(N, N);
  c.B.resize(N, N);
  c.S.resize(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double rr = rho(i) * rho(j);
      c.A(i, j) = sp.cA_unit(i, j) * rr * c.psi(i, j);
      c.B(i, j) = sp.cB_unit(i, j) * rr * c.psi(i, j);
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += c.u_pair[k](i, j) * c.u_pair[k](i, j);
      c.S(i, j) = s;
    }
  c.Ddiag = c.A.rowwise().sum();
  c.Fdiag = c.B.rowwise().sum();

  if (N >= 2) {
    double amin = std::numeric_limits<double>::infinity(), amax = 0.0;
    double bmin = amin, bmax = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        if (i == j) continue;
        amin = std::min(amin, c.A(i, j));
        amax = std::max(amax, c.A(i, j));
        bmin = std::min(bmin, c.B(i, j));
        bmax = std::max(bmax, c.B(i, j));
      }
    c.A_min = amin;
    c.A_max = amax;
    c.B_min = bmin;
    c.B_max = bmax;
  }
  return c;
}

SpectralBounds spectral_bounds(const SpeciesSet& sp, const MomentState& st) {
  SpectralBounds b;
  const int N = st.count();
  if (N == 1) {
    b.degenerate = true;
    return b;
  }
  for (int i = 0; i < N; ++i)
    if (!(st.T()(i) > 0.0)) throw_domain("spectral_bounds: temperatures must be positive");

  const PairwiseCoefficients c = interaction_matrices(sp, st);
  const VectorXd rho = st.rho(sp);
  const double rho_min = rho.minCoeff(), rho_max = rho.maxCoeff();
  const double n_min = st.n().minCoeff(), n_max = st.n().maxCoeff();

  b.z_min = c.A_min * N / rho_max;
  b.zhat_min = c.B_min * N / n_max;
  // Upper bound via the Rayleigh quotient of D - A on the range space:
  // x'(D-A)x = (1/2) sum_{i!=j} A_ij (x_i - x_j)^2 <= N A_max |x|^2.
  b.z_max = c.A_max * N / rho_min;
  b.zhat_max = c.B_max * N / n_min;
  return b;
}

VectorXd equilibrium_velocity(const SpeciesSet& sp, const MomentState& st) {
  const VectorXd rho = st.rho(sp);
  return (st.u().transpose() * rho) / rho.sum();
}

double equilibrium_temperature(const SpeciesSet& sp, const MomentState& st) {
  const VectorXd rho = st.rho(sp);
  const VectorXd uinf = equilibrium_velocity(sp, st);
  const double n_tot = st.n().sum();
  double kinetic = 0.0;
  for (int i = 0; i < st.count(); ++i)
    kinetic += rho(i) * (st.u().row(i).squaredNorm() - uinf.squaredNorm());
  return st.n().dot(st.T()) / n_tot + kinetic / (st.dim() * n_tot);
}

}  // namespace mbgk
