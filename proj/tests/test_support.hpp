#pragma once

#include <random>

#include "mbgk/mixture.hpp"

// Shared generators for randomized property tests. Seeded deterministically
// by each test so failures reproduce.
namespace mbgk::testing {

struct RandomSystem {
  SpeciesSet species;
  MomentState state;
};

inline SpeciesSet random_species(std::mt19937& rng, int N) {
  std::uniform_real_distribution<double> mass(0.5, 4.0);
  std::uniform_real_distribution<double> diam(0.5, 2.0);
  VectorXd m(N), d(N);
  for (int i = 0; i < N; ++i) {
    m(i) = mass(rng);
    d(i) = diam(rng);
  }
  return SpeciesSet(m, d);
}

inline MomentState random_state(std::mt19937& rng, int N, int dim) {
  std::uniform_real_distribution<double> dens(0.1, 2.0);
  std::uniform_real_distribution<double> temp(0.1, 3.0);
  std::uniform_real_distribution<double> vel(-1.0, 1.0);
  VectorXd n(N), T(N);
  MatrixXd u(N, dim);
  for (int i = 0; i < N; ++i) {
    n(i) = dens(rng);
    T(i) = temp(rng);
    for (int k = 0; k < dim; ++k) u(i, k) = vel(rng);
  }
  return MomentState(dim, n, u, T);
}

inline RandomSystem random_system(std::mt19937& rng, int N, int dim) {
  return {random_species(rng, N), random_state(rng, N, dim)};
}

}  // namespace mbgk::testing
