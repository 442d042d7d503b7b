// tridiag.hpp — eigenvalues of real symmetric tridiagonal matrices (implicit QL)

#pragma once

#include <vector>

namespace bcfkit::tridiag {

// diag has size n, offdiag size n-1 (offdiag[i] couples i and i+1).
// Returns all eigenvalues in ascending order. Throws NoConvergence if any
// eigenvalue needs more than 30·n QL sweeps.
std::vector<double> eigenvalues(std::vector<double> diag, std::vector<double> offdiag);

} // namespace bcfkit::tridiag
