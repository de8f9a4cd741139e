#pragma once

#include <Eigen/Sparse>

#include "rshock/grid.hpp"

namespace rshock::detail {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// -lap_h as a sparse matrix (positive semidefinite, constants in the kernel).
SparseMatrix negative_laplacian(const PeriodicGrid& grid);

Vector to_vector(const ScalarField& f);
ScalarField to_field(const PeriodicGrid& grid, const Vector& v);

/// Solves k e^w + c L w = r for w, L = -lap_h, by damped Newton started at w0.
/// The iteration is a descent on the convex functional
///   sum k e^w + (c/2) w.Lw - r.w,
/// so it converges whenever the problem is solvable (sum r > 0). Returns false
/// if the residual max|G| does not drop below tol * max(1, max|r|) within
/// max_iters iterations or if a non-finite value appears.
bool solve_exp_diffusion(const SparseMatrix& L, double k, double c, const Vector& r, Vector& w, double tol,
                         int max_iters);

}  // namespace rshock::detail
