#pragma once

#include "tam/matrix.hpp"

namespace tam {

// Distance between the column spans of X and Y: the spectral norm of
// Xperp^T Yhat, computed as sqrt(1 - sigma_min(Xhat^T Yhat)^2) so the
// n x (n-k) complement is never materialized (O(nk^2)). Inputs are
// orthonormalized via thin_qr unless `assume_orthonormal`; rank-deficient
// inputs raise InvalidSubspaceError. Range [0, 1]; symmetric in X, Y.
double subspace_dist(const Matrix& x, const Matrix& y, bool assume_orthonormal = false);

// The k x k orthonormal R such that Ustar^T (Ut R) is symmetric positive
// semidefinite (the basis in which rowwise comparisons of Ut against Ustar
// are meaningful). Built from the SVD W1 S W2^T of Ustar^T Ut as R = W2 W1^T.
Matrix align_rotation(const Matrix& ustar, const Matrix& ut);

}  // namespace tam
