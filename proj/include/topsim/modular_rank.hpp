#pragma once

#include <Eigen/SparseCore>

namespace topsim {

// Exact rank of an integer matrix, computed by Gaussian elimination over the
// prime field F_p with p = 2^31 - 1.  rank_Fp <= rank_Q always; a strict drop
// would require p to divide every maximal nonzero minor of the input.  For the
// small signed incidence matrices handled here that event is vanishingly rare,
// and any occurrence would surface as a Betti-number mismatch against the
// independent spectral computation (a hard consistency error), so it cannot
// pass silently.
int rank_mod_p(const Eigen::SparseMatrix<double>& m);

}  // namespace topsim
