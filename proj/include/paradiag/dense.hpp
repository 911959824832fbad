#pragma once

#include "paradiag/allatonce.hpp"
#include "paradiag/numkit.hpp"

/// Reference dense assemblies of the all-at-once systems and their
/// preconditioners, built entry-by-entry from the block definitions. They
/// share no code with the matrix-free operator or FFT preconditioner paths,
/// which makes them usable as an independent cross-check at small sizes.
namespace paradiag::dense {

using numkit::DenseMatrix;

/// Tracking system matrix; rescaled = true gives the sqrt(gamma)-rescaled
/// form (the one GMRES solves), false the physical form.
DenseMatrix tracking_system(const allatonce::ControlProblem& p, bool rescaled);

/// Tracking preconditioner P(alpha), rescaled form, real alpha.
DenseMatrix tracking_precond(const allatonce::ControlProblem& p, double alpha);

/// Terminal-cost system matrix.
DenseMatrix terminal_system(const allatonce::ControlProblem& p);

/// Terminal-cost preconditioner P(alpha), block-triangular, real alpha.
DenseMatrix terminal_precond(const allatonce::ControlProblem& p, double alpha);

}  // namespace paradiag::dense
