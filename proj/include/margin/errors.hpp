#pragma once

#include <stdexcept>
#include <string>

namespace margin {

// Base class for every error this library raises on bad inputs or numerical
// breakdown. Solver non-convergence is not an error; it is reported through
// the `converged` flag on results.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A matrix required to be symmetric positive definite is not (within the
// pivot tolerance used by the Cholesky factorization).
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// A general eigenproblem produced no eigenvalue with negligible imaginary
// part, or the QR iteration failed to converge within its sweep budget.
struct NoRealEigenvalue : Error {
  using Error::Error;
};

// Sigma scaling must be a positive finite number.
struct InvalidSigma : Error {
  using Error::Error;
};

// The lambda-blend of the two shape matrices lost positive definiteness
// (only possible through degenerate input).
struct SingularSigmaLambda : Error {
  using Error::Error;
};

// An iterative routine with a hard iteration cap hit the cap.
struct MaxIterationsExceeded : Error {
  using Error::Error;
};

// Projection was asked for the boundary multiplier of a point that is not
// strictly outside the set.
struct NotExterior : Error {
  using Error::Error;
};

// The two solver iterates collapsed onto one point, so no search direction
// exists between them.
struct CoincidentIterates : Error {
  using Error::Error;
};

// Line search direction has zero length; the caller treats this as
// convergence.
struct DegenerateDirection : Error {
  using Error::Error;
};

// A peer message arrived for a different round than the local agent is in.
struct IterationMismatch : Error {
  using Error::Error;
};

// Transport-level failures for the distributed mode.
struct TransportError : Error {
  using Error::Error;
};

// The byte stream closed before the final message of the session.
struct ConnectionLost : TransportError {
  using TransportError::TransportError;
};

// The two endpoints disagree on protocol version, role assignment, or
// solver options.
struct HandshakeMismatch : TransportError {
  using TransportError::TransportError;
};

// Input file violates the expected schema (bad header, wrong column count).
struct SchemaError : Error {
  using Error::Error;
};

}  // namespace margin
