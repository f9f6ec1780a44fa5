#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace softrec {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Violated precondition or type invariant.
struct ValidationError : Error {
  using Error::Error;
};
/// Requested object does not exist (vector outside the span, empty slice, ...).
struct InfeasibleError : Error {
  using Error::Error;
};
/// Non-finite inputs or a failed factorization.
struct NumericError : Error {
  using Error::Error;
};
/// Bad experiment or grid configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Pairing <a, b>: linear in a, conjugate-linear in b. Fixed repo-wide.
inline Complex inner(const Vec& a, const Vec& b) { return b.dot(a); }

inline double sqr(double x) { return x * x; }

/// Worker count: SOFTREC_THREADS if set, else hardware concurrency (capped at 16).
unsigned worker_count();

/// Runs fn(i) for i in [0, n). Deterministic as long as iterations only write
/// to disjoint slots; scheduling is static block partitioning.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace softrec
