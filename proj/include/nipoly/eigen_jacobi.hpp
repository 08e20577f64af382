#pragma once

#include <complex>
#include <vector>

namespace nipoly {

// Dense row-major square matrices.
struct RealMatrix {
  int n = 0;
  std::vector<double> a;
  explicit RealMatrix(int n_ = 0) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct HermitianMatrix {
  int n = 0;
  std::vector<std::complex<double>> a;
  explicit HermitianMatrix(int n_ = 0) : n(n_), a(static_cast<std::size_t>(n_) * n_) {}
  std::complex<double>& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  std::complex<double> operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double trace() const;
  // Leading k x k block.
  HermitianMatrix minor(int k) const;
};

struct JacobiOptions {
  double threshold = 1e-12;  // off-diagonal Frobenius norm relative to the full norm
  int max_sweeps = 30;
};

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, sorted
// decreasing. Throws NumericError if the sweep bound is hit first.
std::vector<double> jacobi_eigenvalues(RealMatrix m, const JacobiOptions& opt = {});

// Eigenvalues of a Hermitian matrix via the real symmetric doubling
// [[A, -B], [B, A]] for H = A + iB; every eigenvalue appears twice there and
// one copy of each is returned, sorted decreasing.
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& h, const JacobiOptions& opt = {});

}  // namespace nipoly
