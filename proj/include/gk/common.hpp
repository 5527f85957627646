#pragma once
// Shared scalar/matrix types and error handling for the generalized-Kaehler
// kernel.  Tangent fibers have dimension 2n <= kMaxDim and generalized fibers
// (T + T*) dimension 4n <= kMaxGen; the fixed Eigen capacity keeps all
// pointwise linear algebra on the stack inside grid loops.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace gk {

inline constexpr int kMaxDim = 8;   // tangent fiber dimension 2n
inline constexpr int kMaxGen = 16;  // generalized fiber dimension 4n

using Mat  = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGen, kMaxGen>;
using Vec  = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxGen, 1>;
using CMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGen, kMaxGen>;
using CVec = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1, 0, kMaxGen, 1>;

using cplx = std::complex<double>;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw Error(where + ": " + what);
}

inline void require(bool cond, const char* where, const char* what) {
  if (!cond) fail(where, what);
}

// Structural tolerance: absolute plus relative part, applied as abs + rel*scale.
struct Tol {
  double abs = 1e-10;
  double rel = 1e-10;
  double of(double scale) const { return abs + rel * scale; }
};

// "Positive definite" throughout the kernel: smallest eigenvalue exceeds
// 1e-10 times the largest.
inline bool positive_definite(const Mat& S, double cut = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
  const auto& ev = es.eigenvalues();
  return ev(0) > cut * std::abs(ev(ev.size() - 1));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace gk
