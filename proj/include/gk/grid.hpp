#pragma once
// Flat periodic grids on T^{2n} = R^{2n}/(2pi Z)^{2n} and dense tensor fields
// over them, with pseudospectral (discrete Fourier) differentiation.
//
// Storage is component-major: for each component c (a flattened multi-index
// over slots, each slot running over 0..2n-1) the N^{2n} grid values are laid
// out contiguously, row-major in the axes with the last axis fastest.

#include "gk/common.hpp"

#include <functional>
#include <vector>

namespace gk {

struct Grid {
  int n = 0;  // half-dimension: the torus is T^{2n}
  int N = 0;  // points per axis, even, >= 8

  Grid() = default;
  Grid(int n_, int N_) : n(n_), N(N_) {
    require(n >= 1 && 2 * n <= kMaxDim, "Grid", "half-dimension out of range");
    require(N >= 8 && N % 2 == 0, "Grid", "points per axis must be even and >= 8");
  }

  int dim() const { return 2 * n; }
  std::size_t npts() const {
    std::size_t p = 1;
    for (int i = 0; i < dim(); ++i) p *= static_cast<std::size_t>(N);
    return p;
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int i = axis + 1; i < dim(); ++i) s *= static_cast<std::size_t>(N);
    return s;
  }
  double coord(std::size_t pt, int axis) const {
    const std::size_t idx = (pt / stride(axis)) % static_cast<std::size_t>(N);
    return 2.0 * M_PI * static_cast<double>(idx) / static_cast<double>(N);
  }
  bool operator==(const Grid& o) const { return n == o.n && N == o.N; }
};

// Valence of a tensor field: p covariant slots, q contravariant slots; the
// antisym flag marks fully antisymmetric covariant fields (k-forms, q = 0).
// Slot storage order: the q contravariant slots come first, then the p
// covariant ones.  Rank-2 component matrices read at a point therefore act as
// maps directly: an endomorphism field I (q=1, p=1) stores I^a_b at (row a,
// col b), a 2-form K (p=2) stores the array K(e_a, e_b) at (row a, col b).
struct Valence {
  int p = 0;
  int q = 0;
  bool antisym = false;

  int rank() const { return p + q; }
  bool is_form() const { return q == 0 && (antisym || p <= 1); }
};

struct TensorField {
  Grid grid;
  Valence val;
  std::vector<double> data;  // ncomp() blocks of npts() values

  TensorField() = default;
  TensorField(const Grid& g, const Valence& v)
      : grid(g), val(v), data(ncomp_of(g, v) * g.npts(), 0.0) {}

  static std::size_t ncomp_of(const Grid& g, const Valence& v) {
    std::size_t c = 1;
    for (int i = 0; i < v.rank(); ++i) c *= static_cast<std::size_t>(g.dim());
    return c;
  }
  std::size_t ncomp() const { return ncomp_of(grid, val); }
  std::size_t npts() const { return grid.npts(); }

  double* comp(std::size_t c) { return data.data() + c * npts(); }
  const double* comp(std::size_t c) const { return data.data() + c * npts(); }

  // flatten a slot multi-index (each entry in 0..dim-1), first slot slowest
  std::size_t cindex(std::initializer_list<int> idx) const {
    std::size_t c = 0;
    for (int a : idx) c = c * static_cast<std::size_t>(grid.dim()) +
                          static_cast<std::size_t>(a);
    return c;
  }

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);

  double max_abs() const;
  double frobenius() const;  // sqrt of the grid-mean of the squared entries
};

TensorField operator+(TensorField a, const TensorField& b);
TensorField operator-(TensorField a, const TensorField& b);
TensorField operator*(double s, TensorField a);

// Sample a scalar field u(x) on the grid.
TensorField scalar_field(const Grid& g, const std::function<double(const Vec&)>& f);

// Sample a general field: fn(x, slot multi-index) -> component value.
TensorField sample_field(const Grid& g, const Valence& v,
                         const std::function<double(const Vec&, const std::vector<int>&)>& fn);

// Constant field with the given pointwise component matrix (rank <= 2).
TensorField constant_field(const Grid& g, const Valence& v, const Mat& value);

Vec point_of(const Grid& g, std::size_t pt);

// Spectral partial derivative along one axis, component by component.
TensorField partial(const TensorField& f, int axis);

// Zero all Fourier modes with |k| > N/3 on any axis (2/3-rule low pass used
// to keep pointwise products alias-free in convergence studies).
TensorField lowpass_two_thirds(const TensorField& f);

// Imaginary residue of a forward/backward transform round trip; reality check.
double spectral_roundtrip_residue(const TensorField& f);

// Pointwise views --------------------------------------------------------

// Read the rank-2 component matrix at a grid point (row = first slot).
Mat at_point(const TensorField& f, std::size_t pt);
// Write a rank-2 component matrix at a grid point.
void set_point(TensorField& f, std::size_t pt, const Mat& m);
// Read a rank-1 field (vector or covector) at a point.
Vec vec_at_point(const TensorField& f, std::size_t pt);

// L2 inner product of two k-forms with metric g (rank-2 positive field):
// (1/k!) a_{...} b_{...} g^{..} ... g^{..} sqrt(det g), averaged over the grid
// with the uniform (spectrally exact) quadrature weight (2pi/N)^{2n}.
double l2_inner(const TensorField& a, const TensorField& b, const TensorField& g);

}  // namespace gk
