#include "gk/forms.hpp"

#include <cmath>

namespace gk {

namespace {

// decode slot j of component index k for a rank-r field (first slot slowest)
int slot_of(std::size_t k, int j, int r, int d) {
  std::size_t div = 1;
  for (int t = j + 1; t < r; ++t) div *= static_cast<std::size_t>(d);
  return static_cast<int>((k / div) % static_cast<std::size_t>(d));
}

// component index with slot j replaced by c
std::size_t with_slot(std::size_t k, int j, int c, int r, int d) {
  std::size_t div = 1;
  for (int t = j + 1; t < r; ++t) div *= static_cast<std::size_t>(d);
  const int old = static_cast<int>((k / div) % static_cast<std::size_t>(d));
  return k + static_cast<std::size_t>(c - old) * div;
}

// copy one component into a standalone scalar field
TensorField scalar_comp(const TensorField& f, std::size_t c) {
  TensorField out(f.grid, Valence{});
  const double* src = f.comp(c);
  std::copy(src, src + f.npts(), out.comp(0));
  return out;
}

void axpy_plane(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void muladd_plane(const double* a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * x[i];
}

}  // namespace

TensorField ext_d(const TensorField& f) {
  require(f.val.is_form(), "ext_d", "input must be a differential form");
  const int k = f.val.p;
  require(k <= 2, "ext_d", "dense exterior derivative supports k <= 2");
  const int d = f.grid.dim();
  const std::size_t P = f.npts();

  std::vector<TensorField> df;
  df.reserve(d);
  for (int a = 0; a < d; ++a) df.push_back(partial(f, a));

  TensorField out(f.grid, form_valence(k + 1));
  const std::size_t nc = out.ncomp();
  for (std::size_t m = 0; m < nc; ++m) {
    double* dst = out.comp(m);
    // (df)_{a_0 ... a_k} = sum_i (-1)^i  d_{a_i} f_{a_0 ... ^a_i ... a_k}
    for (int i = 0; i <= k; ++i) {
      const int ai = slot_of(m, i, k + 1, d);
      // residual multi-index: drop slot i
      std::size_t rest = 0;
      for (int j = 0; j <= k; ++j) {
        if (j == i) continue;
        rest = rest * static_cast<std::size_t>(d) +
               static_cast<std::size_t>(slot_of(m, j, k + 1, d));
      }
      axpy_plane((i % 2 == 0) ? 1.0 : -1.0, df[ai].comp(rest), dst, P);
    }
  }
  return out;
}

double closedness_residual(const TensorField& H) {
  require(H.val.p == 3 && H.val.q == 0 && H.val.antisym, "closedness_residual",
          "input must be a 3-form");
  const int d = H.grid.dim();
  const std::size_t P = H.npts();
  require(d >= 4, "closedness_residual", "dH vanishes identically below dimension 4");

  double sum2 = 0.0;
  std::vector<double> plane(P);
  int idx[4];
  for (idx[0] = 0; idx[0] < d; ++idx[0])
    for (idx[1] = idx[0] + 1; idx[1] < d; ++idx[1])
      for (idx[2] = idx[1] + 1; idx[2] < d; ++idx[2])
        for (idx[3] = idx[2] + 1; idx[3] < d; ++idx[3]) {
          std::fill(plane.begin(), plane.end(), 0.0);
          // (dH)_{abce} = d_a H_{bce} - d_b H_{ace} + d_c H_{abe} - d_e H_{abc}
          for (int i = 0; i < 4; ++i) {
            int rest[3];
            int r = 0;
            for (int j = 0; j < 4; ++j)
              if (j != i) rest[r++] = idx[j];
            const std::size_t c = H.cindex({rest[0], rest[1], rest[2]});
            TensorField dcomp = partial(scalar_comp(H, c), idx[i]);
            axpy_plane((i % 2 == 0) ? 1.0 : -1.0, dcomp.comp(0), plane.data(), P);
          }
          double s = 0.0;
          for (std::size_t p = 0; p < P; ++p) s += plane[p] * plane[p];
          sum2 += 24.0 * s;  // each sorted component appears 4! times densely
        }
  return std::sqrt(sum2 / static_cast<double>(P));
}

TensorField pullback_slots(const TensorField& f, const TensorField& A) {
  require(f.val.q == 0, "pullback_slots", "input must be covariant");
  require(A.val.p == 1 && A.val.q == 1, "pullback_slots",
          "A must be an endomorphism field");
  require(f.grid == A.grid, "pullback_slots", "grid mismatch");
  const int d = f.grid.dim();
  const int r = f.val.p;
  const std::size_t P = f.npts();

  TensorField cur = f;
  for (int j = 0; j < r; ++j) {
    TensorField next(f.grid, f.val);
    for (std::size_t m = 0; m < next.ncomp(); ++m) {
      double* dst = next.comp(m);
      const int aj = slot_of(m, j, r, d);
      for (int c = 0; c < d; ++c) {
        // A^c_{a_j} plane times f_{... c ...} plane
        muladd_plane(A.comp(A.cindex({c, aj})), cur.comp(with_slot(m, j, c, r, d)),
                     dst, P);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

TensorField dc(const TensorField& f, const TensorField& I) {
  TensorField out = pullback_slots(ext_d(f), I);
  out *= -1.0;
  return out;
}

TensorField did(const TensorField& u, const TensorField& I) {
  require(u.val.rank() == 0, "did", "potential must be a scalar field");
  return ext_d(pullback_slots(ext_d(u), I));
}

TensorField interior(const TensorField& X, const TensorField& f) {
  require(X.val.q == 1 && X.val.p == 0, "interior", "X must be a vector field");
  require(f.val.q == 0 && f.val.rank() >= 1, "interior", "f must be covariant of rank >= 1");
  require(X.grid == f.grid, "interior", "grid mismatch");
  const int d = f.grid.dim();
  const int k = f.val.p;
  const std::size_t P = f.npts();

  TensorField out(f.grid, form_valence(k - 1));
  std::size_t rest_count = out.ncomp();
  for (std::size_t m = 0; m < rest_count; ++m) {
    double* dst = out.comp(m);
    for (int c = 0; c < d; ++c) {
      const std::size_t src = static_cast<std::size_t>(c) * rest_count + m;
      muladd_plane(X.comp(static_cast<std::size_t>(c)), f.comp(src), dst, P);
    }
  }
  return out;
}

TensorField sharp(const TensorField& alpha, const TensorField& g) {
  require(alpha.val.p == 1 && alpha.val.q == 0, "sharp", "alpha must be a 1-form");
  require(g.val.p == 2 && g.val.q == 0, "sharp", "g must be a metric field");
  require(alpha.grid == g.grid, "sharp", "grid mismatch");
  TensorField out(alpha.grid, vector_valence());
  for (std::size_t pt = 0; pt < alpha.npts(); ++pt) {
    const Mat gp = at_point(g, pt);
    const Vec a = vec_at_point(alpha, pt);
    const Vec x = gp.ldlt().solve(a);
    for (int c = 0; c < alpha.grid.dim(); ++c)
      out.comp(static_cast<std::size_t>(c))[pt] = x(c);
  }
  return out;
}

TensorField lie(const TensorField& X, const TensorField& T) {
  require(X.val.q == 1 && X.val.p == 0, "lie", "X must be a vector field");
  require(X.grid == T.grid, "lie", "grid mismatch");
  const int d = T.grid.dim();
  const int r = T.val.rank();
  const int q = T.val.q;
  const std::size_t P = T.npts();

  TensorField out(T.grid, T.val);

  // advection term X^c d_c T, one axis at a time
  for (int c = 0; c < d; ++c) {
    TensorField dT = partial(T, c);
    for (std::size_t m = 0; m < T.ncomp(); ++m)
      muladd_plane(X.comp(static_cast<std::size_t>(c)), dT.comp(m), out.comp(m), P);
  }

  // Jacobian planes DX(b, a) = d_a X^b
  TensorField DX(T.grid, endo_valence());
  for (int a = 0; a < d; ++a) {
    TensorField dXa = partial(X, a);
    for (int b = 0; b < d; ++b) {
      const double* src = dXa.comp(static_cast<std::size_t>(b));
      std::copy(src, src + P, DX.comp(DX.cindex({b, a})));
    }
  }

  // slot corrections: contravariant slots (first q) get -(d_c X^{b_j}) T^{..c..},
  // covariant slots get +(d_{a_i} X^c) T_{..c..}
  for (std::size_t m = 0; m < T.ncomp(); ++m) {
    double* dst = out.comp(m);
    for (int j = 0; j < r; ++j) {
      const int s = slot_of(m, j, r, d);
      for (int c = 0; c < d; ++c) {
        const std::size_t other = with_slot(m, j, c, r, d);
        if (j < q) {
          // upper slot: -(d_c X^s) T[.. c ..]
          const double* dx = DX.comp(DX.cindex({s, c}));
          const double* src = T.comp(other);
          for (std::size_t p = 0; p < P; ++p) dst[p] -= dx[p] * src[p];
        } else {
          // lower slot: +(d_s X^c) T[.. c ..]
          muladd_plane(DX.comp(DX.cindex({c, s})), T.comp(other), dst, P);
        }
      }
    }
  }
  return out;
}

}  // namespace gk
