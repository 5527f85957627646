#include "gk/grid.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace gk {

// ---------------------------------------------------------------------------
// arithmetic

TensorField& TensorField::operator+=(const TensorField& o) {
  require(grid == o.grid && data.size() == o.data.size(), "TensorField",
          "field shapes disagree");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
  return *this;
}
TensorField& TensorField::operator-=(const TensorField& o) {
  require(grid == o.grid && data.size() == o.data.size(), "TensorField",
          "field shapes disagree");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
  return *this;
}
TensorField& TensorField::operator*=(double s) {
  for (double& v : data) v *= s;
  return *this;
}
TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
TensorField operator*(double s, TensorField a) { return a *= s; }

double TensorField::max_abs() const {
  double m = 0.0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

double TensorField::frobenius() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s / static_cast<double>(npts()));
}

// ---------------------------------------------------------------------------
// sampling

Vec point_of(const Grid& g, std::size_t pt) {
  Vec x(g.dim());
  for (int a = 0; a < g.dim(); ++a) x(a) = g.coord(pt, a);
  return x;
}

TensorField scalar_field(const Grid& g, const std::function<double(const Vec&)>& f) {
  TensorField out(g, Valence{0, 0, false});
  for (std::size_t pt = 0; pt < g.npts(); ++pt) out.data[pt] = f(point_of(g, pt));
  return out;
}

TensorField sample_field(
    const Grid& g, const Valence& v,
    const std::function<double(const Vec&, const std::vector<int>&)>& fn) {
  TensorField out(g, v);
  const int d = g.dim(), r = v.rank();
  std::vector<int> idx(r, 0);
  for (std::size_t c = 0; c < out.ncomp(); ++c) {
    std::size_t rem = c;
    for (int s = r - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(rem % d);
      rem /= d;
    }
    double* plane = out.comp(c);
    for (std::size_t pt = 0; pt < g.npts(); ++pt)
      plane[pt] = fn(point_of(g, pt), idx);
  }
  return out;
}

TensorField constant_field(const Grid& g, const Valence& v, const Mat& value) {
  require(v.rank() == 2, "constant_field", "rank-2 values only");
  TensorField out(g, v);
  const int d = g.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double* plane = out.comp(static_cast<std::size_t>(i) * d + j);
      std::fill(plane, plane + g.npts(), value(i, j));
    }
  return out;
}

// ---------------------------------------------------------------------------
// spectral engine: cached in-place complex transforms along single axes

namespace {

class SpectralEngine {
 public:
  SpectralEngine(int dim, int N) : dim_(dim), N_(N) {
    P_ = 1;
    for (int i = 0; i < dim; ++i) P_ *= static_cast<std::size_t>(N);
    buf_.resize(P_);
    fwd_.resize(dim);
    bwd_.resize(dim);
    for (int axis = 0; axis < dim; ++axis) {
      fftw_iodim64 t{N_, static_cast<ptrdiff_t>(stride(axis)),
                     static_cast<ptrdiff_t>(stride(axis))};
      std::vector<fftw_iodim64> h;
      for (int a = 0; a < dim; ++a)
        if (a != axis)
          h.push_back({N_, static_cast<ptrdiff_t>(stride(a)),
                       static_cast<ptrdiff_t>(stride(a))});
      auto* b = reinterpret_cast<fftw_complex*>(buf_.data());
      fwd_[axis] = fftw_plan_guru64_dft(1, &t, static_cast<int>(h.size()),
                                        h.data(), b, b, FFTW_FORWARD,
                                        FFTW_ESTIMATE);
      bwd_[axis] = fftw_plan_guru64_dft(1, &t, static_cast<int>(h.size()),
                                        h.data(), b, b, FFTW_BACKWARD,
                                        FFTW_ESTIMATE);
      require(fwd_[axis] && bwd_[axis], "SpectralEngine", "FFTW plan failed");
    }
  }
  ~SpectralEngine() {
    for (auto p : fwd_) fftw_destroy_plan(p);
    for (auto p : bwd_) fftw_destroy_plan(p);
  }
  SpectralEngine(const SpectralEngine&) = delete;

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int i = axis + 1; i < dim_; ++i) s *= static_cast<std::size_t>(N_);
    return s;
  }

  // out = d/dx_axis in, spectrally (Nyquist mode annihilated)
  void derivative(const double* in, double* out, int axis) {
    for (std::size_t i = 0; i < P_; ++i) buf_[i] = in[i];
    fftw_execute(fwd_[axis]);
    const std::size_t s = stride(axis);
    const double inv = 1.0 / static_cast<double>(N_);
    for (std::size_t i = 0; i < P_; ++i) {
      const long m = static_cast<long>((i / s) % static_cast<std::size_t>(N_));
      long k = (m <= N_ / 2) ? m : m - N_;
      if (m == N_ / 2) k = 0;
      buf_[i] *= cplx(0.0, static_cast<double>(k) * inv);
    }
    fftw_execute(bwd_[axis]);
    for (std::size_t i = 0; i < P_; ++i) out[i] = buf_[i].real();
  }

  // zero modes with |k| > N/3 on every axis
  void lowpass(double* inout) {
    for (std::size_t i = 0; i < P_; ++i) buf_[i] = inout[i];
    for (int axis = 0; axis < dim_; ++axis) fftw_execute(fwd_[axis]);
    const long cut = N_ / 3;
    const double inv = 1.0 / static_cast<double>(P_);
    for (std::size_t i = 0; i < P_; ++i) {
      bool keep = true;
      for (int axis = 0; axis < dim_ && keep; ++axis) {
        const long m =
            static_cast<long>((i / stride(axis)) % static_cast<std::size_t>(N_));
        const long k = (m <= N_ / 2) ? m : m - N_;
        if (std::abs(k) > cut) keep = false;
      }
      buf_[i] = keep ? buf_[i] * inv : cplx(0.0, 0.0);
    }
    for (int axis = 0; axis < dim_; ++axis) fftw_execute(bwd_[axis]);
    for (std::size_t i = 0; i < P_; ++i) inout[i] = buf_[i].real();
  }

  double roundtrip_imag(const double* in) {
    for (std::size_t i = 0; i < P_; ++i) buf_[i] = in[i];
    for (int axis = 0; axis < dim_; ++axis) fftw_execute(fwd_[axis]);
    for (int axis = 0; axis < dim_; ++axis) fftw_execute(bwd_[axis]);
    const double inv = 1.0 / static_cast<double>(P_);
    double m = 0.0;
    for (std::size_t i = 0; i < P_; ++i)
      m = std::max(m, std::abs(buf_[i].imag()) * inv);
    return m;
  }

 private:
  int dim_, N_;
  std::size_t P_;
  std::vector<cplx> buf_;
  std::vector<fftw_plan> fwd_, bwd_;
};

std::mutex engine_mutex;

SpectralEngine& engine_for(const Grid& g) {
  static std::map<std::pair<int, int>, std::unique_ptr<SpectralEngine>> cache;
  auto key = std::make_pair(g.dim(), g.N);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<SpectralEngine>(g.dim(), g.N)).first;
  return *it->second;
}

}  // namespace

TensorField partial(const TensorField& f, int axis) {
  require(axis >= 0 && axis < f.grid.dim(), "partial", "axis out of range");
  TensorField out(f.grid, f.val);
  std::lock_guard<std::mutex> lock(engine_mutex);
  SpectralEngine& eng = engine_for(f.grid);
  for (std::size_t c = 0; c < f.ncomp(); ++c)
    eng.derivative(f.comp(c), out.comp(c), axis);
  return out;
}

TensorField lowpass_two_thirds(const TensorField& f) {
  TensorField out = f;
  std::lock_guard<std::mutex> lock(engine_mutex);
  SpectralEngine& eng = engine_for(f.grid);
  for (std::size_t c = 0; c < out.ncomp(); ++c) eng.lowpass(out.comp(c));
  return out;
}

double spectral_roundtrip_residue(const TensorField& f) {
  std::lock_guard<std::mutex> lock(engine_mutex);
  SpectralEngine& eng = engine_for(f.grid);
  double m = 0.0;
  for (std::size_t c = 0; c < f.ncomp(); ++c)
    m = std::max(m, eng.roundtrip_imag(f.comp(c)));
  return m;
}

// ---------------------------------------------------------------------------
// pointwise views

Mat at_point(const TensorField& f, std::size_t pt) {
  require(f.val.rank() == 2, "at_point", "rank-2 field expected");
  const int d = f.grid.dim();
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      m(i, j) = f.comp(static_cast<std::size_t>(i) * d + j)[pt];
  return m;
}

void set_point(TensorField& f, std::size_t pt, const Mat& m) {
  require(f.val.rank() == 2, "set_point", "rank-2 field expected");
  const int d = f.grid.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      f.comp(static_cast<std::size_t>(i) * d + j)[pt] = m(i, j);
}

Vec vec_at_point(const TensorField& f, std::size_t pt) {
  require(f.val.rank() == 1, "vec_at_point", "rank-1 field expected");
  const int d = f.grid.dim();
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = f.comp(i)[pt];
  return v;
}

// ---------------------------------------------------------------------------
// metric L2 inner product of k-forms

double l2_inner(const TensorField& a, const TensorField& b, const TensorField& g) {
  require(a.grid == b.grid && a.grid == g.grid, "l2_inner", "grids disagree");
  require(a.val.p == b.val.p && a.val.q == 0 && b.val.q == 0, "l2_inner",
          "k-forms of equal degree expected");
  const int d = a.grid.dim(), k = a.val.p;
  const std::size_t nc = a.ncomp();
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;

  double total = 0.0;
  std::vector<int> ia(k), ib(k);
  for (std::size_t pt = 0; pt < a.grid.npts(); ++pt) {
    const Mat gp = at_point(g, pt);
    const Mat gi = gp.inverse();
    const double vol = std::sqrt(gp.determinant());
    double acc = 0.0;
    for (std::size_t ca = 0; ca < nc; ++ca) {
      std::size_t rem = ca;
      for (int s = k - 1; s >= 0; --s) {
        ia[s] = static_cast<int>(rem % d);
        rem /= d;
      }
      const double va = a.comp(ca)[pt];
      if (va == 0.0) continue;
      for (std::size_t cb = 0; cb < nc; ++cb) {
        rem = cb;
        for (int s = k - 1; s >= 0; --s) {
          ib[s] = static_cast<int>(rem % d);
          rem /= d;
        }
        double w = va * b.comp(cb)[pt];
        for (int s = 0; s < k && w != 0.0; ++s) w *= gi(ia[s], ib[s]);
        acc += w;
      }
    }
    total += acc / kfact * vol;
  }
  double cell = 1.0;
  for (int i = 0; i < d; ++i) cell *= 2.0 * M_PI / a.grid.N;
  return total * cell;
}

}  // namespace gk
