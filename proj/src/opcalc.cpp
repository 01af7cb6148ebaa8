#include "mourrekit/opcalc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mourrekit/errors.hpp"
#include "mourrekit/fft.hpp"
#include "mourrekit/simd/kernels.hpp"

namespace mk {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace

// ---------------------------------------------------------------- window

FreqWindow::FreqWindow(int d, int M, int margin) : d_(d), M_(M), margin_(margin) {
  require(d >= 1, "window: dimension must be positive");
  require(M >= 1, "window: M must be positive");
  require(margin >= 0 && margin < M, "window: need 0 <= margin < M");
  size_ = 1;
  for (int i = 0; i < d; ++i) {
    size_ *= static_cast<std::size_t>(2 * M + 1);
    require(size_ <= (std::size_t{1} << 24), "window: too many frequencies");
  }
}

bool FreqWindow::contains(const Freq& k) const {
  if (static_cast<int>(k.size()) != d_) return false;
  return std::all_of(k.begin(), k.end(), [&](int v) { return std::abs(v) <= M_; });
}

std::size_t FreqWindow::index(const Freq& k) const {
  std::size_t idx = 0;
  for (int v : k) idx = idx * static_cast<std::size_t>(2 * M_ + 1) + static_cast<std::size_t>(v + M_);
  return idx;
}

Freq FreqWindow::freq(std::size_t idx) const {
  Freq k(static_cast<std::size_t>(d_));
  for (int a = d_ - 1; a >= 0; --a) {
    k[static_cast<std::size_t>(a)] = static_cast<int>(idx % static_cast<std::size_t>(2 * M_ + 1)) - M_;
    idx /= static_cast<std::size_t>(2 * M_ + 1);
  }
  return k;
}

int FreqWindow::linf(std::size_t idx) const {
  int m = 0;
  for (int a = 0; a < d_; ++a) {
    m = std::max(m, std::abs(static_cast<int>(idx % static_cast<std::size_t>(2 * M_ + 1)) - M_));
    idx /= static_cast<std::size_t>(2 * M_ + 1);
  }
  return m;
}

// ---------------------------------------------------------------- vectors

StateVector::StateVector(const FreqWindow& w, std::vector<cplx> c) : w_(w), c_(std::move(c)) {
  require(c_.size() == w_.size(), "state vector: size does not match window");
  track();
}

void StateVector::track() {
  support_ = -1;
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != cplx{}) support_ = std::max(support_, w_.linf(i));
}

StateVector StateVector::zero(const FreqWindow& w) { return StateVector(w, std::vector<cplx>(w.size())); }

StateVector StateVector::basis(const FreqWindow& w, const Freq& k) {
  require(w.contains(k), "basis vector outside window");
  std::vector<cplx> c(w.size());
  c[w.index(k)] = 1.0;
  return StateVector(w, std::move(c));
}

StateVector StateVector::random_unit(const FreqWindow& w, int support, std::mt19937_64& rng) {
  require(support >= 0 && support <= w.half_width(), "random vector: support outside window");
  std::normal_distribution<double> nd;
  std::vector<cplx> c(w.size());
  double n2 = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (w.linf(i) > support) continue;
    c[i] = cplx(nd(rng), nd(rng));
    n2 += std::norm(c[i]);
  }
  const double s = 1.0 / std::sqrt(n2);
  for (auto& v : c) v *= s;
  return StateVector(w, std::move(c));
}

double StateVector::norm() const {
  std::vector<double> sq(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) sq[i] = std::norm(c_[i]);
  return std::sqrt(simd::sum(sq));
}

StateVector& StateVector::operator+=(const StateVector& o) {
  require(o.w_ == w_, "state vector: window mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  track();
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& o) {
  require(o.w_ == w_, "state vector: window mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  track();
  return *this;
}

StateVector& StateVector::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  track();
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }

cplx inner(const StateVector& a, const StateVector& b) {
  require(a.window() == b.window(), "inner: window mismatch");
  return simd::cdotc(a.coeffs(), b.coeffs());
}

// ---------------------------------------------------------------- matrices

OperatorMatrix::OperatorMatrix(const FreqWindow& w) : w_(w), row_ptr_(w.size() + 1, 0) {}

OperatorMatrix OperatorMatrix::from_rows(const FreqWindow& w, std::vector<std::vector<Entry>> rows) {
  require(rows.size() == w.size(), "operator: row count does not match window");
  OperatorMatrix m(w);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    std::size_t p = 0;
    while (p < r.size()) {
      std::size_t q = p;
      cplx s = r[p].val;
      while (++q < r.size() && r[q].col == r[p].col) s += r[q].val;
      require(r[p].col < w.size(), "operator: column outside window");
      if (s != cplx{}) {
        m.cols_.push_back(r[p].col);
        m.vals_.push_back(s);
      }
      p = q;
    }
    m.row_ptr_[i + 1] = m.vals_.size();
  }
  m.compute_band();
  return m;
}

OperatorMatrix OperatorMatrix::identity(const FreqWindow& w) {
  return diagonal(w, std::vector<cplx>(w.size(), 1.0));
}

OperatorMatrix OperatorMatrix::diagonal(const FreqWindow& w, const std::vector<cplx>& d) {
  require(d.size() == w.size(), "diagonal: size does not match window");
  std::vector<std::vector<Entry>> rows(w.size());
  for (std::size_t i = 0; i < d.size(); ++i) rows[i].push_back({static_cast<std::uint32_t>(i), d[i]});
  return from_rows(w, std::move(rows));
}

void OperatorMatrix::compute_band() {
  band_ = 0;
  const int d = w_.dim();
  const std::size_t side = static_cast<std::size_t>(2 * w_.half_width() + 1);
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      std::size_t a = i, b = cols_[p];
      for (int ax = 0; ax < d; ++ax) {
        band_ = std::max(band_, std::abs(static_cast<int>(a % side) - static_cast<int>(b % side)));
        a /= side;
        b /= side;
      }
    }
  }
}

cplx OperatorMatrix::entry(std::size_t i, std::size_t j) const {
  auto b = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  auto e = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(j));
  if (it == e || *it != j) return {};
  return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require(a.window() == b.window(), "operator product: window mismatch");
  const std::size_t n = a.rows();
  std::vector<cplx> acc(n);
  std::vector<char> mark(n, 0);
  std::vector<std::uint32_t> touched;
  std::vector<std::vector<OperatorMatrix::Entry>> rows(n);
  const auto &ap = a.row_ptr(), &bp = b.row_ptr();
  const auto &ac = a.cols(), &bc = b.cols();
  const auto &av = a.vals(), &bv = b.vals();
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (std::size_t p = ap[i]; p < ap[i + 1]; ++p) {
      const std::size_t k = ac[p];
      for (std::size_t q = bp[k]; q < bp[k + 1]; ++q) {
        const std::uint32_t j = bc[q];
        if (!mark[j]) {
          mark[j] = 1;
          touched.push_back(j);
          acc[j] = 0.0;
        }
        acc[j] += av[p] * bv[q];
      }
    }
    std::sort(touched.begin(), touched.end());
    rows[i].reserve(touched.size());
    for (std::uint32_t j : touched) {
      rows[i].push_back({j, acc[j]});
      mark[j] = 0;
    }
  }
  OperatorMatrix r = OperatorMatrix::from_rows(a.window(), std::move(rows));
  r.residual_bound = a.residual_bound + b.residual_bound + a.residual_bound * b.residual_bound;
  return r;
}

namespace {

OperatorMatrix combine(const OperatorMatrix& a, const OperatorMatrix& b, double sb) {
  require(a.window() == b.window(), "operator sum: window mismatch");
  std::vector<std::vector<OperatorMatrix::Entry>> rows(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) rows[i].push_back({a.cols()[p], a.vals()[p]});
    for (std::size_t p = b.row_ptr()[i]; p < b.row_ptr()[i + 1]; ++p)
      rows[i].push_back({b.cols()[p], sb * b.vals()[p]});
  }
  OperatorMatrix r = OperatorMatrix::from_rows(a.window(), std::move(rows));
  r.residual_bound = a.residual_bound + b.residual_bound;
  return r;
}

}  // namespace

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) { return combine(a, b, 1.0); }
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) { return combine(a, b, -1.0); }

OperatorMatrix operator*(cplx s, const OperatorMatrix& a) {
  std::vector<std::vector<OperatorMatrix::Entry>> rows(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) rows[i].push_back({a.cols()[p], s * a.vals()[p]});
  OperatorMatrix r = OperatorMatrix::from_rows(a.window(), std::move(rows));
  r.residual_bound = std::abs(s) * a.residual_bound;
  return r;
}

OperatorMatrix adjoint(const OperatorMatrix& a) {
  std::vector<std::vector<OperatorMatrix::Entry>> rows(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      rows[a.cols()[p]].push_back({static_cast<std::uint32_t>(i), std::conj(a.vals()[p])});
  OperatorMatrix r = OperatorMatrix::from_rows(a.window(), std::move(rows));
  r.residual_bound = a.residual_bound;
  return r;
}

// ---------------------------------------------------------------- assembly

OperatorMatrix translation_koopman(const FrequencyVector& y, const FreqWindow& w) {
  require(y.dim() == w.dim(), "translation_koopman: dimension mismatch");
  std::vector<cplx> d(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Freq k = w.freq(i);
    double t = 0.0;
    for (std::size_t a = 0; a < k.size(); ++a) t += k[a] * y[static_cast<int>(a)];
    t -= std::nearbyint(t);
    d[i] = cplx(std::cos(two_pi * t), std::sin(two_pi * t));
  }
  OperatorMatrix m = OperatorMatrix::diagonal(w, d);
  m.factorization = Factorization{TrigPoly::constant(w.dim(), 1.0), d};
  return m;
}

OperatorMatrix multiplication_matrix(const TrigPoly& p, const FreqWindow& w) {
  require(p.dim() == w.dim(), "multiplication_matrix: dimension mismatch");
  if (p.degree() > w.half_width())
    throw InvalidArgument("multiplication_matrix: degree " + std::to_string(p.degree()) + " exceeds window M=" +
                          std::to_string(w.half_width()));
  std::vector<std::vector<OperatorMatrix::Entry>> rows(w.size());
  Freq col(static_cast<std::size_t>(w.dim()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Freq k = w.freq(i);
    for (const auto& [delta, c] : p.coeffs()) {
      for (std::size_t a = 0; a < k.size(); ++a) col[a] = k[a] - delta[a];
      if (w.contains(col)) rows[i].push_back({static_cast<std::uint32_t>(w.index(col)), c});
    }
  }
  OperatorMatrix m = OperatorMatrix::from_rows(w, std::move(rows));
  m.factorization = Factorization{p, std::vector<cplx>(w.size(), 1.0)};
  return m;
}

namespace {

OperatorMatrix mult_then(const TrigPoly& q, const OperatorMatrix& base, const FreqWindow& w, double rq) {
  if (q.degree() > w.half_width())
    throw InvalidArgument("assemble_koopman: window too small, need M >= " + std::to_string(q.degree()) +
                          " (truncated phase degree plus shift) and M - margin for test vectors");
  OperatorMatrix u = multiplication_matrix(q, w) * base;
  u.residual_bound = rq + base.residual_bound + rq * base.residual_bound;
  if (base.is_diagonal() && base.factorization) {
    u.factorization = Factorization{q, base.factorization->diag};
  } else {
    u.factorization.reset();
  }
  return u;
}

}  // namespace

OperatorMatrix assemble_koopman(const SkewProductSpec& spec, const FreqWindow& w, double tol) {
  SkewProductSpec s = spec;
  s.allow_degenerate = true;
  s.validate();
  require(w.dim() == s.d, "assemble_koopman: window dimension must equal d");
  const Truncated ph = unit_phase(s.cocycle_phase(), tol);
  const TrigPoly q = product(TrigPoly::exponential(s.shift()), ph.poly);
  return mult_then(q, translation_koopman(s.y, w), w, ph.residual_bound);
}

void FurstenbergLevel::validate() const {
  spec.validate();
  require(j >= 2 && j <= spec.d, "furstenberg level: need 2 <= j <= d");
  require(k != 0, "furstenberg level: k must be nonzero");
}

OperatorMatrix furstenberg_base_koopman(const FurstenbergSpec& spec, int dim, const FreqWindow& w, double tol) {
  require(w.dim() == dim, "furstenberg base: window dimension mismatch");
  if (dim == 1) return translation_koopman(FrequencyVector({spec.y}), w);
  require(dim == 2, "furstenberg base: windows beyond dimension 2 are not supported");
  // W e_k = e^{2 pi i k1 y} e_{k'} exp(2 pi i k2 h1(x1)), k' = (k1 + b21 k2, k2).
  const int M = w.half_width();
  const int b21 = spec.coeff(2, 1);
  std::vector<std::vector<OperatorMatrix::Entry>> rows(w.size());
  double resid = 0.0;
  for (int k2 = -M; k2 <= M; ++k2) {
    const Truncated ph = unit_phase(spec.h_of(1) * double(k2), tol);
    resid = std::max(resid, ph.residual_bound);
    for (int k1 = -M; k1 <= M; ++k1) {
      double t = k1 * spec.y;
      t -= std::nearbyint(t);
      const cplx rot(std::cos(two_pi * t), std::sin(two_pi * t));
      const std::uint32_t col = static_cast<std::uint32_t>(w.index({k1, k2}));
      for (const auto& [delta, c] : ph.poly.coeffs()) {
        const Freq target{k1 + b21 * k2 + delta[0], k2};
        if (w.contains(target)) rows[w.index(target)].push_back({col, rot * c});
      }
    }
  }
  OperatorMatrix m = OperatorMatrix::from_rows(w, std::move(rows));
  m.residual_bound = resid;
  return m;
}

OperatorMatrix assemble_koopman(const FurstenbergLevel& level, const FreqWindow& w, double tol) {
  level.validate();
  const int D = level.base_dim();
  require(w.dim() == D, "assemble_koopman: window dimension must equal j-1");
  const Truncated ph = unit_phase(level.spec.h_of(D) * double(level.k), tol);
  Freq s(static_cast<std::size_t>(D));
  for (int l = 1; l <= D; ++l) s[static_cast<std::size_t>(l - 1)] = level.k * level.spec.coeff(level.j, l);
  const TrigPoly q = product(TrigPoly::exponential(s), ph.poly);
  return mult_then(q, furstenberg_base_koopman(level.spec, D, w, tol), w, ph.residual_bound);
}

OperatorMatrix conjugate_diagonal(const SkewProductSpec& spec, const FreqWindow& w) {
  SkewProductSpec s = spec;
  s.allow_degenerate = true;
  s.validate();
  if (s.degenerate())
    throw DegenerateSpec("conjugate_diagonal: N^T m = 0, the character is excluded by the hypothesis N^T m != 0");
  require(w.dim() == s.d, "conjugate_diagonal: dimension mismatch");
  const double c = s.char_speed();
  std::vector<cplx> d(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Freq k = w.freq(i);
    double ky = 0.0;
    for (std::size_t a = 0; a < k.size(); ++a) ky += k[a] * s.y[static_cast<int>(a)];
    d[i] = two_pi * two_pi * c * ky;
  }
  OperatorMatrix m = OperatorMatrix::diagonal(w, d);
  m.factorization = Factorization{TrigPoly::constant(w.dim(), 1.0), d};
  return m;
}

OperatorMatrix conjugate_diagonal(const FurstenbergLevel& level, const FreqWindow& w) {
  level.validate();
  require(w.dim() == level.base_dim(), "conjugate_diagonal: dimension mismatch");
  const double kb = double(level.k) * level.spec.coeff(level.j, level.j - 1);
  std::vector<cplx> d(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) d[i] = double(w.freq(i).back()) / kb;
  OperatorMatrix m = OperatorMatrix::diagonal(w, d);
  m.factorization = Factorization{TrigPoly::constant(w.dim(), 1.0), d};
  return m;
}

OperatorMatrix average_conjugate(const OperatorMatrix& A, const OperatorMatrix& U, int n) {
  require(n >= 1, "average_conjugate: n must be at least 1");
  require(A.window() == U.window(), "average_conjugate: window mismatch");
  if (n == 1) return A;
  const long need = static_cast<long>(n) * U.band();
  if (A.window().margin() < need)
    throw InvalidArgument("average_conjugate: support overflow, required margin n*band(U) = " + std::to_string(need) +
                          " but window margin is " + std::to_string(A.window().margin()));
  const OperatorMatrix Us = adjoint(U);
  OperatorMatrix T = A;
  OperatorMatrix sum = A;
  for (int l = 1; l < n; ++l) {
    T = Us * (T * U);
    sum = sum + T;
  }
  OperatorMatrix r = (1.0 / n) * sum;
  r.residual_bound = n * U.residual_bound;
  return r;
}

OperatorMatrix commutator(const OperatorMatrix& P, const OperatorMatrix& Q) { return P * Q - Q * P; }

// ---------------------------------------------------------------- application

namespace {

StateVector apply_fast(const OperatorMatrix& op, const StateVector& v) {
  const FreqWindow& w = op.window();
  const Factorization& f = *op.factorization;
  const int d = w.dim(), M = w.half_width();
  int R = 2;
  while (R < 2 * M + f.mult.degree() + 1) R *= 2;
  const TorusGrid grid(d, R);
  std::vector<cplx> data(grid.size());
  auto bin = [&](const Freq& k) {
    std::size_t idx = 0;
    for (int c : k) idx = idx * static_cast<std::size_t>(R) + static_cast<std::size_t>((c % R + R) % R);
    return idx;
  };
  for (std::size_t i = 0; i < w.size(); ++i)
    if (v[i] != cplx{}) data[bin(w.freq(i))] = f.diag[i] * v[i];
  const auto dims = grid.dims();
  fft::transform(data, dims, +1);
  const GridFunction q = sample(f.mult, grid);
  simd::cmul(data, q.samples, data);
  fft::transform(data, dims, -1);
  const double scale = 1.0 / static_cast<double>(grid.size());
  std::vector<cplx> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = data[bin(w.freq(i))] * scale;
  return StateVector(w, std::move(out));
}

}  // namespace

StateVector apply(const OperatorMatrix& op, const StateVector& v, bool fast) {
  require(op.window() == v.window(), "apply: window mismatch");
  if (fast && op.factorization) return apply_fast(op, v);
  const auto& rp = op.row_ptr();
  const auto& cols = op.cols();
  const auto& vals = op.vals();
  const auto& x = v.coeffs();
  std::vector<cplx> out(op.rows());
  std::vector<cplx> gather;
  for (std::size_t i = 0; i < op.rows(); ++i) {
    const std::size_t b = rp[i], e = rp[i + 1];
    if (b == e) continue;
    const std::size_t len = e - b;
    std::span<const cplx> a(vals.data() + b, len);
    if (cols[e - 1] - cols[b] + 1 == len) {
      out[i] = simd::cdotu(a, std::span<const cplx>(x.data() + cols[b], len));
    } else {
      gather.resize(len);
      for (std::size_t p = 0; p < len; ++p) gather[p] = x[cols[b + p]];
      out[i] = simd::cdotu(a, gather);
    }
  }
  return StateVector(v.window(), std::move(out));
}

NormEstimate norm_estimate(const OperatorMatrix& a, std::uint64_t seed) {
  NormEstimate r;
  std::vector<double> sq(a.vals().size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(a.vals()[i]);
  r.frobenius = std::sqrt(simd::sum(sq));
  if (a.nonzeros() == 0) return r;
  std::mt19937_64 rng(seed);
  StateVector v = StateVector::random_unit(a.window(), a.window().half_width(), rng);
  const OperatorMatrix as = adjoint(a);
  double lambda = 0.0;
  for (int it = 0; it < 30; ++it) {
    StateVector wv = apply(as, apply(a, v));
    lambda = wv.norm();
    if (lambda == 0.0) break;
    wv *= 1.0 / lambda;
    v = wv;
  }
  r.op_norm = std::sqrt(lambda);
  return r;
}

std::string to_text(const OperatorMatrix& a) {
  std::ostringstream os;
  const FreqWindow& w = a.window();
  os << "operator\n";
  os << "window " << w.dim() << ' ' << w.half_width() << ' ' << w.margin() << "\n";
  os << "band " << a.band() << "\n";
  os << "residual_bound " << fmt(a.residual_bound) << "\n";
  os << "nonzeros " << a.nonzeros() << "\n";
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      os << i << ' ' << a.cols()[p] << ' ' << fmt(a.vals()[p].real()) << ' ' << fmt(a.vals()[p].imag()) << "\n";
  return os.str();
}

}  // namespace mk
