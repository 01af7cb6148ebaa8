#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mourrekit/torusdyn.hpp"
#include "mourrekit/trigfun.hpp"

namespace mk {

// Frequencies |k|_inf <= M; index is row-major with the last axis fastest.
class FreqWindow {
 public:
  FreqWindow(int d, int M, int margin);

  int dim() const { return d_; }
  int half_width() const { return M_; }
  int margin() const { return margin_; }
  std::size_t size() const { return size_; }

  bool contains(const Freq& k) const;
  std::size_t index(const Freq& k) const;
  Freq freq(std::size_t idx) const;
  int linf(std::size_t idx) const;
  bool operator==(const FreqWindow& o) const { return d_ == o.d_ && M_ == o.M_ && margin_ == o.margin_; }

 private:
  int d_, M_, margin_;
  std::size_t size_;
};

class StateVector {
 public:
  StateVector(const FreqWindow& w, std::vector<cplx> c);
  static StateVector zero(const FreqWindow& w);
  static StateVector basis(const FreqWindow& w, const Freq& k);
  // Unit vector with Gaussian entries on |k|_inf <= support.
  static StateVector random_unit(const FreqWindow& w, int support, std::mt19937_64& rng);

  const FreqWindow& window() const { return w_; }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx operator[](std::size_t i) const { return c_[i]; }
  // Largest |k|_inf carrying a nonzero coefficient, -1 for the zero vector.
  int support() const { return support_; }
  double norm() const;

  StateVector& operator+=(const StateVector& o);
  StateVector& operator-=(const StateVector& o);
  StateVector& operator*=(cplx s);

 private:
  void track();

  FreqWindow w_;
  std::vector<cplx> c_;
  int support_ = -1;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
cplx inner(const StateVector& a, const StateVector& b);  // conj(a).b

// Multiplication by `mult` after the diagonal `diag`, kept when known so
// apply() can take the transform path.
struct Factorization {
  TrigPoly mult;
  std::vector<cplx> diag;
};

// Sparse rows on a frequency window; every stored entry is nonzero and
// within `band` of the diagonal in |k - k'|_inf.
class OperatorMatrix {
 public:
  explicit OperatorMatrix(const FreqWindow& w);

  struct Entry {
    std::uint32_t col;
    cplx val;
  };
  // Rows may be unsorted and contain duplicates; zeros are removed.
  static OperatorMatrix from_rows(const FreqWindow& w, std::vector<std::vector<Entry>> rows);
  static OperatorMatrix identity(const FreqWindow& w);
  static OperatorMatrix diagonal(const FreqWindow& w, const std::vector<cplx>& d);

  const FreqWindow& window() const { return w_; }
  std::size_t rows() const { return w_.size(); }
  int band() const { return band_; }
  std::size_t nonzeros() const { return vals_.size(); }
  bool is_diagonal() const { return band_ == 0; }
  cplx entry(std::size_t i, std::size_t j) const;

  double residual_bound = 0.0;
  std::optional<Factorization> factorization;

  // CSR access
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& cols() const { return cols_; }
  const std::vector<cplx>& vals() const { return vals_; }

 private:
  void compute_band();

  FreqWindow w_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<cplx> vals_;
  int band_ = 0;
};

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(cplx s, const OperatorMatrix& a);
OperatorMatrix adjoint(const OperatorMatrix& a);

OperatorMatrix translation_koopman(const FrequencyVector& y, const FreqWindow& w);
OperatorMatrix multiplication_matrix(const TrigPoly& p, const FreqWindow& w);

struct FurstenbergLevel {
  FurstenbergSpec spec;
  int j = 2;
  int k = 1;

  void validate() const;
  int base_dim() const { return j - 1; }
};

OperatorMatrix assemble_koopman(const SkewProductSpec& spec, const FreqWindow& w, double tol);
OperatorMatrix assemble_koopman(const FurstenbergLevel& level, const FreqWindow& w, double tol);
// Koopman operator of T_{dim} (dim 1: the base rotation) on a window of dimension dim.
OperatorMatrix furstenberg_base_koopman(const FurstenbergSpec& spec, int dim, const FreqWindow& w, double tol);

OperatorMatrix conjugate_diagonal(const SkewProductSpec& spec, const FreqWindow& w);
OperatorMatrix conjugate_diagonal(const FurstenbergLevel& level, const FreqWindow& w);

// (1/n) sum_{l<n} (U*)^l A U^l; needs margin >= n * band(U).
OperatorMatrix average_conjugate(const OperatorMatrix& A, const OperatorMatrix& U, int n);
OperatorMatrix commutator(const OperatorMatrix& P, const OperatorMatrix& Q);

StateVector apply(const OperatorMatrix& op, const StateVector& v, bool fast = false);

struct NormEstimate {
  double op_norm = 0.0;
  double frobenius = 0.0;
};
// 30 power iterations on A*A from a fixed seed.
NormEstimate norm_estimate(const OperatorMatrix& a, std::uint64_t seed = 12345);

std::string to_text(const OperatorMatrix& a);

}  // namespace mk
