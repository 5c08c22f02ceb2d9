#include "rdeed/conservation.hpp"

#include <algorithm>
#include <boost/rational.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "rdeed/family.hpp"

namespace rdeed {

namespace {

using Rational = boost::rational<long long>;

template <class T>
struct Arith;

template <>
struct Arith<Rational> {
  static bool zero(const Rational& x) { return x.numerator() == 0; }
  static bool negative(const Rational& x) { return x.numerator() < 0; }
  static double to_double(const Rational& x) { return boost::rational_cast<double>(x); }
  static Rational magnitude(const Rational& x) { return x.numerator() < 0 ? -x : x; }
  static bool equal(const Rational& a, const Rational& b) { return a == b; }
};

template <>
struct Arith<double> {
  static constexpr double tol = 1e-10;
  static bool zero(double x) { return std::abs(x) < tol; }
  static bool negative(double x) { return x < -tol; }
  static double to_double(double x) { return x; }
  static double magnitude(double x) { return std::abs(x); }
  static bool equal(double a, double b) { return std::abs(a - b) < tol; }
};

template <class T>
using Rows = std::vector<std::vector<T>>;

// Reduced row echelon form in place; returns pivot columns.
template <class T>
std::vector<int> rref(Rows<T>& A, int ncols) {
  using A_ = Arith<T>;
  std::vector<int> pivots;
  int row = 0;
  const int nrows = static_cast<int>(A.size());
  for (int col = 0; col < ncols && row < nrows; ++col) {
    int best = -1;
    for (int r = row; r < nrows; ++r) {
      if (A_::zero(A[r][col])) continue;
      if (best < 0 || A_::magnitude(A[r][col]) > A_::magnitude(A[best][col])) best = r;
    }
    if (best < 0) continue;
    std::swap(A[row], A[best]);
    T p = A[row][col];
    for (auto& x : A[row]) x /= p;
    for (int r = 0; r < nrows; ++r) {
      if (r == row || A_::zero(A[r][col])) continue;
      T f = A[r][col];
      for (int k = 0; k < ncols; ++k) A[r][k] -= f * A[row][k];
    }
    pivots.push_back(col);
    ++row;
  }
  A.resize(row);
  return pivots;
}

// Kernel of W (R x I) as rows, identity on the free columns.
template <class T>
Rows<T> kernel_rows(Rows<T> W, int I) {
  auto piv = rref(W, I);
  std::vector<bool> is_piv(I, false);
  for (int p : piv) is_piv[p] = true;
  Rows<T> K;
  for (int f = 0; f < I; ++f) {
    if (is_piv[f]) continue;
    std::vector<T> v(I, T(0));
    v[f] = T(1);
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -W[r][f];
    K.push_back(v);
  }
  return K;
}

template <class T>
void normalize_first_positive(std::vector<T>& v) {
  for (const T& x : v) {
    if (!Arith<T>::zero(x)) {
      T s = x;
      for (auto& y : v) y /= s;
      return;
    }
  }
}

template <class T>
void clean(std::vector<T>& v) {
  for (auto& x : v)
    if (Arith<T>::zero(x)) x = T(0);
}

template <class T>
int rank_of(Rows<T> A, int ncols) {
  return static_cast<int>(rref(A, ncols).size());
}

// Lexicographically larger support pattern first; ties by values.
template <class T>
bool pattern_before(const std::vector<T>& a, const std::vector<T>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool za = Arith<T>::zero(a[i]), zb = Arith<T>::zero(b[i]);
    if (za != zb) return !za;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (Arith<T>::equal(a[i], b[i])) continue;
    return a[i] < b[i];
  }
  return false;
}

template <class T>
bool support_subset(const std::vector<T>& a, const std::vector<T>& b) {  // supp(a) strictly inside supp(b)
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool za = Arith<T>::zero(a[i]), zb = Arith<T>::zero(b[i]);
    if (!za && zb) return false;
    if (za && !zb) strict = true;
  }
  return strict;
}

struct BasisChoice {
  Mat Q;
  bool nonnegative;
};

// Searches nonnegative combinations sum w_k K_k with integer weights 0..4
// (the RREF structure forces equal signs on the free columns).
template <class T>
BasisChoice choose_basis(const Rows<T>& kernel, int I) {
  Rows<T> K = kernel;
  rref(K, I);
  const int m = static_cast<int>(K.size());
  Rows<T> candidates;

  constexpr int wmax = 4;
  double full = std::pow(wmax + 1.0, m);
  const int max_nonzero = full <= 2e6 ? m : std::min(m, 3);
  std::vector<int> w(m, 0);

  auto consider = [&]() {
    int nz = 0, g = 0;
    for (int x : w) {
      if (x) ++nz;
      g = std::gcd(g, x);
    }
    if (nz == 0 || nz > max_nonzero || g != 1) return;
    std::vector<T> v(I, T(0));
    for (int k = 0; k < m; ++k)
      if (w[k])
        for (int i = 0; i < I; ++i) v[i] += T(w[k]) * K[k][i];
    for (const T& x : v)
      if (Arith<T>::negative(x)) return;
    clean(v);
    normalize_first_positive(v);
    for (const auto& c : candidates) {
      bool same = true;
      for (int i = 0; i < I && same; ++i) same = Arith<T>::equal(c[i], v[i]);
      if (same) return;
    }
    candidates.push_back(std::move(v));
  };

  // Odometer over {0..wmax}^m.
  while (true) {
    consider();
    int k = 0;
    while (k < m && w[k] == wmax) w[k++] = 0;
    if (k == m) break;
    ++w[k];
  }

  std::vector<bool> minimal(candidates.size(), true);
  for (std::size_t a = 0; a < candidates.size(); ++a)
    for (std::size_t b = 0; b < candidates.size(); ++b)
      if (a != b && support_subset(candidates[b], candidates[a])) minimal[a] = false;
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (minimal[x] != minimal[y]) return static_cast<bool>(minimal[x]);
    return pattern_before(candidates[x], candidates[y]);
  });

  Rows<T> chosen;
  for (std::size_t idx : order) {
    if (static_cast<int>(chosen.size()) == m) break;
    chosen.push_back(candidates[idx]);
    if (rank_of(chosen, I) < static_cast<int>(chosen.size())) chosen.pop_back();
  }

  BasisChoice out;
  out.nonnegative = static_cast<int>(chosen.size()) == m;
  if (!out.nonnegative) {
    chosen = K;
    for (auto& v : chosen) {
      clean(v);
      normalize_first_positive(v);
    }
  }
  out.Q = Mat::Zero(m, I);
  for (int r = 0; r < m; ++r)
    for (int i = 0; i < I; ++i) out.Q(r, i) = Arith<T>::to_double(chosen[r][i]);
  if (!out.nonnegative) out.nonnegative = m > 0 && (out.Q.array() >= 0.0).all();
  return out;
}

std::string fmt_coeff(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::string law_label(const ReactionNetwork& net, const Eigen::RowVectorXd& q) {
  std::string out;
  for (int i = 0; i < net.num_species(); ++i) {
    double x = q[i];
    if (x == 0.0) continue;
    if (!out.empty()) out += x < 0 ? " - " : " + ";
    else if (x < 0) out += "-";
    double a = std::abs(x);
    if (a != 1.0) out += fmt_coeff(a) + " ";
    out += net.species()[i];
  }
  return out;
}

ConservationBasis single_family_basis(const ReactionNetwork& net, const SingleReactionFamily& f) {
  const int I = static_cast<int>(f.a.size()), J = static_cast<int>(f.b.size());
  ConservationBasis basis;
  basis.m = I + J - 1;
  basis.Q = Mat::Zero(basis.m, net.num_species());
  int row = 0;
  for (int j = 0; j < J; ++j, ++row) {
    basis.Q(row, f.a[0]) = 1.0 / f.alpha[0];
    basis.Q(row, f.b[j]) = 1.0 / f.beta[j];
    basis.row_labels.push_back("v_" + std::to_string(j + 1) + ": " + law_label(net, basis.Q.row(row)));
  }
  for (int i = 1; i < I; ++i, ++row) {
    basis.Q(row, f.a[i]) = 1.0 / f.alpha[i];
    basis.Q(row, f.b[0]) = 1.0 / f.beta[0];
    basis.row_labels.push_back("w_" + std::to_string(i + 1) + ": " + law_label(net, basis.Q.row(row)));
  }
  basis.nonnegative = true;
  basis.exact = net.integral_stoichiometry();
  return basis;
}

}  // namespace

ConservationBasis conservation_basis(const ReactionNetwork& net) {
  if (auto f = as_single_reaction(net)) return single_family_basis(net, *f);

  const int I = net.num_species();
  const Mat W = wegscheider_matrix(net);
  ConservationBasis basis;
  BasisChoice choice;
  if (net.integral_stoichiometry()) {
    Rows<Rational> Wq(W.rows(), std::vector<Rational>(I));
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (int i = 0; i < I; ++i) Wq[r][i] = Rational(static_cast<long long>(std::llround(W(r, i))));
    choice = choose_basis(kernel_rows(Wq, I), I);
    basis.exact = true;
  } else {
    Rows<double> kern;
    if (W.rows() == 0) {
      for (int i = 0; i < I; ++i) {
        std::vector<double> e(I, 0.0);
        e[i] = 1.0;
        kern.push_back(e);
      }
    } else {
      Eigen::JacobiSVD<Mat> svd(W, Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      double smax = s.size() ? s[0] : 0.0;
      int rank = 0;
      for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s[k] > 1e-10 * std::max(1.0, smax)) ++rank;
      const Mat& V = svd.matrixV();
      for (int k = rank; k < I; ++k) {
        std::vector<double> v(I);
        for (int i = 0; i < I; ++i) v[i] = V(i, k);
        kern.push_back(v);
      }
    }
    choice = choose_basis(kern, I);
    basis.exact = false;
  }
  basis.Q = choice.Q;
  basis.m = static_cast<int>(choice.Q.rows());
  basis.nonnegative = choice.nonnegative;
  for (int r = 0; r < basis.m; ++r) basis.row_labels.push_back(law_label(net, basis.Q.row(r)));
  return basis;
}

Vec mass_vector(const ConservationBasis& basis, const Vec& c0) {
  if (c0.size() != basis.Q.cols()) throw Error("mass_vector: state dimension does not match conservation basis");
  return basis.Q * c0;
}

ConservationCheck check_conserved(const ConservationBasis& basis, const ReactionNetwork& net, int samples,
                                  std::uint64_t seed) {
  if (samples < 1) throw Error("check_conserved: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 10.0);
  ConservationCheck out;
  out.samples = samples;
  Vec c(net.num_species());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < c.size(); ++i) c[i] = U(rng);
    Vec res = basis.Q * reaction_vector(net, c);
    if (res.size()) out.max_residual = std::max(out.max_residual, res.cwiseAbs().maxCoeff());
  }
  out.passed = out.max_residual < 1e-10;
  return out;
}

Vec species_bounds(const ConservationBasis& basis, const Vec& M) {
  const int I = static_cast<int>(basis.Q.cols());
  Vec b = Vec::Constant(I, std::numeric_limits<double>::infinity());
  if (!basis.nonnegative) return b;
  for (int k = 0; k < basis.m; ++k)
    for (int i = 0; i < I; ++i)
      if (basis.Q(k, i) > 0.0) b[i] = std::min(b[i], M[k] / basis.Q(k, i));
  return b;
}

}  // namespace rdeed
