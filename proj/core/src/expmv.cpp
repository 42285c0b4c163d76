#include "fluxfsp/expmv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fluxfsp/error.hpp"

namespace fluxfsp {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

// Pade coefficients and theta_m thresholds for the 1-norm (Higham 2005).
constexpr std::array<double, 4> kPade3 = {120., 60., 12., 1.};
constexpr std::array<double, 6> kPade5 = {30240., 15120., 3360., 420., 30., 1.};
constexpr std::array<double, 8> kPade7 = {17297280., 8648640., 1995840., 277200.,
                                          25200.,    1512.,    56.,      1.};
constexpr std::array<double, 10> kPade9 = {17643225600., 8821612800., 2075673600., 302702400.,
                                           30270240.,    2162160.,    110880.,     3960.,
                                           90.,          1.};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
    129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
    1323241920.,        40840800.,          960960.,           16380.,
    182.,               1.};
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
MatrixXd pade_low(const MatrixXd& a, const std::array<double, N>& b) {
  const Index n = a.rows();
  const MatrixXd ident = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  MatrixXd power = ident;
  MatrixXd u_even = b[1] * ident;
  MatrixXd v = b[0] * ident;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * a2;
    v += b[k] * power;
    if (k + 1 < N) u_even += b[k + 1] * power;
  }
  const MatrixXd u = a * u_even;
  return (v - u).partialPivLu().solve(v + u);
}

MatrixXd pade13(const MatrixXd& a) {
  const auto& b = kPade13;
  const Index n = a.rows();
  const MatrixXd ident = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;
  const MatrixXd a4 = a2 * a2;
  const MatrixXd a6 = a4 * a2;
  const MatrixXd u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  const MatrixXd u = a * (u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const MatrixXd v_inner = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  const MatrixXd v = v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

double round_two_digits(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return x;
  const double s = std::pow(10.0, std::floor(std::log10(x)) - 1.0);
  return std::ceil(x / s) * s;
}

double norm1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

// Reused across calls; expmv runs once per solver step on vectors that can
// hold 10^5 entries, so fresh (m+1)-column allocations would dominate.
thread_local std::vector<double> t_basis;

}  // namespace

MatrixXd expm_dense(const MatrixXd& a, double t) {
  if (a.rows() != a.cols()) throw ConfigError("expm_dense: matrix must be square");
  if (static_cast<std::size_t>(a.rows()) > kDenseExpmMaxDim) {
    throw ConfigError("expm_dense: dimension exceeds " + std::to_string(kDenseExpmMaxDim));
  }
  const Index n = a.rows();
  if (n == 0) return a;
  MatrixXd ta = t * a;
  const double norm = ta.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm)) throw SolverError("expm_dense: non-finite input");
  if (norm <= kTheta3) return pade_low(ta, kPade3);
  if (norm <= kTheta5) return pade_low(ta, kPade5);
  if (norm <= kTheta7) return pade_low(ta, kPade7);
  if (norm <= kTheta9) return pade_low(ta, kPade9);
  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  ta *= std::ldexp(1.0, -s);
  MatrixXd r = pade13(ta);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

ExpmvResult expmv(const SparseGenerator& a, std::span<const double> v, double t,
                  const ExpmvOptions& opts) {
  const std::size_t n = a.dim();
  if (v.size() != n) throw ConfigError("expmv: vector dimension does not match matrix");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("expmv: t must be finite and >= 0");
  if (!(opts.tol > 0.0)) throw ConfigError("expmv: tol must be > 0");
  if (opts.max_krylov_dim < 1) throw ConfigError("expmv: max_krylov_dim must be >= 1");

  ExpmvResult result;
  result.w.assign(v.begin(), v.end());
  const double v_norm1 = norm1(v);
  const double a_norm = a.norm1();
  if (t == 0.0 || v_norm1 == 0.0 || a_norm == 0.0 || n == 0) return result;

  const int m = static_cast<int>(std::min<std::size_t>(opts.max_krylov_dim, n));
  const auto un = static_cast<Index>(n);
  constexpr double kGamma = 0.9;
  constexpr int kMaxReject = 60;
  const double breakdown_tol = a_norm * 1e-14;
  // Allowed l1 error per unit of time, so the substep budgets sum to tol*||v||.
  const double err_rate = opts.tol * v_norm1 / t;

  t_basis.resize(static_cast<std::size_t>(m + 1) * n);
  auto basis = [&](int j) { return Eigen::Map<Eigen::VectorXd>(t_basis.data() + j * n, un); };
  Eigen::VectorXd p(un);
  Eigen::Map<Eigen::VectorXd> w(result.w.data(), un);
  MatrixXd h(m + 2, m + 2);

  double beta = w.norm();
  double t_now = 0.0;
  double t_new;
  {
    const double xm = 1.0 / m;
    const double fact = std::pow((m + 1) / std::numbers::e, m + 1) *
                        std::sqrt(2.0 * std::numbers::pi * (m + 1));
    t_new = (1.0 / a_norm) * std::pow(fact * opts.tol * v_norm1 / (4.0 * beta * a_norm), xm);
    t_new = round_two_digits(std::min(t_new, t));
  }

  while (t_now < t) {
    if (++result.substeps > opts.max_substeps) {
      throw SolverError("expmv: exceeded max_substeps; tolerance too tight for this stiffness");
    }
    double t_step = std::min(t - t_now, t_new);
    basis(0) = w / beta;
    h.setZero();
    int mb = m;
    int k1 = 2;
    for (int j = 0; j < m; ++j) {
      a.multiply({t_basis.data() + j * n, n}, {p.data(), n});
      ++result.matvecs;
      for (int i = 0; i <= j; ++i) {
        const double hij = basis(i).dot(p);
        h(i, j) = hij;
        p -= hij * basis(i);
      }
      const double s = p.norm();
      if (s <= breakdown_tol) {
        // Invariant subspace: the projection is exact for any step length.
        k1 = 0;
        mb = j + 1;
        t_step = t - t_now;
        break;
      }
      h(j + 1, j) = s;
      basis(j + 1) = p / s;
    }

    double v_next_norm1 = 0.0;
    double av_norm1 = 0.0;
    if (k1 != 0) {
      h(m + 1, m) = 1.0;
      v_next_norm1 = basis(m).lpNorm<1>();
      a.multiply({t_basis.data() + m * n, n}, {p.data(), n});
      ++result.matvecs;
      av_norm1 = p.lpNorm<1>();
    }

    MatrixXd f;
    double err_loc = 0.0;
    double xm = 1.0 / m;
    for (int reject = 0;; ++reject) {
      const int mx = mb + k1;
      f = expm_dense(h.topLeftCorner(mx, mx), t_step);
      if (k1 == 0) break;
      const double phi1 = std::abs(beta * f(m, 0)) * v_next_norm1;
      const double phi2 = std::abs(beta * f(m + 1, 0)) * av_norm1;
      if (phi1 > 10.0 * phi2) {
        err_loc = phi2;
        xm = 1.0 / m;
      } else if (phi1 > phi2) {
        err_loc = phi1 * phi2 / (phi1 - phi2);
        xm = 1.0 / m;
      } else {
        err_loc = phi1;
        xm = m > 1 ? 1.0 / (m - 1) : 1.0;
      }
      if (!std::isfinite(err_loc)) throw SolverError("expmv: non-finite error estimate");
      if (err_loc <= err_rate * t_step) break;
      if (reject >= kMaxReject) throw SolverError("expmv: step size rejected too many times");
      ++result.rejected;
      t_step = round_two_digits(kGamma * t_step * std::pow(err_rate * t_step / err_loc, xm));
    }

    const int mx = mb + std::max(0, k1 - 1);
    w.setZero();
    for (int i = 0; i < mx; ++i) w += (beta * f(i, 0)) * basis(i);
    beta = w.norm();
    if (!std::isfinite(beta)) throw SolverError("expmv: non-finite result");
    result.error_estimate += err_loc;
    t_now += t_step;
    if (k1 == 0 || beta == 0.0) break;
    const double ratio = err_loc > 0.0 ? err_rate * t_step / err_loc : 1e6;
    t_new = round_two_digits(kGamma * t_step * std::pow(ratio, xm));
  }

  // Compressed columns sum to zero, so the exact result keeps v's mass.
  // Rounding in long stiff integrations drifts it by about u * ||tA||, which
  // is the dominant error once tol approaches that level; restore it.
  if (a.mode() == GeneratorMode::Compressed) {
    double v_sum = 0.0;
    double w_sum = 0.0;
    for (double x : v) v_sum += x;
    for (double x : result.w) w_sum += x;
    if (v_sum > 0.0 && w_sum > 0.0 && v_norm1 == v_sum) {
      const double scale = v_sum / w_sum;
      for (double& x : result.w) x *= scale;
    }
  }

  if (opts.clamp_negative) {
    for (double& x : result.w) {
      if (x < 0.0) {
        result.clamped_mass -= x;
        x = 0.0;
      }
    }
  }
  return result;
}

}  // namespace fluxfsp
