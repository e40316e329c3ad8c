#pragma once

// Cone algebra for the embedded interior-point solver: the nonnegative
// orthant and second-order cone blocks, Nesterov-Todd scaling, Jordan
// products and step-to-boundary computations. Internal to the solver;
// exposed as a header so the tests can exercise the primitives directly.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace sopf::ipm {

using Eigen::VectorXd;

/// K = R+^n_nonneg x Q^{d_1} x ... x Q^{d_N}, laid out contiguously.
struct ConeLayout {
  int n_nonneg = 0;
  std::vector<int> soc_dims;

  int total_dim() const {
    int m = n_nonneg;
    for (int d : soc_dims) m += d;
    return m;
  }
  /// Barrier degree: 1 per orthant coordinate, 1 per SOC block.
  int degree() const { return n_nonneg + static_cast<int>(soc_dims.size()); }
};

/// Identity element e of the cone (ones on the orthant, (1,0,...) per cone).
inline VectorXd cone_identity(const ConeLayout& k) {
  VectorXd e = VectorXd::Zero(k.total_dim());
  e.head(k.n_nonneg).setOnes();
  int off = k.n_nonneg;
  for (int d : k.soc_dims) {
    e[off] = 1.0;
    off += d;
  }
  return e;
}

/// Largest violation of strict cone membership: negative when strictly
/// interior. Orthant: -u_i; SOC: ||u_1|| - u_0.
inline double cone_violation(const ConeLayout& k, const VectorXd& u) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.n_nonneg; ++i) worst = std::max(worst, -u[i]);
  int off = k.n_nonneg;
  for (int d : k.soc_dims) {
    worst = std::max(worst, u.segment(off + 1, d - 1).norm() - u[off]);
    off += d;
  }
  return worst;
}

/// Jordan product u o v (componentwise on the orthant, arrow product on SOC).
inline VectorXd jordan_product(const ConeLayout& k, const VectorXd& u,
                               const VectorXd& v) {
  VectorXd out(k.total_dim());
  out.head(k.n_nonneg) =
      u.head(k.n_nonneg).cwiseProduct(v.head(k.n_nonneg));
  int off = k.n_nonneg;
  for (int d : k.soc_dims) {
    auto u1 = u.segment(off + 1, d - 1);
    auto v1 = v.segment(off + 1, d - 1);
    out[off] = u.segment(off, d).dot(v.segment(off, d));
    out.segment(off + 1, d - 1) = u[off] * v1 + v[off] * u1;
    off += d;
  }
  return out;
}

/// Solve lambda o u = d for u. lambda must be strictly interior.
inline VectorXd jordan_solve(const ConeLayout& k, const VectorXd& lambda,
                             const VectorXd& d) {
  VectorXd u(k.total_dim());
  u.head(k.n_nonneg) =
      d.head(k.n_nonneg).cwiseQuotient(lambda.head(k.n_nonneg));
  int off = k.n_nonneg;
  for (int dim : k.soc_dims) {
    double l0 = lambda[off];
    auto l1 = lambda.segment(off + 1, dim - 1);
    double det = l0 * l0 - l1.squaredNorm();
    double u0 = (l0 * d[off] - l1.dot(d.segment(off + 1, dim - 1))) / det;
    u[off] = u0;
    u.segment(off + 1, dim - 1) =
        (d.segment(off + 1, dim - 1) - u0 * l1) / l0;
    off += dim;
  }
  return u;
}

/// Largest step alpha >= 0 keeping u + alpha*du inside the cone
/// (+inf when the whole ray stays inside).
inline double step_to_boundary(const ConeLayout& k, const VectorXd& u,
                               const VectorXd& du) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.n_nonneg; ++i)
    if (du[i] < 0.0) alpha = std::min(alpha, -u[i] / du[i]);
  int off = k.n_nonneg;
  for (int dim : k.soc_dims) {
    double u0 = u[off], d0 = du[off];
    auto u1 = u.segment(off + 1, dim - 1);
    auto d1 = du.segment(off + 1, dim - 1);
    // Boundary: (u0+a*d0)^2 - ||u1+a*d1||^2 = 0 with u0+a*d0 >= 0.
    double a = d0 * d0 - d1.squaredNorm();
    double b = 2.0 * (u0 * d0 - u1.dot(d1));
    double c = u0 * u0 - u1.squaredNorm();
    double block = std::numeric_limits<double>::infinity();
    double disc = b * b - 4.0 * a * c;
    if (std::abs(a) < 1e-300) {
      if (b < 0.0) block = -c / b;
    } else if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      double r1 = (-b - sq) / (2.0 * a);
      double r2 = (-b + sq) / (2.0 * a);
      if (r1 > r2) std::swap(r1, r2);
      if (r1 > 0.0)
        block = r1;
      else if (r2 > 0.0 && (a < 0.0 || b < 0.0))
        block = r2;
    }
    if (d0 < 0.0) block = std::min(block, -u0 / d0);
    if (block < alpha) alpha = block;
    off += dim;
  }
  return alpha;
}

/// Nesterov-Todd scaling W for the product cone, satisfying
/// W z = W^{-1} s = lambda for strictly interior s, z.
struct NtScaling {
  VectorXd lp_w;  // sqrt(s_i/z_i) on the orthant
  struct SocBlock {
    double eta;     // sqrt(rho_s / rho_z)
    VectorXd wbar;  // unit-hyperbolic scaling point
  };
  std::vector<SocBlock> soc;
  VectorXd lambda;  // scaled point W z

  static NtScaling identity(const ConeLayout& k) {
    NtScaling w;
    w.lp_w = VectorXd::Ones(k.n_nonneg);
    for (int d : k.soc_dims) {
      SocBlock b;
      b.eta = 1.0;
      b.wbar = VectorXd::Zero(d);
      b.wbar[0] = 1.0;
      w.soc.push_back(std::move(b));
    }
    w.lambda = cone_identity(k);
    return w;
  }
};

inline NtScaling compute_nt_scaling(const ConeLayout& k, const VectorXd& s,
                                    const VectorXd& z) {
  NtScaling w;
  w.lp_w = (s.head(k.n_nonneg).cwiseQuotient(z.head(k.n_nonneg))).cwiseSqrt();
  int off = k.n_nonneg;
  for (int d : k.soc_dims) {
    auto sb = s.segment(off, d);
    auto zb = z.segment(off, d);
    double rho_s = std::sqrt(sb[0] * sb[0] - sb.tail(d - 1).squaredNorm());
    double rho_z = std::sqrt(zb[0] * zb[0] - zb.tail(d - 1).squaredNorm());
    VectorXd a = sb / rho_s;
    VectorXd b = zb / rho_z;
    double gamma = std::sqrt((1.0 + a.dot(b)) / 2.0);
    VectorXd wbar(d);
    wbar[0] = (a[0] + b[0]) / (2.0 * gamma);
    wbar.tail(d - 1) = (a.tail(d - 1) - b.tail(d - 1)) / (2.0 * gamma);
    NtScaling::SocBlock blk;
    blk.eta = std::sqrt(rho_s / rho_z);
    blk.wbar = std::move(wbar);
    w.soc.push_back(std::move(blk));
    off += d;
  }
  return w;  // lambda filled in by caller via apply_w
}

namespace detail {
// M(wbar) v with M = [[w0, w1'], [w1, I + w1 w1'/(1+w0)]].
inline void soc_scale_apply(const VectorXd& wbar, double eta, bool inverse,
                            Eigen::Ref<VectorXd> v) {
  int d = static_cast<int>(wbar.size());
  double w0 = wbar[0];
  VectorXd w1 = wbar.tail(d - 1);
  if (inverse) w1 = -w1;
  double v0 = v[0];
  VectorXd v1 = v.tail(d - 1);
  double dot = w1.dot(v1);
  v[0] = w0 * v0 + dot;
  v.tail(d - 1) = v1 + (v0 + dot / (1.0 + w0)) * w1;
  double scale = inverse ? 1.0 / eta : eta;
  v.segment(0, d) *= scale;
}
}  // namespace detail

inline VectorXd apply_w(const ConeLayout& k, const NtScaling& w,
                        const VectorXd& v) {
  VectorXd out = v;
  out.head(k.n_nonneg) =
      v.head(k.n_nonneg).cwiseProduct(w.lp_w);
  int off = k.n_nonneg;
  for (std::size_t b = 0; b < w.soc.size(); ++b) {
    int d = k.soc_dims[b];
    auto seg = out.segment(off, d);
    detail::soc_scale_apply(w.soc[b].wbar, w.soc[b].eta, false, seg);
    off += d;
  }
  return out;
}

inline VectorXd apply_w_inv(const ConeLayout& k, const NtScaling& w,
                            const VectorXd& v) {
  VectorXd out = v;
  out.head(k.n_nonneg) =
      v.head(k.n_nonneg).cwiseQuotient(w.lp_w);
  int off = k.n_nonneg;
  for (std::size_t b = 0; b < w.soc.size(); ++b) {
    int d = k.soc_dims[b];
    auto seg = out.segment(off, d);
    detail::soc_scale_apply(w.soc[b].wbar, w.soc[b].eta, true, seg);
    off += d;
  }
  return out;
}

/// y = (W'W) v = W(W v); W is symmetric so this is eta^2 * H(wbar) v
/// on SOC blocks and w^2 v on the orthant.
inline VectorXd apply_wtw(const ConeLayout& k, const NtScaling& w,
                          const VectorXd& v) {
  VectorXd out(v.size());
  out.head(k.n_nonneg) =
      v.head(k.n_nonneg).cwiseProduct(w.lp_w.cwiseAbs2());
  int off = k.n_nonneg;
  for (std::size_t b = 0; b < w.soc.size(); ++b) {
    int d = k.soc_dims[b];
    const VectorXd& wb = w.soc[b].wbar;
    double eta2 = w.soc[b].eta * w.soc[b].eta;
    auto vb = v.segment(off, d);
    double dot = wb.dot(vb);
    // H(wbar) v = 2 wbar (wbar.v) - J v
    out[off] = eta2 * (2.0 * wb[0] * dot - vb[0]);
    out.segment(off + 1, d - 1) =
        eta2 * (2.0 * dot * wb.tail(d - 1) + vb.tail(d - 1));
    off += d;
  }
  return out;
}

}  // namespace sopf::ipm
