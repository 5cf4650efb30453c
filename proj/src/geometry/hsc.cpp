#include "crf/geometry/hsc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace crf::geom {

namespace {

constexpr std::array<int, 24> kPrimes{2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                      41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

// Standard normal pair from two Halton coordinates (Box-Muller).
cd halton_normal(std::uint64_t idx, int pair) {
  double u1 = halton(idx, 2 * pair), u2 = halton(idx, 2 * pair + 1);
  u1 = std::max(u1, 1e-300);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
}

// Quartic form in orthonormal coordinates u: Q(u) = sum Rt_{ijkl} u_i conj(u_j) u_k conj(u_l).
struct Quartic {
  int n;
  Tensor4 Rt;
  double value(const CVec& u) const {
    cd s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            s += Rt(i, j, k, l) * u(i) * std::conj(u(j)) * u(k) * std::conj(u(l));
    return s.real();
  }
  // Real gradient packed as a complex vector (d/d Re + i d/d Im).
  CVec gradient(const CVec& u) const {
    CVec g = CVec::Zero(n);
    for (int a = 0; a < n; ++a) {
      cd dq = 0.0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            dq += Rt(a, j, k, l) * std::conj(u(j)) * u(k) * std::conj(u(l)) +
                  Rt(k, j, a, l) * u(k) * std::conj(u(j)) * std::conj(u(l));
      g(a) = 2.0 * std::conj(dq);
    }
    return g;
  }
};

CVec phase_normalize(CVec u) {
  u.normalize();
  for (int i = 0; i < u.size(); ++i)
    if (std::abs(u(i)) > 1e-12) {
      u *= std::abs(u(i)) / u(i);
      break;
    }
  return u;
}

bool lex_less(const CVec& a, const CVec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(a(i).real() - b(i).real()) > 1e-12) return a(i).real() < b(i).real();
    if (std::abs(a(i).imag() - b(i).imag()) > 1e-12) return a(i).imag() < b(i).imag();
  }
  return false;
}

CVec ascend(const Quartic& q, CVec u, int steps, double& value, int& evals) {
  value = q.value(u);
  double eta = 0.5;
  for (int it = 0; it < steps; ++it) {
    CVec g = q.gradient(u);
    const cd radial = u.dot(g);  // conj(u)^T g
    g -= radial.real() * u;
    if (g.norm() < 1e-14) break;
    bool moved = false;
    for (double e = eta; e > 1e-12; e *= 0.5) {
      CVec cand = (u + e * g).normalized();
      const double v = q.value(cand);
      ++evals;
      if (v > value) {
        u = cand;
        value = v;
        eta = std::min(2.0 * e, 1.0);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return u;
}

Tensor4 to_frame(const Tensor4& R, const CMat& E, int n) {
  // Rt(a,b,c,d) = sum E_ia conj(E_jb) E_kc conj(E_ld) R(i,j,k,l), done one slot at a time.
  Tensor4 A(n), B(n);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cd s = 0.0;
          for (int i = 0; i < n; ++i) s += E(i, a) * R(i, j, k, l);
          A(a, j, k, l) = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cd s = 0.0;
          for (int j = 0; j < n; ++j) s += std::conj(E(j, b)) * A(a, j, k, l);
          B(a, b, k, l) = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int l = 0; l < n; ++l) {
          cd s = 0.0;
          for (int k = 0; k < n; ++k) s += E(k, c) * B(a, b, k, l);
          A(a, b, c, l) = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cd s = 0.0;
          for (int l = 0; l < n; ++l) s += std::conj(E(l, d)) * A(a, b, c, l);
          B(a, b, c, d) = s;
        }
  return B;
}

}  // namespace

double halton(std::uint64_t i, int dim) {
  const std::uint64_t base = static_cast<std::uint64_t>(kPrimes.at(static_cast<std::size_t>(dim)));
  double f = 1.0, r = 0.0;
  std::uint64_t k = i + 1;
  while (k > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(k % base);
    k /= base;
  }
  return r;
}

CMat orthonormal_frame(const CMat& h) {
  // |X|^2 = X^T h conj(X). With h = L L^H, Y = L^T X is Euclidean-orthonormal, so X = L^{-T} Y.
  Eigen::LLT<CMat> llt(h);
  const CMat L = llt.matrixL();
  return L.transpose().inverse();
}

double hsc_ratio(const CurvaturePackage& pkg, const CVec& X) {
  const double norm2 = (X.transpose() * pkg.g * X.conjugate())(0, 0).real();
  return bisectional_form(pkg.curvature, X, X).real() / (norm2 * norm2);
}

HscReport hsc_max(const CurvaturePackage& pkg, const SamplerConfig& cfg) {
  if (!pkg.has_curvature) throw DerivativeOrderError("hsc_max needs the curvature tensor");
  const int n = pkg.n;
  const CMat E = orthonormal_frame(pkg.g);
  const Quartic q{n, to_frame(pkg.curvature, E, n)};

  HscReport rep;
  rep.point = pkg.point;
  double best = -std::numeric_limits<double>::infinity();
  double record = best;
  CVec best_u;
  const auto offer = [&](const CVec& u, double v) {
    const CVec un = phase_normalize(u);
    if (v > best + 1e-12 || (std::abs(v - best) <= 1e-12 && lex_less(un, best_u))) {
      if (v > best) best = v;
      best_u = un;
    }
  };
  const int samples = n == 1 ? 1 : cfg.directions;
  for (int s = 0; s < samples; ++s) {
    CVec u(n);
    for (int a = 0; a < n; ++a) u(a) = halton_normal(cfg.seed + static_cast<std::uint64_t>(s), a);
    if (n == 1) u(0) = 1.0;
    u.normalize();
    const double v = q.value(u);
    ++rep.evaluations;
    offer(u, v);
    if (v > record) {
      record = v;
      double va;
      const CVec ua = ascend(q, u, cfg.ascent_steps, va, rep.evaluations);
      offer(ua, va);
    }
  }
  rep.kappa = best;
  CVec X = E * best_u;
  for (int i = 0; i < n; ++i)
    if (std::abs(X(i)) > 1e-12) {
      X *= std::abs(X(i)) / X(i);
      break;
    }
  rep.maximizer = X;
  return rep;
}

Tensor4 nabla_bar_torsion(const MetricJet& src, const Tensor3& T, const Tensor3& connection) {
  const int n = src.n;
  Tensor4 N(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          cd v = src.ddbar[j][i](l, k) - src.ddbar[l][i](j, k);
          for (int r = 0; r < n; ++r) v -= std::conj(connection(i, k, r)) * T(j, l, r);
          N(i, j, l, k) = v;
        }
  return N;
}

Tensor4 nabla_bar_torsion(const MetricJet& jet, const CurvaturePackage& pkg) {
  return nabla_bar_torsion(jet, pkg.torsion_lower, pkg.connection);
}

double torsion_norm(const Tensor3& T, const CMat& h) {
  const CMat E = orthonormal_frame(h);
  const int n = T.dim();
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        cd v = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) v += E(i, a) * E(j, b) * std::conj(E(k, c)) * T(i, j, k);
        s += std::norm(v);
      }
  return std::sqrt(s);
}

double frame_component_max(const Tensor4& N, const CMat& E) {
  // slots: (ibar, j, l, kbar) -> conj(E), E, E, conj(E)
  const int n = static_cast<int>(E.rows());
  const CMat Ec = E.conjugate();
  Tensor4 A(n), B(n);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          cd s = 0.0;
          for (int i = 0; i < n; ++i) s += Ec(i, a) * N(i, j, l, k);
          A(a, j, l, k) = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          cd s = 0.0;
          for (int j = 0; j < n; ++j) s += E(j, b) * A(a, j, l, k);
          B(a, b, l, k) = s;
        }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int k = 0; k < n; ++k) {
          cd s = 0.0;
          for (int l = 0; l < n; ++l) s += E(l, c) * B(a, b, l, k);
          A(a, b, c, k) = s;
        }
  double m = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cd s = 0.0;
          for (int k = 0; k < n; ++k) s += Ec(k, d) * A(a, b, c, k);
          m = std::max(m, std::abs(s));
        }
  return m;
}

namespace {

CMat haar_unitary(std::uint64_t idx, int n) {
  CMat Z(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) Z(a, b) = halton_normal(idx, a * n + b);
  Eigen::HouseholderQR<CMat> qr(Z);
  CMat Q = qr.householderQ() * CMat::Identity(n, n);
  const CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int b = 0; b < n; ++b) {
    const cd d = R(b, b);
    if (std::abs(d) > 0) Q.col(b) *= d / std::abs(d);
  }
  return Q;
}

// Cayley rotation exp-like: (I - i e H / 2)^{-1} (I + i e H / 2) is exactly unitary for Hermitian H.
CMat cayley(const CMat& H, double e) {
  const int n = static_cast<int>(H.rows());
  const CMat I = CMat::Identity(n, n);
  const cd ih(0.0, 0.5 * e);
  return (I - ih * H).inverse() * (I + ih * H);
}

CMat hermitian_generator(int n, int idx) {
  CMat H = CMat::Zero(n, n);
  int c = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      if (a == b) {
        if (c++ == idx) H(a, a) = 1.0;
        continue;
      }
      if (c++ == idx) {
        H(a, b) = 1.0;
        H(b, a) = 1.0;
      }
      if (c++ == idx) {
        H(a, b) = cd(0.0, 1.0);
        H(b, a) = cd(0.0, -1.0);
      }
    }
  return H;
}

}  // namespace

double frame_sweep_max(const Tensor4& N, const CMat& h, const SamplerConfig& cfg) {
  const int n = N.dim();
  const CMat E0 = orthonormal_frame(h);
  double best = frame_component_max(N, E0);
  double record = best;
  const int gens = n * n;
  for (int s = 0; s < cfg.frames; ++s) {
    CMat U = haar_unitary(cfg.seed + static_cast<std::uint64_t>(s), n);
    double v = frame_component_max(N, E0 * U);
    if (v <= record) continue;
    record = v;
    // pattern search over the unitary group from each record-setting sample
    double step = 0.5;
    for (int it = 0; it < cfg.frame_ascent_steps && step > 1e-9; ++it) {
      bool moved = false;
      for (int gi = 0; gi < gens && !moved; ++gi)
        for (double sign : {1.0, -1.0}) {
          const CMat Uc = U * cayley(hermitian_generator(n, gi), sign * step);
          const double vc = frame_component_max(N, E0 * Uc);
          if (vc > v) {
            U = Uc;
            v = vc;
            moved = true;
            break;
          }
        }
      if (!moved) step *= 0.5;
    }
    best = std::max(best, v);
  }
  return best;
}

double nabla_bar_torsion_norm(const MetricJet& jet, const SamplerConfig& cfg) {
  if (jet.order < 2) throw DerivativeOrderError("nabla_bar_torsion_norm needs second derivatives");
  const CurvaturePackage pkg = connection_from_jet(jet);
  return frame_sweep_max(nabla_bar_torsion(jet, pkg), jet.g, cfg);
}

double nabla_bar_torsion_norm(const MetricProvider& h, const Point& z, const SamplerConfig& cfg) {
  return nabla_bar_torsion_norm(h.jet(z, 2), cfg);
}

HscReport hsc_max(const MetricProvider& h, const Point& z, const SamplerConfig& cfg) {
  const MetricJet jet = h.jet(z, 2);
  CurvaturePackage pkg = curvature_from_jet(jet);
  pkg.point = z;
  HscReport rep = hsc_max(pkg, cfg);
  rep.nabla_bar_T_norm = nabla_bar_torsion_norm(jet, cfg);
  const int n = h.dim();
  rep.combined = (n + 1.0) / (2.0 * n) * rep.kappa + rep.nabla_bar_T_norm;
  return rep;
}

}  // namespace crf::geom
