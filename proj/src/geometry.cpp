#include "phimin/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace phimin {

namespace {

// One-dimensional second-order stencils: central inside, one-sided at the ends.
struct Stencils {
  static double d1(const double* f, int i, int n, int stride, double h) {
    if (i == 0) return (-3 * f[0] + 4 * f[stride] - f[2 * stride]) / (2 * h);
    if (i == n - 1)
      return (3 * f[i * stride] - 4 * f[(i - 1) * stride] + f[(i - 2) * stride]) / (2 * h);
    return (f[(i + 1) * stride] - f[(i - 1) * stride]) / (2 * h);
  }
  static double d2(const double* f, int i, int n, int stride, double h) {
    if (i == 0)
      return (2 * f[0] - 5 * f[stride] + 4 * f[2 * stride] - f[3 * stride]) / (h * h);
    if (i == n - 1)
      return (2 * f[i * stride] - 5 * f[(i - 1) * stride] + 4 * f[(i - 2) * stride] -
              f[(i - 3) * stride]) / (h * h);
    return (f[(i + 1) * stride] - 2 * f[i * stride] + f[(i - 1) * stride]) / (h * h);
  }
  // Fourth-order first derivative, biased stencils near the ends.
  static double d1_4(const double* f, int i, int n, int stride, double h) {
    auto v = [&](int k) { return f[k * stride]; };
    if (i == 0)
      return (-25 * v(0) + 48 * v(1) - 36 * v(2) + 16 * v(3) - 3 * v(4)) / (12 * h);
    if (i == 1)
      return (-3 * v(0) - 10 * v(1) + 18 * v(2) - 6 * v(3) + v(4)) / (12 * h);
    if (i == n - 2)
      return (3 * v(n - 1) + 10 * v(n - 2) - 18 * v(n - 3) + 6 * v(n - 4) - v(n - 5)) /
             (12 * h);
    if (i == n - 1)
      return (25 * v(n - 1) - 48 * v(n - 2) + 36 * v(n - 3) - 16 * v(n - 4) + 3 * v(n - 5)) /
             (12 * h);
    return (-v(i + 2) + 8 * v(i + 1) - 8 * v(i - 1) + v(i - 2)) / (12 * h);
  }
};

}  // namespace

PatchDerivatives patch_derivatives(const GraphPatch& p) {
  const int nx = p.nx(), ny = p.ny();
  if (nx < 4 || ny < 4) throw GridTooSmall("patch_derivatives needs nx, ny >= 4");
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  PatchDerivatives d;
  d.ux.assign(n, 0.0);
  d.uy.assign(n, 0.0);
  d.uxx.assign(n, 0.0);
  d.uyy.assign(n, 0.0);
  d.uxy.assign(n, 0.0);
  const double* u = p.values().data();
  auto idx = [ny](int i, int j) { return static_cast<std::size_t>(i) * ny + j; };
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      d.ux[idx(i, j)] = Stencils::d1(u + j, i, nx, ny, p.hx());
      d.uy[idx(i, j)] = Stencils::d1(u + static_cast<std::size_t>(i) * ny, j, ny, 1, p.hy());
      d.uxx[idx(i, j)] = Stencils::d2(u + j, i, nx, ny, p.hx());
      d.uyy[idx(i, j)] = Stencils::d2(u + static_cast<std::size_t>(i) * ny, j, ny, 1, p.hy());
    }
  // Cross derivative: x-stencil applied to uy.
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      d.uxy[idx(i, j)] = Stencils::d1(d.uy.data() + j, i, nx, ny, p.hx());
  return d;
}

SurfaceFields surface_fields(const GraphPatch& p) {
  const PatchDerivatives d = patch_derivatives(p);
  const int nx = p.nx(), ny = p.ny();
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  SurfaceFields f;
  f.nx = nx;
  f.ny = ny;
  f.normal.resize(n);
  f.H.resize(n);
  f.S_norm2.resize(n);
  f.K.resize(n);
  f.eta1.resize(n);
  f.eta2.resize(n);
  f.eta3.resize(n);
  f.grad_x3_norm2.resize(n);
  f.ux = d.ux;
  f.uy = d.uy;
  for (std::size_t k = 0; k < n; ++k) {
    const double ux = d.ux[k], uy = d.uy[k];
    const double W2 = 1.0 + ux * ux + uy * uy;
    const double W = std::sqrt(W2);
    f.normal[k] = {ux / W, uy / W, -1.0 / W};
    f.eta1[k] = f.normal[k][0];
    f.eta2[k] = f.normal[k][1];
    f.eta3[k] = f.normal[k][2];
    f.grad_x3_norm2[k] = 1.0 - f.eta3[k] * f.eta3[k];
    const double uxx = d.uxx[k], uyy = d.uyy[k], uxy = d.uxy[k];
    const double H = ((1.0 + uy * uy) * uxx - 2.0 * ux * uy * uxy + (1.0 + ux * ux) * uyy) /
                     (W2 * W);
    const double K = (uxx * uyy - uxy * uxy) / (W2 * W2);
    f.H[k] = H;
    f.K[k] = K;
    f.S_norm2[k] = H * H - 2.0 * K;
  }
  return f;
}

NodeField phi_minimal_residual(const GraphPatch& p, const WeightSpec& spec) {
  const PatchDerivatives d = patch_derivatives(p);
  const std::size_t n = p.values().size();
  NodeField r(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = p.values()[k];
    const double dphi = spec.eval(u).dphi;
    const double ux = d.ux[k], uy = d.uy[k];
    r[k] = (1.0 + ux * ux) * d.uyy[k] + (1.0 + uy * uy) * d.uxx[k] -
           2.0 * ux * uy * d.uxy[k] - dphi * (1.0 + ux * ux + uy * uy);
  }
  return r;
}

NodeField drift_laplacian(const GraphPatch& p, const WeightSpec& spec, const NodeField& f) {
  const int nx = p.nx(), ny = p.ny();
  if (f.size() != p.values().size())
    throw GridTooSmall("drift_laplacian: field size mismatch");
  const PatchDerivatives d = patch_derivatives(p);
  const std::size_t n = p.values().size();
  auto idx = [ny](int i, int j) { return static_cast<std::size_t>(i) * ny + j; };

  NodeField W(n);
  for (std::size_t k = 0; k < n; ++k)
    W[k] = std::sqrt(1.0 + d.ux[k] * d.ux[k] + d.uy[k] * d.uy[k]);

  // Central first differences of f (interior only; that is all we use).
  NodeField fx(n, 0.0), fy(n, 0.0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      if (i > 0 && i < nx - 1)
        fx[idx(i, j)] = (f[idx(i + 1, j)] - f[idx(i - 1, j)]) / (2.0 * p.hx());
      if (j > 0 && j < ny - 1)
        fy[idx(i, j)] = (f[idx(i, j + 1)] - f[idx(i, j - 1)]) / (2.0 * p.hy());
    }

  NodeField out(n, 0.0);
  const double hx = p.hx(), hy = p.hy();
  for (int i = 1; i < nx - 1; ++i)
    for (int j = 1; j < ny - 1; ++j) {
      const std::size_t k = idx(i, j);
      // Fluxes sqrt(g)(g^{11} f_x + g^{12} f_y) at x half-nodes; all face
      // quantities come from face-centered differences of u and f, which
      // keeps the truncation constant small.
      const auto& uv = p.values();
      auto flux_x = [&](int ia, int ib) {
        const std::size_t ka = idx(ia, j), kb = idx(ib, j);
        const double uxf = (uv[kb] - uv[ka]) / hx;
        const double uyf = (uv[idx(ia, j + 1)] + uv[idx(ib, j + 1)] - uv[idx(ia, j - 1)] -
                            uv[idx(ib, j - 1)]) / (4.0 * hy);
        const double Wf = std::sqrt(1.0 + uxf * uxf + uyf * uyf);
        const double df = (f[kb] - f[ka]) / hx;
        const double fyh = (f[idx(ia, j + 1)] + f[idx(ib, j + 1)] - f[idx(ia, j - 1)] -
                            f[idx(ib, j - 1)]) / (4.0 * hy);
        return ((1.0 + uyf * uyf) * df - uxf * uyf * fyh) / Wf;
      };
      auto flux_y = [&](int ja, int jb) {
        const std::size_t ka = idx(i, ja), kb = idx(i, jb);
        const double uyf = (uv[kb] - uv[ka]) / hy;
        const double uxf = (uv[idx(i + 1, ja)] + uv[idx(i + 1, jb)] - uv[idx(i - 1, ja)] -
                            uv[idx(i - 1, jb)]) / (4.0 * hx);
        const double Wf = std::sqrt(1.0 + uxf * uxf + uyf * uyf);
        const double df = (f[kb] - f[ka]) / hy;
        const double fxh = (f[idx(i + 1, ja)] + f[idx(i + 1, jb)] - f[idx(i - 1, ja)] -
                            f[idx(i - 1, jb)]) / (4.0 * hx);
        return ((1.0 + uxf * uxf) * df - uxf * uyf * fxh) / Wf;
      };
      const double div = (flux_x(i, i + 1) - flux_x(i - 1, i)) / hx +
                         (flux_y(j, j + 1) - flux_y(j - 1, j)) / hy;
      const double lap = div / W[k];

      // Drift term dphi * <grad x3, grad f> in the induced metric.
      const double ux = d.ux[k], uy = d.uy[k];
      const double W2 = W[k] * W[k];
      const double inner = ((1.0 + uy * uy) * ux * fx[k] - ux * uy * (ux * fy[k] + uy * fx[k]) +
                            (1.0 + ux * ux) * uy * fy[k]) / W2;
      out[k] = lap + spec.eval(p.values()[k]).dphi * inner;
    }
  return out;
}

IdentityResiduals identity_residuals(const GraphPatch& p, const WeightSpec& spec,
                                     double residual_tol) {
  const int nx = p.nx(), ny = p.ny();
  if (nx < 7 || ny < 7) throw GridTooSmall("identity_residuals needs nx, ny >= 7");
  auto idx = [ny](int i, int j) { return static_cast<std::size_t>(i) * ny + j; };

  // The identities only hold on solutions of the graph equation.
  {
    const NodeField r = phi_minimal_residual(p, spec);
    double rmax = 0.0;
    for (int i = 2; i < nx - 2; ++i)
      for (int j = 2; j < ny - 2; ++j) rmax = std::max(rmax, std::abs(r[idx(i, j)]));
    if (rmax > residual_tol)
      throw NotMinimal(fmt::format("graph-equation residual {} exceeds tolerance {}", rmax,
                                   residual_tol));
  }

  const SurfaceFields sf = surface_fields(p);
  const std::size_t n = p.values().size();
  NodeField cx1(n), cx2(n), q(n);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      cx1[idx(i, j)] = p.x(i);
      cx2[idx(i, j)] = p.y(j);
      q[idx(i, j)] = sf.eta2[idx(i, j)] / sf.eta3[idx(i, j)];
    }
  const NodeField Lx1 = drift_laplacian(p, spec, cx1);
  const NodeField Lx2 = drift_laplacian(p, spec, cx2);
  const NodeField Lx3 = drift_laplacian(p, spec, p.values());
  const NodeField Le1 = drift_laplacian(p, spec, sf.eta1);
  const NodeField Le2 = drift_laplacian(p, spec, sf.eta2);
  const NodeField Le3 = drift_laplacian(p, spec, sf.eta3);
  const NodeField Lq = drift_laplacian(p, spec, q);
  const PatchDerivatives d = patch_derivatives(p);

  IdentityResiduals out;
  // One-sided stencils feed the first interior ring through eta and the
  // metric; norms are taken two nodes in, where everything is central.
  for (int i = 2; i < nx - 2; ++i)
    for (int j = 2; j < ny - 2; ++j) {
      const std::size_t k = idx(i, j);
      const WeightEval w = spec.eval(p.values()[k]);
      out.x1 = std::max(out.x1, std::abs(Lx1[k]));
      out.x2 = std::max(out.x2, std::abs(Lx2[k]));
      out.height = std::max(out.height, std::abs(Lx3[k] - w.dphi));
      out.eta1 = std::max(out.eta1, std::abs(Le1[k] + sf.S_norm2[k] * sf.eta1[k] -
                                             w.ddphi * sf.eta1[k] * sf.eta3[k] * sf.eta3[k]));
      out.eta2 = std::max(out.eta2, std::abs(Le2[k] + sf.S_norm2[k] * sf.eta2[k] -
                                             w.ddphi * sf.eta2[k] * sf.eta3[k] * sf.eta3[k]));
      out.eta3 = std::max(out.eta3, std::abs(Le3[k] + sf.S_norm2[k] * sf.eta3[k] +
                                             w.ddphi * sf.eta3[k] * sf.grad_x3_norm2[k]));

      // LAP2 quotient identity; the inner product uses central differences.
      const double qx = (q[idx(i + 1, j)] - q[idx(i - 1, j)]) / (2.0 * p.hx());
      const double qy = (q[idx(i, j + 1)] - q[idx(i, j - 1)]) / (2.0 * p.hy());
      const double ex = (sf.eta3[idx(i + 1, j)] - sf.eta3[idx(i - 1, j)]) / (2.0 * p.hx());
      const double ey = (sf.eta3[idx(i, j + 1)] - sf.eta3[idx(i, j - 1)]) / (2.0 * p.hy());
      const double ux = d.ux[k], uy = d.uy[k];
      const double W2 = 1.0 + ux * ux + uy * uy;
      const double inner = ((1.0 + uy * uy) * qx * ex - ux * uy * (qx * ey + qy * ex) +
                            (1.0 + ux * ux) * qy * ey) / W2;
      out.lap2 = std::max(out.lap2,
                          std::abs(Lq[k] + 2.0 * inner / sf.eta3[k] - w.ddphi * q[k]));
    }
  return out;
}

namespace {

std::vector<double> simpson_weights(int n, double h) {
  std::vector<double> w(n, 0.0);
  if (n % 2 == 1) {
    for (int i = 0; i < n; ++i)
      w[i] = (i == 0 || i == n - 1) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
  } else {
    for (int i = 0; i < n; ++i) w[i] = (i == 0 || i == n - 1) ? h / 2.0 : h;
  }
  return w;
}

}  // namespace

double weighted_area(const GraphPatch& p, const WeightSpec& spec) {
  const PatchDerivatives d = patch_derivatives(p);
  const auto wx = simpson_weights(p.nx(), p.hx());
  const auto wy = simpson_weights(p.ny(), p.hy());
  double area = 0.0;
  for (int i = 0; i < p.nx(); ++i)
    for (int j = 0; j < p.ny(); ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * p.ny() + j;
      const double W = std::sqrt(1.0 + d.ux[k] * d.ux[k] + d.uy[k] * d.uy[k]);
      area += wx[i] * wy[j] * std::exp(spec.eval(p.values()[k]).phi) * W;
    }
  return area;
}

namespace {

// Weighted area of the parametrized surface (x,y,u) + eps*v*N, computed
// directly from the embedding (area is parametrization independent, so
// this equals the weighted area of the re-projected height graph).
double perturbed_area(const GraphPatch& p, const WeightSpec& spec, const NodeField& v,
                      double eps) {
  const int nx = p.nx(), ny = p.ny();
  const SurfaceFields sf = surface_fields(p);
  const std::size_t n = p.values().size();
  std::array<NodeField, 3> P;
  for (auto& c : P) c.resize(n);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * ny + j;
      P[0][k] = p.x(i) + eps * v[k] * sf.normal[k][0];
      P[1][k] = p.y(j) + eps * v[k] * sf.normal[k][1];
      P[2][k] = p.values()[k] + eps * v[k] * sf.normal[k][2];
    }
  const auto wx = simpson_weights(nx, p.hx());
  const auto wy = simpson_weights(ny, p.hy());
  double area = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      double Px[3], Py[3];
      for (int c = 0; c < 3; ++c) {
        Px[c] = Stencils::d1_4(P[c].data() + j, i, nx, ny, p.hx());
        Py[c] = Stencils::d1_4(P[c].data() + static_cast<std::size_t>(i) * ny, j, ny, 1, p.hy());
      }
      const double cx = Px[1] * Py[2] - Px[2] * Py[1];
      const double cy = Px[2] * Py[0] - Px[0] * Py[2];
      const double cz = Px[0] * Py[1] - Px[1] * Py[0];
      const std::size_t k = static_cast<std::size_t>(i) * ny + j;
      area += wx[i] * wy[j] * std::exp(spec.eval(P[2][k]).phi) *
              std::sqrt(cx * cx + cy * cy + cz * cz);
    }
  return area;
}

}  // namespace

double first_variation(const GraphPatch& p, const WeightSpec& spec, const NodeField& v) {
  if (v.size() != p.values().size())
    throw GridTooSmall("first_variation: field size mismatch");
  double vmax = 0.0;
  for (double val : v) vmax = std::max(vmax, std::abs(val));
  if (vmax == 0.0) return 0.0;
  NodeField w = v;
  for (int i = 0; i < p.nx(); ++i)
    for (int j = 0; j < p.ny(); ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * p.ny() + j;
      if (!p.is_boundary(i, j)) continue;
      if (std::abs(v[k]) > 1e-12 * vmax)
        throw BoundarySupport("first_variation: speed must vanish on the boundary");
      w[k] = 0.0;  // flush rounding residue so the ring is exactly fixed
    }
  const double eps = 1e-2 / vmax;
  auto central = [&](double e) {
    return (perturbed_area(p, spec, w, e) - perturbed_area(p, spec, w, -e)) / (2.0 * e);
  };
  const double d1 = central(eps);
  const double d2 = central(0.5 * eps);
  return (4.0 * d2 - d1) / 3.0;  // Richardson in eps^2
}

}  // namespace phimin
