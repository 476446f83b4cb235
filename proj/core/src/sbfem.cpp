#include "octdyn/sbfem.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

namespace octdyn {

namespace {

constexpr double kGauss2 = 0.5773502691896257;  // 1/sqrt(3)

struct QuadraturePoint {
  double eta, zeta, weight;
};

// 2x2 Gauss for quads; 3-point edge-midpoint rule for triangles (degree 2).
const std::vector<QuadraturePoint>& quadrature(bool quad) {
  static const std::vector<QuadraturePoint> q4 = {{-kGauss2, -kGauss2, 1.0},
                                                  {kGauss2, -kGauss2, 1.0},
                                                  {kGauss2, kGauss2, 1.0},
                                                  {-kGauss2, kGauss2, 1.0}};
  static const std::vector<QuadraturePoint> t3 = {
      {0.5, 0.0, 1.0 / 6.0}, {0.5, 0.5, 1.0 / 6.0}, {0.0, 0.5, 1.0 / 6.0}};
  return quad ? q4 : t3;
}

// Voigt strain selectors: L_x, L_y, L_z with ordering (xx, yy, zz, yz, zx, xy).
using Mat63 = Eigen::Matrix<double, 6, 3>;
const std::array<Mat63, 3>& strain_selectors() {
  static const std::array<Mat63, 3> L = [] {
    std::array<Mat63, 3> l;
    for (auto& m : l) m.setZero();
    l[0](0, 0) = 1.0;  // exx += u,x
    l[0](4, 2) = 1.0;  // gzx += w,x
    l[0](5, 1) = 1.0;  // gxy += v,x
    l[1](1, 1) = 1.0;  // eyy += v,y
    l[1](3, 2) = 1.0;  // gyz += w,y
    l[1](5, 0) = 1.0;  // gxy += u,y
    l[2](2, 2) = 1.0;  // ezz += w,z
    l[2](3, 1) = 1.0;  // gyz += v,z
    l[2](4, 0) = 1.0;  // gzx += u,z
    return l;
  }();
  return L;
}

}  // namespace

Mat6 elasticity_matrix(double E, double nu) {
  if (!(E > 0.0) || !(nu > -1.0 && nu < 0.5)) throw Error("inadmissible elastic constants");
  Mat6 D = Mat6::Zero();
  const double c = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double g = E / (2.0 * (1.0 + nu));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) D(i, j) = (i == j) ? c * (1.0 - nu) : c * nu;
  for (int i = 3; i < 6; ++i) D(i, i) = g;
  return D;
}

void shape_eval(bool quad, double eta, double zeta, double* N, double* dN_deta,
                double* dN_dzeta) {
  constexpr double tol = 1e-12;
  if (quad) {
    if (std::abs(eta) > 1.0 + tol || std::abs(zeta) > 1.0 + tol)
      throw Error("quad local coordinates out of range");
    const double em = 1.0 - eta, ep = 1.0 + eta;
    const double zm = 1.0 - zeta, zp = 1.0 + zeta;
    N[0] = 0.25 * em * zm;
    N[1] = 0.25 * ep * zm;
    N[2] = 0.25 * ep * zp;
    N[3] = 0.25 * em * zp;
    dN_deta[0] = -0.25 * zm;
    dN_deta[1] = 0.25 * zm;
    dN_deta[2] = 0.25 * zp;
    dN_deta[3] = -0.25 * zp;
    dN_dzeta[0] = -0.25 * em;
    dN_dzeta[1] = -0.25 * ep;
    dN_dzeta[2] = 0.25 * ep;
    dN_dzeta[3] = 0.25 * em;
  } else {
    if (eta < -tol || zeta < -tol || eta + zeta > 1.0 + tol)
      throw Error("triangle local coordinates out of range");
    N[0] = 1.0 - eta - zeta;
    N[1] = eta;
    N[2] = zeta;
    dN_deta[0] = -1.0;
    dN_deta[1] = 1.0;
    dN_deta[2] = 0.0;
    dN_dzeta[0] = -1.0;
    dN_dzeta[1] = 0.0;
    dN_dzeta[2] = 1.0;
  }
}

StrainOperators strain_operators_at(const CellGeometry& geom, std::size_t element, double eta,
                                    double zeta) {
  if (element >= geom.surface.size()) throw Error("strain_operators_at: element out of range");
  const SurfaceElement& el = geom.surface[element];
  const int m = el.size();
  double N[4], dNe[4], dNz[4];
  shape_eval(el.quad, eta, zeta, N, dNe, dNz);

  Vec3 x = Vec3::Zero(), xe = Vec3::Zero(), xz = Vec3::Zero();
  for (int a = 0; a < m; ++a) {
    const Vec3& p = geom.nodes[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])];
    x += N[a] * p;
    xe += dNe[a] * p;
    xz += dNz[a] * p;
  }
  Mat3 J;
  J.row(0) = x.transpose();
  J.row(1) = xe.transpose();
  J.row(2) = xz.transpose();
  StrainOperators out;
  out.detJ = J.determinant();
  if (!(out.detJ > 0.0)) throw Error("non-positive boundary Jacobian");
  const Mat3 Jinv = J.inverse();

  const auto& L = strain_selectors();
  Mat63 b1 = Mat63::Zero(), b2 = Mat63::Zero(), b3 = Mat63::Zero();
  for (int k = 0; k < 3; ++k) {
    b1 += Jinv(k, 0) * L[static_cast<std::size_t>(k)];
    b2 += Jinv(k, 1) * L[static_cast<std::size_t>(k)];
    b3 += Jinv(k, 2) * L[static_cast<std::size_t>(k)];
  }
  out.B1.setZero(6, 3 * m);
  out.B2.setZero(6, 3 * m);
  for (int a = 0; a < m; ++a) {
    out.B1.middleCols(3 * a, 3) = N[a] * b1;
    out.B2.middleCols(3 * a, 3) = dNe[a] * b2 + dNz[a] * b3;
  }
  return out;
}

CellCoefficients cell_coefficients(const CellGeometry& geom, const Mat6& D, double rho) {
  const int ndof = geom.n_dof();
  CellCoefficients coef;
  coef.E0 = MatrixXd::Zero(ndof, ndof);
  coef.E1 = MatrixXd::Zero(ndof, ndof);
  coef.E2 = MatrixXd::Zero(ndof, ndof);
  coef.M0 = MatrixXd::Zero(ndof, ndof);

  const auto& L = strain_selectors();

  for (std::size_t se = 0; se < geom.surface.size(); ++se) {
    const SurfaceElement& el = geom.surface[se];
    const int m = el.size();
    const int edof = 3 * m;

    MatrixXd e0 = MatrixXd::Zero(edof, edof);
    MatrixXd e1 = MatrixXd::Zero(edof, edof);
    MatrixXd e2 = MatrixXd::Zero(edof, edof);
    MatrixXd m0 = MatrixXd::Zero(edof, edof);

    double N[4], dNe[4], dNz[4];
    for (const auto& qp : quadrature(el.quad)) {
      shape_eval(el.quad, qp.eta, qp.zeta, N, dNe, dNz);

      Vec3 x = Vec3::Zero(), xe = Vec3::Zero(), xz = Vec3::Zero();
      for (int a = 0; a < m; ++a) {
        const Vec3& p = geom.nodes[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])];
        x += N[a] * p;
        xe += dNe[a] * p;
        xz += dNz[a] * p;
      }
      Mat3 J;
      J.row(0) = x.transpose();
      J.row(1) = xe.transpose();
      J.row(2) = xz.transpose();
      const double detJ = J.determinant();
      if (!(detJ > 0.0))
        throw Error("non-positive boundary Jacobian on surface element " + std::to_string(se));
      const Mat3 Jinv = J.inverse();

      Mat63 b1 = Mat63::Zero(), b2 = Mat63::Zero(), b3 = Mat63::Zero();
      for (int k = 0; k < 3; ++k) {
        b1 += Jinv(k, 0) * L[static_cast<std::size_t>(k)];
        b2 += Jinv(k, 1) * L[static_cast<std::size_t>(k)];
        b3 += Jinv(k, 2) * L[static_cast<std::size_t>(k)];
      }

      MatrixXd B1(6, edof), B2(6, edof), Nu(3, edof);
      B1.setZero();
      B2.setZero();
      Nu.setZero();
      for (int a = 0; a < m; ++a) {
        B1.middleCols(3 * a, 3) = N[a] * b1;
        B2.middleCols(3 * a, 3) = dNe[a] * b2 + dNz[a] * b3;
        for (int d = 0; d < 3; ++d) Nu(d, 3 * a + d) = N[a];
      }

      const double w = qp.weight * detJ;
      e0.noalias() += w * B1.transpose() * D * B1;
      e1.noalias() += w * B2.transpose() * D * B1;
      e2.noalias() += w * B2.transpose() * D * B2;
      m0.noalias() += (w * rho) * Nu.transpose() * Nu;
    }

    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int da = 0; da < 3; ++da)
          for (int db = 0; db < 3; ++db) {
            const int ga = 3 * el.nodes[static_cast<std::size_t>(a)] + da;
            const int gb = 3 * el.nodes[static_cast<std::size_t>(b)] + db;
            coef.E0(ga, gb) += e0(3 * a + da, 3 * b + db);
            coef.E1(ga, gb) += e1(3 * a + da, 3 * b + db);
            coef.E2(ga, gb) += e2(3 * a + da, 3 * b + db);
            coef.M0(ga, gb) += m0(3 * a + da, 3 * b + db);
          }
  }

  // Enforce the structural symmetries exactly (integration already yields
  // them to roundoff).
  coef.E0 = 0.5 * (coef.E0 + coef.E0.transpose()).eval();
  coef.E2 = 0.5 * (coef.E2 + coef.E2.transpose()).eval();
  coef.M0 = 0.5 * (coef.M0 + coef.M0.transpose()).eval();
  return coef;
}

RadialSolution radial_eigensolve(const CellCoefficients& coef) {
  const int n = static_cast<int>(coef.E0.rows());

  Eigen::LLT<MatrixXd> llt(coef.E0);
  if (llt.info() != Eigen::Success) throw Error("E0 is not positive definite");
  const MatrixXd E0inv_E1t = llt.solve(coef.E1.transpose());
  const MatrixXd E0inv = llt.solve(MatrixXd::Identity(n, n));

  // First-order form in [phi; q/sigma] with q = (s E0 + E1^T) phi.  The
  // force block is rescaled by sigma ~ |E0| so the companion matrix stays
  // O(1) for any stiffness scale; the exponents are unaffected.
  const double sigma = std::max(coef.E0.cwiseAbs().maxCoeff(), 1e-300);
  MatrixXd A(2 * n, 2 * n);
  A.topLeftCorner(n, n) = -E0inv_E1t;
  A.topRightCorner(n, n) = sigma * E0inv;
  A.bottomLeftCorner(n, n) = (coef.E2 - coef.E1 * E0inv_E1t) / sigma;
  A.bottomRightCorner(n, n) = coef.E1 * E0inv - MatrixXd::Identity(n, n);

  Eigen::EigenSolver<MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw Error("radial eigensolver failed");

  constexpr double select_tol = 1e-10;
  std::vector<int> keep;
  for (int i = 0; i < 2 * n; ++i)
    if (es.eigenvalues()[i].real() >= -select_tol) keep.push_back(i);
  if (static_cast<int>(keep.size()) != n)
    throw Error("radial mode selection found " + std::to_string(keep.size()) + " of " +
                std::to_string(n) + " expected modes");

  // Selected modes as (exponent, stacked [phi; q/sigma] vector).
  std::vector<std::complex<double>> sval(static_cast<std::size_t>(n));
  MatrixXcd svec(2 * n, n);
  for (int i = 0; i < n; ++i) {
    sval[static_cast<std::size_t>(i)] = es.eigenvalues()[keep[static_cast<std::size_t>(i)]];
    svec.col(i) = es.eigenvectors().col(keep[static_cast<std::size_t>(i)]);
  }

  // Repeated eigenvalues (rigid modes, symmetry multiplets) come back from
  // the QR algorithm with near-parallel eigenvectors.  Cluster the spectrum
  // and rebuild every multiple cluster from the SVD nullspace of A - s I,
  // which yields an orthonormal basis of the invariant subspace.
  std::vector<int> cluster_of(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) cluster_of[static_cast<std::size_t>(i)] = i;
  auto root_of = [&](int i) {
    while (cluster_of[static_cast<std::size_t>(i)] != i) i = cluster_of[static_cast<std::size_t>(i)];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double tol = 1e-7 * (1.0 + std::abs(sval[static_cast<std::size_t>(i)]));
      if (std::abs(sval[static_cast<std::size_t>(i)] - sval[static_cast<std::size_t>(j)]) <= tol)
        cluster_of[static_cast<std::size_t>(root_of(j))] = root_of(i);
    }
  std::map<int, std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters[root_of(i)].push_back(i);

  struct Mode {
    std::complex<double> s;
    VectorXcd v;  // stacked, scaled space
  };
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(n));

  std::vector<std::pair<std::complex<double>, std::vector<int>>> ordered;
  for (auto& [root, members] : clusters) {
    std::complex<double> mean(0.0, 0.0);
    for (const int m : members) mean += sval[static_cast<std::size_t>(m)];
    mean /= static_cast<double>(members.size());
    ordered.emplace_back(mean, members);
  }
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return std::abs(a.first.imag()) < std::abs(b.first.imag());
  });

  const double ctol_im = 1e-7;
  for (auto& [mean, members] : ordered) {
    const int k = static_cast<int>(members.size());
    if (std::abs(mean.imag()) <= ctol_im * (1.0 + std::abs(mean))) {
      // Real cluster.
      const double sbar = mean.real();
      if (k == 1 && sval[static_cast<std::size_t>(members[0])].imag() == 0.0) {
        modes.push_back({std::complex<double>(sbar, 0.0), svec.col(members[0])});
        continue;
      }
      Eigen::JacobiSVD<MatrixXd> svd(A - sbar * MatrixXd::Identity(2 * n, 2 * n),
                                     Eigen::ComputeFullV);
      for (int j = k - 1; j >= 0; --j)
        modes.push_back({std::complex<double>(sbar, 0.0),
                         svd.matrixV().col(2 * n - 1 - j).cast<std::complex<double>>()});
    } else if (mean.imag() > 0.0) {
      // Complex cluster; its mirror (negative imaginary part) is emitted
      // alongside so conjugate pairs stay adjacent.
      if (k == 1) {
        modes.push_back({sval[static_cast<std::size_t>(members[0])], svec.col(members[0])});
        modes.push_back({std::conj(sval[static_cast<std::size_t>(members[0])]),
                         svec.col(members[0]).conjugate()});
        continue;
      }
      MatrixXcd B = A.cast<std::complex<double>>();
      B.diagonal().array() -= mean;
      Eigen::JacobiSVD<MatrixXcd> svd(B, Eigen::ComputeFullV);
      for (int j = k - 1; j >= 0; --j) {
        const VectorXcd v = svd.matrixV().col(2 * n - 1 - j);
        modes.push_back({mean, v});
        modes.push_back({std::conj(mean), v.conjugate()});
      }
    }
    // Clusters with mean.imag() < 0 are emitted by their mirror above.
  }
  if (static_cast<int>(modes.size()) != n)
    throw Error("complex radial modes do not pair into conjugates");

  RadialSolution sol;
  sol.s.resize(n);
  sol.phi_u.resize(n, n);
  sol.phi_q.resize(n, n);
  for (int i = 0; i < n; ++i) {
    sol.s[i] = modes[static_cast<std::size_t>(i)].s;
    sol.phi_u.col(i) = modes[static_cast<std::size_t>(i)].v.head(n);
    sol.phi_q.col(i) = sigma * modes[static_cast<std::size_t>(i)].v.tail(n);
  }

  // Real combination: conjugate pairs become (Re, Im) column pairs, which
  // leaves K = phi_q phi_u^{-1} unchanged.
  sol.phi_u_real.resize(n, n);
  sol.phi_q_real.resize(n, n);
  for (int i = 0; i < n;) {
    if (sol.s[i].imag() == 0.0) {
      sol.phi_u_real.col(i) = sol.phi_u.col(i).real();
      sol.phi_q_real.col(i) = sol.phi_q.col(i).real();
      ++i;
      continue;
    }
    if (i + 1 >= n || sol.s[i + 1] != std::conj(sol.s[i]))
      throw Error("complex radial modes do not pair into conjugates");
    sol.phi_u_real.col(i) = sol.phi_u.col(i).real();
    sol.phi_u_real.col(i + 1) = sol.phi_u.col(i).imag();
    sol.phi_q_real.col(i) = sol.phi_q.col(i).real();
    sol.phi_q_real.col(i + 1) = sol.phi_q.col(i).imag();
    i += 2;
  }

  // Joint column normalization (K and M are invariant under it).
  for (int i = 0; i < n; ++i) {
    const double norm = sol.phi_u_real.col(i).norm();
    if (norm > 0.0) {
      sol.phi_u_real.col(i) /= norm;
      sol.phi_q_real.col(i) /= norm;
    }
    const double cnorm = sol.phi_u.col(i).norm();
    if (cnorm > 0.0) {
      sol.phi_u.col(i) /= cnorm;
      sol.phi_q.col(i) /= cnorm;
    }
  }

  Eigen::JacobiSVD<MatrixXd> svd(sol.phi_u_real);
  const double smin = svd.singularValues().minCoeff();
  sol.cond_phi_u = smin > 0.0 ? svd.singularValues().maxCoeff() / smin
                              : std::numeric_limits<double>::infinity();
  if (!(sol.cond_phi_u < 1e12))
    throw Error("near-defective displacement mode matrix (cond " +
                std::to_string(sol.cond_phi_u) + ")");
  return sol;
}

MatrixXd stiffness(const RadialSolution& sol) {
  const Eigen::PartialPivLU<MatrixXd> lu(sol.phi_u_real.transpose());
  // K = phi_q phi_u^{-1} = (phi_u^{-T} phi_q^T)^T
  MatrixXd K = lu.solve(sol.phi_q_real.transpose()).transpose();
  const double norm = K.cwiseAbs().maxCoeff();
  const double asym = (K - K.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-8 * std::max(norm, 1e-300)))
    throw Error("stiffness asymmetry " + std::to_string(asym / norm) +
                " exceeds tolerance (bad mode selection)");
  return 0.5 * (K + K.transpose()).eval();
}

MatrixXd consistent_mass(const RadialSolution& sol, const MatrixXd& M0) {
  const int n = static_cast<int>(sol.s.size());
  MatrixXcd m0 = sol.phi_u.transpose() * M0.cast<std::complex<double>>() * sol.phi_u;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::complex<double> denom = sol.s[i] + sol.s[j] + 3.0;
      m0(i, j) /= denom;
    }
  const Eigen::PartialPivLU<MatrixXcd> lu(sol.phi_u.transpose());
  const MatrixXcd Y = lu.solve(m0);                      // phi_u^{-T} m
  const MatrixXcd Mc = lu.solve(Y.transpose()).transpose();  // ... phi_u^{-1}

  const double re = Mc.real().cwiseAbs().maxCoeff();
  if (Mc.imag().cwiseAbs().maxCoeff() > 1e-8 * re)
    throw Error("consistent mass has a non-negligible imaginary part");
  MatrixXd M = 0.5 * (Mc.real() + Mc.real().transpose());
  if (Eigen::LLT<MatrixXd>(M).info() != Eigen::Success)
    throw Error("consistent mass is not positive definite");
  return M;
}

VectorXd lump_mass(const MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  VectorXd d = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = i % 3; j < n; j += 3) d[i] += M(i, j);
  for (int i = 0; i < n; ++i)
    if (!(d[i] > 0.0))
      throw Error("nonpositive lumped mass at dof " + std::to_string(i) +
                  " (ill-shaped element)");
  return d;
}

double element_max_frequency(const MatrixXd& K, const VectorXd& M_diag) {
  const int n = static_cast<int>(K.rows());
  if (M_diag.size() != n) throw Error("element_max_frequency: size mismatch");
  if (!(M_diag.minCoeff() > 0.0)) throw Error("element_max_frequency: mass must be positive");
  const VectorXd inv_sqrt = M_diag.cwiseSqrt().cwiseInverse();
  const MatrixXd B = inv_sqrt.asDiagonal() * K * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (B + B.transpose()),
                                             Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("element frequency solve failed");
  const double lam = es.eigenvalues().maxCoeff();
  return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

}  // namespace octdyn
