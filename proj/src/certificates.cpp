#include "orbitcert/certificates.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "orbitcert/io.hpp"

namespace orbitcert {

namespace {

double certificate_scale(const HermitianMatrix& lhs,
                         const HermitianMatrix& rhs) {
  return 1.0 + std::max(max_abs(lhs.mat()), max_abs(rhs.mat()));
}

double measure_gap(Direction direction, const HermitianMatrix& lhs,
                   const HermitianMatrix& rhs) {
  return direction == Direction::lhs_ge_rhs ? psd_gap(rhs, lhs)
                                            : psd_gap(lhs, rhs);
}

bool transform_ok(const Transform& t, std::string* why) {
  const Matrix& m = t.matrix.mat();
  if (t.kind == TransformKind::unitary && m.rows() != m.cols()) {
    if (why) *why = "unitary transform is not square";
    return false;
  }
  if (t.kind == TransformKind::isometry && m.rows() <= m.cols()) {
    if (why) *why = "isometry transform must be tall";
    return false;
  }
  const Matrix gram = m.adjoint() * m;
  const double dev =
      max_abs(gram - Matrix::Identity(m.cols(), m.cols()));
  if (dev > tol::ortho) {
    if (why)
      *why = "transform orthonormality deviation " + std::to_string(dev);
    return false;
  }
  return true;
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix embed_top(Eigen::Index n) {  // iota_1 = (I; 0)
  Matrix e = Matrix::Zero(2 * n, n);
  e.topRows(n) = Matrix::Identity(n, n);
  return e;
}

Matrix embed_bottom(Eigen::Index n) {  // iota_2 = (0; I)
  Matrix e = Matrix::Zero(2 * n, n);
  e.bottomRows(n) = Matrix::Identity(n, n);
  return e;
}

PsdMatrix abs_square_psd(const Matrix& m) {
  return PsdMatrix(m.adjoint() * m);
}

}  // namespace

std::string direction_name(Direction d) {
  switch (d) {
    case Direction::lhs_le_rhs: return "lhs_le_rhs";
    case Direction::lhs_ge_rhs: return "lhs_ge_rhs";
    case Direction::equality: return "equality";
  }
  return "?";
}

Direction direction_from_name(const std::string& s) {
  if (s == "lhs_le_rhs") return Direction::lhs_le_rhs;
  if (s == "lhs_ge_rhs") return Direction::lhs_ge_rhs;
  if (s == "equality") return Direction::equality;
  throw UsageError("unknown certificate direction: " + s);
}

Certificate make_certificate(std::string statement,
                             std::vector<Transform> transforms,
                             Direction direction, HermitianMatrix lhs,
                             HermitianMatrix rhs, double tol_used) {
  Certificate c{std::move(statement), std::move(transforms), direction,
                std::move(lhs),       std::move(rhs),        0.0,
                tol_used};
  c.gap_min_eig = measure_gap(direction, c.lhs, c.rhs);
  return c;
}

bool verify_certificate(const Certificate& c, std::string* why) {
  for (const auto& t : c.transforms)
    if (!transform_ok(t, why)) return false;
  const double scale = certificate_scale(c.lhs, c.rhs);
  const double gap = measure_gap(c.direction, c.lhs, c.rhs);
  if (std::abs(gap - c.gap_min_eig) > 1e-9 * scale) {
    if (why)
      *why = "stored gap " + std::to_string(c.gap_min_eig) +
             " disagrees with recomputed " + std::to_string(gap);
    return false;
  }
  if (c.direction == Direction::equality) {
    const double dev = max_abs(c.rhs.mat() - c.lhs.mat());
    if (dev > tol::identity * scale) {
      if (why) *why = "equality deviation " + std::to_string(dev);
      return false;
    }
  } else if (gap < -c.tol_used * scale) {
    if (why) *why = "gap " + std::to_string(gap) + " below tolerance";
    return false;
  }
  return true;
}

nlohmann::json certificate_to_json(const Certificate& c) {
  nlohmann::json transforms = nlohmann::json::array();
  for (const auto& t : c.transforms) {
    nlohmann::json tj = matrix_to_json(t.matrix.mat());
    tj["kind"] = t.kind == TransformKind::unitary ? "unitary" : "isometry";
    transforms.push_back(std::move(tj));
  }
  return {{"statement", c.statement},
          {"direction", direction_name(c.direction)},
          {"gap_min_eig", c.gap_min_eig},
          {"tol_used", c.tol_used},
          {"transforms", transforms},
          {"lhs", matrix_to_json(c.lhs.mat())},
          {"rhs", matrix_to_json(c.rhs.mat())}};
}

Certificate certificate_from_json(const nlohmann::json& j) {
  std::vector<Transform> transforms;
  for (const auto& tj : j.at("transforms")) {
    const std::string kind = tj.at("kind").get<std::string>();
    if (kind != "unitary" && kind != "isometry")
      throw UsageError("unknown transform kind: " + kind);
    transforms.push_back(
        {kind == "unitary" ? TransformKind::unitary : TransformKind::isometry,
         ComplexMatrix(matrix_from_json(tj))});
  }
  Certificate c{j.at("statement").get<std::string>(),
                std::move(transforms),
                direction_from_name(j.at("direction").get<std::string>()),
                HermitianMatrix(matrix_from_json(j.at("lhs"))),
                HermitianMatrix(matrix_from_json(j.at("rhs"))),
                j.at("gap_min_eig").get<double>(),
                j.at("tol_used").get<double>()};
  return c;
}

ComplexMatrix align_unitary(const PsdMatrix& S, const PsdMatrix& T,
                            double slack) {
  if (S.dim() != T.dim()) throw ShapeError("align_unitary: dimension mismatch");
  const SpectralDecomposition sd_s = spectral_decomposition(S.hermitian());
  const SpectralDecomposition sd_t = spectral_decomposition(T.hermitian());
  std::vector<int> bad;
  for (Eigen::Index j = 0; j < S.dim(); ++j)
    if (sd_s.eigenvalues(j) > sd_t.eigenvalues(j) + slack)
      bad.push_back(static_cast<int>(j));
  if (!bad.empty())
    throw DominanceError("align_unitary: eigenvalue dominance violated at " +
                             std::to_string(bad.size()) + " rank(s)",
                         bad);
  return ComplexMatrix(sd_t.frame * sd_s.frame.adjoint());
}

Certificate key2_certificate(const PsdMatrix& X, const PsdMatrix& Y,
                             const ScalarFn& g, bool convex) {
  if (X.dim() != Y.dim())
    throw ShapeError("key2_certificate: dimension mismatch");
  const PsdMatrix mid_g(
      apply_spectral_function(PsdMatrix(0.5 * (X.mat() + Y.mat())), g).mat());
  const PsdMatrix mean_g(0.5 * (apply_spectral_function(X, g).mat() +
                                apply_spectral_function(Y, g).mat()));
  if (convex) {
    const ComplexMatrix W = align_unitary(mid_g, mean_g);
    return make_certificate(
        "key2",
        {{TransformKind::unitary, W}},
        Direction::lhs_le_rhs,
        HermitianMatrix(W.mat() * mid_g.mat() * W.mat().adjoint()),
        mean_g.hermitian());
  }
  const SpectralDecomposition sd_mid = spectral_decomposition(mid_g.hermitian());
  const SpectralDecomposition sd_mean =
      spectral_decomposition(mean_g.hermitian());
  std::vector<int> bad;
  for (Eigen::Index j = 0; j < X.dim(); ++j)
    if (sd_mean.eigenvalues(j) > sd_mid.eigenvalues(j) + tol::align_slack)
      bad.push_back(static_cast<int>(j));
  if (!bad.empty())
    throw DominanceError("key2_certificate: concave dominance violated", bad);
  // W g(mid) W* >= mean: rebuild mid's spectrum on mean's frame.
  const ComplexMatrix W(sd_mean.frame * sd_mid.frame.adjoint());
  return make_certificate(
      "key2",
      {{TransformKind::unitary, W}},
      Direction::lhs_ge_rhs,
      HermitianMatrix(W.mat() * mid_g.mat() * W.mat().adjoint()),
      mean_g.hermitian());
}

std::pair<ComplexMatrix, ComplexMatrix> block_decomposition(
    const PsdMatrix& H) {
  const Eigen::Index dim = H.dim();
  if (dim % 2 != 0)
    throw ShapeError("block_decomposition: dimension must be even");
  const Eigen::Index n = dim / 2;

  const Matrix sqrt_h =
      apply_spectral_function(H, [](double t) {
        return std::sqrt(std::max(t, 0.0));
      }).mat();
  const Matrix left = sqrt_h.leftCols(n);    // left*left^adj has spectrum of X
  const Matrix right = sqrt_h.rightCols(n);

  const Matrix x = H.mat().topLeftCorner(n, n);
  const Matrix z = H.mat().bottomRightCorner(n, n);

  auto align_frames = [dim](const Matrix& full, const Matrix& padded) {
    const SpectralDecomposition a =
        spectral_decomposition(HermitianMatrix(full));
    const SpectralDecomposition b =
        spectral_decomposition(HermitianMatrix(padded));
    return ComplexMatrix(a.frame * b.frame.adjoint());
  };

  const ComplexMatrix u = align_frames(
      left * left.adjoint(), direct_sum(x, Matrix::Zero(n, n)));
  const ComplexMatrix v = align_frames(
      right * right.adjoint(), direct_sum(Matrix::Zero(n, n), z));
  return {u, v};
}

Certificate parallelogram_isometries(const ComplexMatrix& A,
                                     const ComplexMatrix& B) {
  if (!A.square() || !B.square() || A.rows() != B.rows())
    throw ShapeError("parallelogram_isometries: A, B must match and be square");
  const Eigen::Index n = A.rows();

  Matrix stacked(2 * n, 2 * n);  // ((A, B), (B, A))
  stacked.topLeftCorner(n, n) = A.mat();
  stacked.topRightCorner(n, n) = B.mat();
  stacked.bottomLeftCorner(n, n) = B.mat();
  stacked.bottomRightCorner(n, n) = A.mat();

  const auto [u2, v2] = block_decomposition(abs_square_psd(stacked));

  Matrix hadamard = Matrix::Zero(2 * n, 2 * n);
  const Matrix eye = Matrix::Identity(n, n);
  hadamard.topLeftCorner(n, n) = eye;
  hadamard.topRightCorner(n, n) = eye;
  hadamard.bottomLeftCorner(n, n) = eye;
  hadamard.bottomRightCorner(n, n) = -eye;
  hadamard *= 1.0 / std::sqrt(2.0);

  const ComplexMatrix u_iso(hadamard * u2.mat() * embed_top(n));
  const ComplexMatrix v_iso(hadamard * v2.mat() * embed_bottom(n));

  const Matrix gram = A.mat().adjoint() * A.mat() +
                      B.mat().adjoint() * B.mat();
  const Matrix sum = A.mat() + B.mat();
  const Matrix diff = A.mat() - B.mat();
  const HermitianMatrix lhs(
      direct_sum(sum.adjoint() * sum, diff.adjoint() * diff));
  const HermitianMatrix rhs(u_iso.mat() * gram * u_iso.mat().adjoint() +
                            v_iso.mat() * gram * v_iso.mat().adjoint());
  return make_certificate("theorem3",
                          {{TransformKind::isometry, u_iso},
                           {TransformKind::isometry, v_iso}},
                          Direction::equality, lhs, rhs);
}

std::pair<Certificate, Certificate> cartesian_certificates(
    const ComplexMatrix& Z) {
  if (!Z.square()) throw ShapeError("cartesian_certificates: Z must be square");
  const Eigen::Index n = Z.rows();
  const Matrix x = 0.5 * (Z.mat() + Z.mat().adjoint());
  const Matrix y = (Z.mat() - Z.mat().adjoint()) / Complex(0.0, 2.0);

  Certificate squared = parallelogram_isometries(
      ComplexMatrix(x), ComplexMatrix(Complex(0.0, 1.0) * y));
  squared.statement = "cartesian_squared";

  // lhs blocks as produced: |Z|^2 then |Z*|^2.
  const PsdMatrix abs_z(apply_spectral_function(
      abs_square_psd(Z.mat()), [](double t) {
        return std::sqrt(std::max(t, 0.0));
      }).mat());
  const PsdMatrix abs_z_star(apply_spectral_function(
      PsdMatrix(Z.mat() * Z.mat().adjoint()), [](double t) {
        return std::sqrt(std::max(t, 0.0));
      }).mat());

  const Matrix sqrt_m = apply_spectral_function(
      PsdMatrix(x * x + y * y), [](double t) {
        return std::sqrt(std::max(t, 0.0));
      }).mat();

  const Matrix& u0 = squared.transforms[0].matrix.mat();
  const Matrix& v0 = squared.transforms[1].matrix.mat();

  // Split sqrt(S + T) exactly as h(S+T) S h(S+T) + h(S+T) T h(S+T) with
  // h(t) = t^{-1/4}; each summand is dominated rank-by-rank by the square
  // root of the corresponding term, so a frame alignment certifies it.
  const Matrix x_hat = u0 * sqrt_m * sqrt_m * u0.adjoint();
  const Matrix y_hat = v0 * sqrt_m * sqrt_m * v0.adjoint();
  const PsdMatrix total(x_hat + y_hat);
  const double top = max_abs(total.mat());
  const double cut = 1e-13 * (top > 0.0 ? top : 1.0);
  const Matrix h = apply_spectral_function(total, [cut](double t) {
                     return t > cut ? std::pow(t, -0.25) : 0.0;
                   }).mat();
  const PsdMatrix mx(h * x_hat * h);
  const PsdMatrix my(h * y_hat * h);
  const PsdMatrix sqrt_x_hat(u0 * sqrt_m * u0.adjoint());
  const PsdMatrix sqrt_y_hat(v0 * sqrt_m * v0.adjoint());
  const Matrix wu = align_unitary(mx, sqrt_x_hat).mat();
  const Matrix wv = align_unitary(my, sqrt_y_hat).mat();

  // Rotate the second block from |Z*| back to |Z| for the displayed form.
  const SpectralDecomposition sd_z = spectral_decomposition(abs_z.hermitian());
  const SpectralDecomposition sd_zs =
      spectral_decomposition(abs_z_star.hermitian());
  const Matrix omega_small = sd_zs.frame * sd_z.frame.adjoint();
  const Matrix omega = direct_sum(Matrix::Identity(n, n), omega_small);

  const ComplexMatrix u_final(omega.adjoint() * wu.adjoint() * u0);
  const ComplexMatrix v_final(omega.adjoint() * wv.adjoint() * v0);
  const HermitianMatrix lhs(direct_sum(abs_z.mat(), abs_z.mat()));
  const HermitianMatrix rhs(
      u_final.mat() * sqrt_m * u_final.mat().adjoint() +
      v_final.mat() * sqrt_m * v_final.mat().adjoint());
  Certificate root = make_certificate("cartesian_sqrt",
                                      {{TransformKind::isometry, u_final},
                                       {TransformKind::isometry, v_final}},
                                      Direction::lhs_le_rhs, lhs, rhs);
  return {std::move(squared), std::move(root)};
}

std::pair<ComplexMatrix, ComplexMatrix> commuting_key1(const PsdMatrix& X,
                                                       const PsdMatrix& Y,
                                                       const ScalarFn& g,
                                                       bool convex) {
  (void)g;
  (void)convex;
  if (X.dim() != Y.dim()) throw ShapeError("commuting_key1: dimension mismatch");
  const Matrix commutator = X.mat() * Y.mat() - Y.mat() * X.mat();
  const double scale = (1.0 + max_abs(X.mat())) * (1.0 + max_abs(Y.mat()));
  if (max_abs(commutator) > tol::commute * scale)
    throw DomainError("commuting_key1: inputs do not commute");
  // Simultaneously diagonal g(X), g(Y), g(X+Y) pair up eigenvalues along the
  // common frame; scalar super/sub-additivity then certifies with identities.
  const Matrix eye = Matrix::Identity(X.dim(), X.dim());
  return {ComplexMatrix(eye), ComplexMatrix(eye)};
}

Certificate theorem1_certificate(const ComplexMatrix& A, const ComplexMatrix& B,
                                 double p, const Key1Provider& key1_provider) {
  if (!A.square() || !B.square() || A.rows() != B.rows())
    throw ShapeError("theorem1_certificate: A, B must match and be square");
  if (!(p > 2.0)) throw DomainError("theorem1_certificate: p must be > 2");

  const ScalarFn g = [p](double t) {
    return std::pow(std::max(t, 0.0), p / 2.0);
  };
  const PsdMatrix x = abs_square_psd(0.5 * (A.mat() + B.mat()));
  const PsdMatrix y = abs_square_psd(0.5 * (A.mat() - B.mat()));

  const auto [u0, v0] = key1_provider(x, y, g, /*convex=*/true);

  const PsdMatrix mid_pow(
      apply_spectral_function(PsdMatrix(x.mat() + y.mat()), g).mat());
  const PsdMatrix mean_pow(0.5 * (matrix_abs_power(A, p).mat() +
                                  matrix_abs_power(B, p).mat()));
  const ComplexMatrix w = align_unitary(mid_pow, mean_pow);

  const Matrix u = w.mat() * u0.mat();
  const Matrix v = w.mat() * v0.mat();
  const Matrix plus_pow = matrix_abs_power(
      ComplexMatrix(0.5 * (A.mat() + B.mat())), p).mat();
  const Matrix minus_pow = matrix_abs_power(
      ComplexMatrix(0.5 * (A.mat() - B.mat())), p).mat();
  const HermitianMatrix lhs(u * plus_pow * u.adjoint() +
                            v * minus_pow * v.adjoint());
  return make_certificate("theorem1",
                          {{TransformKind::unitary, ComplexMatrix(u)},
                           {TransformKind::unitary, ComplexMatrix(v)}},
                          Direction::lhs_le_rhs, lhs, mean_pow.hermitian());
}

Certificate direct_sum_cm_certificate(const ComplexMatrix& A,
                                      const ComplexMatrix& B, double p) {
  if (!A.square() || !B.square() || A.rows() != B.rows())
    throw ShapeError("direct_sum_cm_certificate: A, B must match");
  if (!(p > 2.0)) throw DomainError("direct_sum_cm_certificate: p must be > 2");
  const Eigen::Index n = A.rows();

  const ScalarFn g = [p](double t) {
    return std::pow(std::max(t, 0.0), p / 2.0);
  };

  const Certificate base = parallelogram_isometries(
      ComplexMatrix(0.5 * A.mat()), ComplexMatrix(0.5 * B.mat()));
  const Matrix& u_iso = base.transforms[0].matrix.mat();
  const Matrix& v_iso = base.transforms[1].matrix.mat();

  const Matrix gram_half =
      0.5 * (A.mat().adjoint() * A.mat() + B.mat().adjoint() * B.mat());
  const Matrix half_pow =
      apply_spectral_function(PsdMatrix(gram_half), g).mat();

  // (g(S) + g(T)) / 2 for S = U (M/2) U*, T = V (M/2) V*; g(0) = 0 lets g
  // pass through the isometries.
  const PsdMatrix upper(0.5 * (u_iso * half_pow * u_iso.adjoint() +
                               v_iso * half_pow * v_iso.adjoint()));

  const Matrix plus_pow = matrix_abs_power(
      ComplexMatrix(0.5 * (A.mat() + B.mat())), p).mat();
  const Matrix minus_pow = matrix_abs_power(
      ComplexMatrix(0.5 * (A.mat() - B.mat())), p).mat();
  const PsdMatrix lhs_psd(direct_sum(plus_pow, minus_pow));
  const ComplexMatrix w = align_unitary(lhs_psd, upper);

  const PsdMatrix mean_pow(0.5 * (matrix_abs_power(A, p).mat() +
                                  matrix_abs_power(B, p).mat()));
  const ComplexMatrix w2 = align_unitary(PsdMatrix(half_pow), mean_pow);

  const Matrix pre = w.mat().adjoint();
  const ComplexMatrix u_final(pre * u_iso * w2.mat().adjoint());
  const ComplexMatrix v_final(pre * v_iso * w2.mat().adjoint());
  const HermitianMatrix rhs(
      0.5 * (u_final.mat() * mean_pow.mat() * u_final.mat().adjoint() +
             v_final.mat() * mean_pow.mat() * v_final.mat().adjoint()));
  (void)n;
  return make_certificate("direct_sum_cm",
                          {{TransformKind::isometry, u_final},
                           {TransformKind::isometry, v_final}},
                          Direction::lhs_le_rhs, lhs_psd.hermitian(), rhs,
                          tol::psd);
}

}  // namespace orbitcert
