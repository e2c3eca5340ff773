#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "random.hpp"

namespace restproj {

// Matrix realization inside sl_{n+1}(R) preserving the quadratic form
//   2 x_1 x_{n+1} - sum_{i=2}^n x_i^2.
// A point (r1, w, r2) doubles as the coordinates of the complement element
// X(r1, w, r2); entry positions below follow the 1-based block layout, with
// storage 0-based.

/// The (n+1) x (n+1) symmetric matrix of the preserved form: antidiagonal
/// corners 1, middle diagonal -1.
inline Eigen::MatrixXd q0_matrix(int n) {
    if (n < 3) throw std::invalid_argument("q0_matrix: n >= 3 required");
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n + 1, n + 1);
    q(0, n) = 1.0;
    q(n, 0) = 1.0;
    for (int i = 1; i < n; ++i) q(i, i) = -1.0;
    return q;
}

struct LieCheck {
    double lie_residual = 0.0;    // |A^T Q0 + Q0 A|_F
    double trace_residual = 0.0;  // |tr A|
    bool pass = false;
};

/// Membership test for the isometry algebra: A^T Q0 + Q0 A = 0 and tr A = 0.
inline LieCheck lie_membership(const Eigen::MatrixXd& a, int n, double tolerance = 1e-12) {
    if (a.rows() != n + 1 || a.cols() != n + 1)
        throw std::invalid_argument("lie_membership: size mismatch");
    const Eigen::MatrixXd q = q0_matrix(n);
    LieCheck check;
    check.lie_residual = (a.transpose() * q + q * a).norm();
    check.trace_residual = std::fabs(a.trace());
    check.pass = check.lie_residual < tolerance && check.trace_residual < tolerance;
    return check;
}

/// The complement element X(r1, w, r2): first row carries r1 in column n,
/// the middle block is the rotation generator pairing w with the n-th axis,
/// and r2 sits in the transposed corner positions. The corner signs are the
/// unique choice making Q0 X antisymmetric, i.e. X a member of the algebra.
inline Eigen::MatrixXd embed_r(const Point& x) {
    const int n = x.n();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
    m(0, n - 1) = x.r1;
    m(n - 1, n) = x.r1;
    m(n - 1, 0) = x.r2;
    m(n, n - 1) = x.r2;
    for (int i = 0; i < n - 2; ++i) {
        m(i + 1, n - 1) = x.w[i];
        m(n - 1, i + 1) = -x.w[i];
    }
    return m;
}

/// Reads the complement coordinates back off a matrix: the n-th column
/// (1-based) holds (r1, w, ., r2) because the stabilizer algebra of e_n has
/// that column zero.
inline Point extract_r(const Eigen::MatrixXd& m, int n) {
    if (m.rows() != n + 1 || m.cols() != n + 1)
        throw std::invalid_argument("extract_r: size mismatch");
    Eigen::VectorXd w(n - 2);
    for (int i = 0; i < n - 2; ++i) w[i] = m(i + 1, n - 1);
    return Point(m(0, n - 1), std::move(w), m(n, n - 1));
}

/// The unipotent element u_t: identity plus t in the first row, t^T against
/// the last column, and |t|^2 / 2 in the corner.
inline Eigen::MatrixXd u_matrix(const Eigen::VectorXd& t) {
    const int n = static_cast<int>(t.size()) + 2;
    Eigen::MatrixXd u = Eigen::MatrixXd::Identity(n + 1, n + 1);
    for (int i = 0; i < n - 2; ++i) {
        u(0, i + 1) = t[i];
        u(i + 1, n) = t[i];
    }
    u(0, n) = 0.5 * t.squaredNorm();
    return u;
}

/// The diagonal element a_s = diag(e^s, 1, ..., 1, e^{-s}).
inline Eigen::MatrixXd a_matrix(double s, int n) {
    if (n < 3) throw std::invalid_argument("a_matrix: n >= 3 required");
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n + 1, n + 1);
    a(0, 0) = std::exp(s);
    a(n, n) = std::exp(-s);
    return a;
}

/// xi_t(X) = the r1-coordinate of u_t X u_{-t}: computed by the full dense
/// conjugation, then read off entry (1, n) in 1-based terms.
inline double xi(const Eigen::VectorXd& t, const Point& x) {
    if (static_cast<int>(t.size()) != x.n() - 2)
        throw std::invalid_argument("xi: dimension mismatch");
    const int n = x.n();
    const Eigen::MatrixXd conj =
        u_matrix(t) * embed_r(x) * u_matrix((-t).eval());
    return conj(0, n - 1);
}

struct ContractionSample {
    double s = 0.0;
    double rplus_residual = 0.0;   // |Ad(a_s) X(r1,0,0) - e^s X(r1,0,0)|_F
    double conjugate_norm = 0.0;   // |Ad(a_s) X(r1,w,r2)|_F
    double u_residual = 0.0;       // |a_s u_w a_{-s} - 1|_F
};

struct ContractionReport {
    std::vector<ContractionSample> per_s;
};

/// Flow of the diagonal subgroup: the r1-line scales by e^s under Ad(a_s)
/// (so it contracts as s -> -infinity), the middle block does not move, and
/// conjugated unipotents u_w flow to the identity.
inline ContractionReport contraction_check(const Point& x, const std::vector<double>& s_values) {
    const int n = x.n();
    ContractionReport report;
    const Eigen::MatrixXd full = embed_r(x);
    const Eigen::MatrixXd rplus = embed_r(Point(x.r1, Eigen::VectorXd::Zero(n - 2), 0.0));
    const Eigen::MatrixXd u = u_matrix(x.w);
    for (double s : s_values) {
        const Eigen::MatrixXd a = a_matrix(s, n);
        const Eigen::MatrixXd a_inv = a_matrix(-s, n);
        ContractionSample sample;
        sample.s = s;
        sample.rplus_residual = (a * rplus * a_inv - std::exp(s) * rplus).norm();
        sample.conjugate_norm = (a * full * a_inv).norm();
        sample.u_residual =
            (a * u * a_inv - Eigen::MatrixXd::Identity(n + 1, n + 1)).norm();
        report.per_s.push_back(sample);
    }
    return report;
}

/// Residual summary of the whole matrix verification at one dimension:
/// membership of random complement elements, both one-parameter group laws,
/// the diagonal contraction of the r1-line, and the agreement of xi with the
/// scalar projection under the standard family.
struct LieVerification {
    int n = 0;
    int samples = 0;
    double max_lie_residual = 0.0;
    double max_trace_residual = 0.0;
    double max_u_group_residual = 0.0;
    double max_a_group_residual = 0.0;
    double max_contraction_residual = 0.0;
    double max_xi_vs_project = 0.0;
};

inline LieVerification verify_lie_realization(int n, int samples, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("verify_lie_realization: n >= 3 required");
    Rng rng(seed);
    const auto fam = ProjectionFamily::standard(n - 2);
    LieVerification v;
    v.n = n;
    v.samples = samples;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n + 1, n + 1);
    for (int i = 0; i < samples; ++i) {
        Point x = Point::from_vector(rng.in_ball(n, 1.0));
        const auto membership = lie_membership(embed_r(x), n);
        v.max_lie_residual = std::max(v.max_lie_residual, membership.lie_residual);
        v.max_trace_residual = std::max(v.max_trace_residual, membership.trace_residual);

        Eigen::VectorXd t(n - 2), tp(n - 2);
        for (int d = 0; d < n - 2; ++d) {
            t[d] = rng.uniform(-2.0, 2.0);
            tp[d] = rng.uniform(-2.0, 2.0);
        }
        v.max_u_group_residual =
            std::max(v.max_u_group_residual,
                     (u_matrix(t) * u_matrix(tp) - u_matrix((t + tp).eval())).norm());
        const double s = rng.uniform(-2.0, 2.0);
        const double sp = rng.uniform(-2.0, 2.0);
        v.max_a_group_residual =
            std::max({v.max_a_group_residual,
                      (a_matrix(s, n) * a_matrix(sp, n) - a_matrix(s + sp, n)).norm(),
                      (a_matrix(s, n) * a_matrix(-s, n) - id).norm()});

        const auto contraction = contraction_check(x, {s});
        v.max_contraction_residual =
            std::max(v.max_contraction_residual, contraction.per_s.front().rplus_residual);

        v.max_xi_vs_project =
            std::max(v.max_xi_vs_project,
                     std::fabs(xi(t, x) - project(fam, ParamVector(t), x)));
    }
    return v;
}

}  // namespace restproj
