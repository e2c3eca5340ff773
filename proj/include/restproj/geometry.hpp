#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace restproj {

/// A point of R^n in split coordinates (r1, w, r2), w in R^{n-2}, n >= 3.
struct Point {
    double r1 = 0.0;
    Eigen::VectorXd w;
    double r2 = 0.0;

    Point() = default;
    Point(double r1_, Eigen::VectorXd w_, double r2_)
        : r1(r1_), w(std::move(w_)), r2(r2_) {}

    int n() const { return 2 + static_cast<int>(w.size()); }

    double squared_norm() const { return r1 * r1 + w.squaredNorm() + r2 * r2; }
    double norm() const { return std::sqrt(squared_norm()); }

    Eigen::VectorXd to_vector() const {
        Eigen::VectorXd v(n());
        v[0] = r1;
        v.segment(1, w.size()) = w;
        v[n() - 1] = r2;
        return v;
    }

    static Point from_vector(const Eigen::VectorXd& v) {
        if (v.size() < 3) throw std::invalid_argument("Point: need n >= 3");
        return Point(v[0], v.segment(1, v.size() - 2), v[v.size() - 1]);
    }
};

/// Projection parameter t in R^{n-2}. The admissible domain is the closed
/// annulus B = {1 <= |t| <= 2}.
struct ParamVector {
    Eigen::VectorXd t;

    ParamVector() = default;
    explicit ParamVector(Eigen::VectorXd t_) : t(std::move(t_)) {}

    int dim() const { return static_cast<int>(t.size()); }
    double norm() const { return t.norm(); }
    bool in_annulus() const {
        const double r = norm();
        return r >= 1.0 && r <= 2.0;
    }
};

/// Volume of the annulus {1 <= |t| <= 2} in R^m: omega_m * (2^m - 1).
inline double annulus_volume(int m) {
    if (m < 1) throw std::invalid_argument("annulus_volume: m >= 1 required");
    const double unit_ball =
        std::pow(std::numbers::pi, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
    return unit_ball * (std::pow(2.0, m) - 1.0);
}

/// The pair (L, q) defining the scalar projection family
///   pi_t(r1, w, r2) = r1 + w.(L t) + r2 q(t)
/// with L an isomorphism of R^{n-2} and q(t) = t' Q t a positive definite
/// quadratic form given by its symmetric matrix Q.
class ProjectionFamily {
public:
    ProjectionFamily(Eigen::MatrixXd L, Eigen::MatrixXd Q)
        : L_(std::move(L)), Q_(std::move(Q)) {
        if (L_.rows() != L_.cols() || Q_.rows() != Q_.cols() ||
            L_.rows() != Q_.rows() || L_.rows() < 1) {
            throw std::invalid_argument("ProjectionFamily: L and Q must be square of equal size >= 1");
        }
        Q_ = 0.5 * (Q_ + Q_.transpose().eval());  // symmetrize
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q_);
        q_min_ = es.eigenvalues().minCoeff();
    }

    /// The standard family: L = id, q_st(t) = |t|^2 / 2.
    static ProjectionFamily standard(int m) {
        return ProjectionFamily(Eigen::MatrixXd::Identity(m, m),
                                0.5 * Eigen::MatrixXd::Identity(m, m));
    }

    int dim() const { return static_cast<int>(L_.rows()); }
    const Eigen::MatrixXd& L() const { return L_; }
    const Eigen::MatrixXd& Q() const { return Q_; }

    double q(const Eigen::VectorXd& t) const { return t.dot(Q_ * t); }

    /// min_{|t|=1} q(t): the smallest eigenvalue of Q.
    double q_min() const { return q_min_; }

private:
    Eigen::MatrixXd L_;
    Eigen::MatrixXd Q_;
    double q_min_ = 0.0;
};

struct FamilyValidation {
    bool l_invertible = false;
    bool q_positive_definite = false;
    double det_l = 0.0;
    double l_op_norm = 0.0;  // largest singular value
    double q_min = 0.0;
    std::vector<std::string> issues;

    bool valid() const { return issues.empty(); }
};

/// Checks the family invariants and reports the constants (q_min, |L|_op)
/// that downstream bounds implicitly depend on.
inline FamilyValidation validate_family(const ProjectionFamily& fam,
                                        double tolerance = 1e-12) {
    FamilyValidation report;
    report.det_l = fam.L().determinant();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fam.L());
    report.l_op_norm = svd.singularValues().maxCoeff();
    report.q_min = fam.q_min();
    report.l_invertible = std::fabs(report.det_l) > tolerance;
    report.q_positive_definite = report.q_min > tolerance;
    if (!report.l_invertible) report.issues.push_back("L is singular (|det L| <= tolerance)");
    if (!report.q_positive_definite) report.issues.push_back("q is not positive definite (q_min <= tolerance)");
    return report;
}

inline void require_same_dim(const ProjectionFamily& fam, const ParamVector& t,
                             const Point& X) {
    if (fam.dim() != t.dim() || fam.dim() != static_cast<int>(X.w.size())) {
        throw std::invalid_argument("dimension mismatch between family, parameter and point");
    }
}

/// pi_t(X) = r1 + w.(L t) + r2 q(t), evaluated exactly in this order.
inline double project(const ProjectionFamily& fam, const ParamVector& t, const Point& X) {
    require_same_dim(fam, t, X);
    const double lin = X.w.dot(fam.L() * t.t);
    const double quad = fam.q(t.t);
    return X.r1 + lin + X.r2 * quad;
}

/// The factor map f_t(X) = (r1, w.(L t), r2 q(t)) into R^3.
inline Eigen::Vector3d factor_map(const ProjectionFamily& fam, const ParamVector& t,
                                  const Point& X) {
    require_same_dim(fam, t, X);
    return {X.r1, X.w.dot(fam.L() * t.t), X.r2 * fam.q(t.t)};
}

/// Scalar curve parameter s in [0, 2] for the moment-curve stage.
struct MomentVector {
    double s = 0.0;
};

inline Eigen::Vector3d moment_expand(MomentVector m) {
    return {1.0, m.s, m.s * m.s};
}

/// (1, s, s^2) . y with the same left-to-right association as project(),
/// so that pi_{s t}(X) == moment_project(s, f_t(X)) holds bit-exactly
/// whenever s is a power of two.
inline double moment_project(MomentVector m, const Eigen::Vector3d& y) {
    return y[0] + m.s * y[1] + (m.s * m.s) * y[2];
}

}  // namespace restproj
