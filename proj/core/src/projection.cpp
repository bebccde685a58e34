#include "ftg/projection.hpp"

#include <cmath>
#include <limits>

namespace ftg {

checked_inverse invert_checked(Eigen::MatrixXd const& gram, double eps1)
{
    if (gram.rows() != gram.cols() || gram.rows() == 0) {
        throw std::invalid_argument("Gram matrix must be square and non-empty");
    }
    checked_inverse out;
    if (!gram.allFinite()) {
        out.condition = std::numeric_limits<double>::infinity();
        return out;
    }
    auto const n = gram.rows();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    auto const lambda = eig.eigenvalues().cwiseAbs();
    auto const smin = lambda.minCoeff();
    out.condition = smin > 0.0 ? lambda.maxCoeff() / smin : std::numeric_limits<double>::infinity();
    // A Gram matrix of independent elements is positive definite. Rounding
    // can let the identity check pass for an exactly singular G (two
    // collinear vectors), so a non-positive eigenvalue rejects outright.
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        return out;
    }

    // Jacobi scaling D G D with D = diag(G_ii^-1/2) before the SVD; random
    // compositions differ in norm by many orders of magnitude.
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (gram(i, i) > 0.0) {
            scale(i) = 1.0 / std::sqrt(gram(i, i));
        }
    }
    Eigen::MatrixXd const scaled = scale.asDiagonal() * gram * scale.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd const reciprocal = svd.singularValues().cwiseInverse();
    out.inverse = scale.asDiagonal() * (svd.matrixV() * reciprocal.asDiagonal() * svd.matrixU().transpose()) * scale.asDiagonal();

    Eigen::MatrixXd const product = gram * out.inverse;
    out.accepted = true;
    for (Eigen::Index i = 0; i < n && out.accepted; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            auto const expected = i == j ? 1.0 : 0.0;
            // NaN fails the comparison and rejects
            if (!(std::abs(product(i, j) - expected) < eps1)) {
                out.accepted = false;
                break;
            }
        }
    }
    return out;
}

} // namespace ftg
