// SPDX-License-Identifier: Apache-2.0
#include "dgmax/quadrature.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace dgmax
{

namespace
{

void check_degree(int degree)
{
    if (degree < 0 || degree > kMaxQuadratureDegree)
    {
        throw QuadratureDegreeError("quadrature degree " + std::to_string(degree) +
                                    " outside [0, " + std::to_string(kMaxQuadratureDegree) +
                                    "]");
    }
}

}  // namespace

QuadratureRule gauss_jacobi_unit(int n, double alpha)
{
    // Golub-Welsch on [-1, 1] for (1 - x)^alpha, then mapped to [0, 1].
    const double beta = 0.0;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
    {
        const double s = 2.0 * i + alpha + beta;
        jacobi(i, i) = (i == 0) ? (beta - alpha) / (alpha + beta + 2.0)
                                : (beta * beta - alpha * alpha) / (s * (s + 2.0));
        if (i > 0)
        {
            const double num = 4.0 * i * (i + alpha) * (i + beta) * (i + alpha + beta);
            const double den = s * s * (s + 1.0) * (s - 1.0);
            jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(num / den);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    const double mu0 = std::pow(2.0, alpha + beta + 1.0) * std::tgamma(alpha + 1.0) *
                       std::tgamma(beta + 1.0) / std::tgamma(alpha + beta + 2.0);

    QuadratureRule rule;
    rule.points.resize(n, 1);
    rule.weights.resize(n);
    rule.degree = 2 * n - 1;
    for (int i = 0; i < n; ++i)
    {
        const double x = eig.eigenvalues()(i);
        const double v0 = eig.eigenvectors()(0, i);
        rule.points(i, 0) = 0.5 * (x + 1.0);
        rule.weights(i) = mu0 * v0 * v0 * std::pow(0.5, alpha + 1.0);
    }
    return rule;
}

QuadratureRule volume_quadrature(int degree)
{
    check_degree(degree);
    const int n = degree / 2 + 1;
    const QuadratureRule ga = gauss_jacobi_unit(n, 2.0);
    const QuadratureRule gb = gauss_jacobi_unit(n, 1.0);
    const QuadratureRule gc = gauss_jacobi_unit(n, 0.0);

    QuadratureRule rule;
    rule.degree = degree;
    rule.points.resize(n * n * n, 3);
    rule.weights.resize(n * n * n);
    int q = 0;
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < n; ++j)
        {
            for (int k = 0; k < n; ++k, ++q)
            {
                const double a = ga.points(i, 0);
                const double b = gb.points(j, 0);
                const double c = gc.points(k, 0);
                rule.points(q, 0) = a;
                rule.points(q, 1) = b * (1.0 - a);
                rule.points(q, 2) = c * (1.0 - a) * (1.0 - b);
                rule.weights(q) = ga.weights(i) * gb.weights(j) * gc.weights(k);
            }
        }
    }
    return rule;
}

QuadratureRule face_quadrature(int degree)
{
    check_degree(degree);
    const int n = degree / 2 + 1;
    const QuadratureRule ga = gauss_jacobi_unit(n, 1.0);
    const QuadratureRule gb = gauss_jacobi_unit(n, 0.0);

    QuadratureRule rule;
    rule.degree = degree;
    rule.points.resize(n * n, 2);
    rule.weights.resize(n * n);
    int q = 0;
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < n; ++j, ++q)
        {
            const double a = ga.points(i, 0);
            const double b = gb.points(j, 0);
            rule.points(q, 0) = a;
            rule.points(q, 1) = b * (1.0 - a);
            rule.weights(q) = ga.weights(i) * gb.weights(j);
        }
    }
    return rule;
}

}  // namespace dgmax
