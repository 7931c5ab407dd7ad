// SPDX-License-Identifier: Apache-2.0
#include "dgmax/reference_element.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dgmax/constants.hpp"

namespace dgmax
{

namespace
{

// Normalised Jacobi polynomial P_n^{(alpha, beta)} on [-1, 1].
double jacobi_p(double x, double alpha, double beta, int n)
{
    const double gamma0 = std::pow(2.0, alpha + beta + 1.0) / (alpha + beta + 1.0) *
                          std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
                          std::tgamma(alpha + beta + 1.0);
    double p_prev = 1.0 / std::sqrt(gamma0);
    if (n == 0)
        return p_prev;
    const double gamma1 = (alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0) * gamma0;
    double p_cur = ((alpha + beta + 2.0) * x / 2.0 + (alpha - beta) / 2.0) / std::sqrt(gamma1);
    if (n == 1)
        return p_cur;
    double a_old =
        2.0 / (2.0 + alpha + beta) * std::sqrt((alpha + 1.0) * (beta + 1.0) / (alpha + beta + 3.0));
    for (int i = 1; i < n; ++i)
    {
        const double h1 = 2.0 * i + alpha + beta;
        const double a_new = 2.0 / (h1 + 2.0) *
                             std::sqrt((i + 1.0) * (i + 1.0 + alpha + beta) * (i + 1.0 + alpha) *
                                       (i + 1.0 + beta) / (h1 + 1.0) / (h1 + 3.0));
        const double b_new = -(alpha * alpha - beta * beta) / h1 / (h1 + 2.0);
        const double p_next = 1.0 / a_new * (-a_old * p_prev + (x - b_new) * p_cur);
        a_old = a_new;
        p_prev = p_cur;
        p_cur = p_next;
    }
    return p_cur;
}

double grad_jacobi_p(double x, double alpha, double beta, int n)
{
    if (n == 0)
        return 0.0;
    return std::sqrt(n * (n + alpha + beta + 1.0)) * jacobi_p(x, alpha + 1.0, beta + 1.0, n - 1);
}

// Gauss-Jacobi points on [-1, 1], ascending.
Eigen::VectorXd jacobi_gauss_points(double alpha, double beta, int n)
{
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
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jacobi).eigenvalues();
}

Eigen::VectorXd gauss_lobatto_points(int p)
{
    Eigen::VectorXd x(p + 1);
    x(0) = -1.0;
    x(p) = 1.0;
    if (p > 1)
        x.segment(1, p - 1) = jacobi_gauss_points(1.0, 1.0, p - 1);
    return x;
}

struct Collapsed
{
    double a, b, c;
};

// Bi-unit (r, s, t) -> collapsed (a, b, c).
Collapsed collapse(double r, double s, double t)
{
    Collapsed out{};
    out.a = (std::abs(s + t) > 1e-14) ? 2.0 * (1.0 + r) / (-s - t) - 1.0 : -1.0;
    out.b = (std::abs(t - 1.0) > 1e-14) ? 2.0 * (1.0 + s) / (1.0 - t) - 1.0 : -1.0;
    out.c = t;
    return out;
}

template <class F>
void for_each_mode(int degree, F&& f)
{
    int m = 0;
    for (int i = 0; i <= degree; ++i)
        for (int j = 0; j <= degree - i; ++j)
            for (int k = 0; k <= degree - i - j; ++k)
                f(m++, i, j, k);
}

Eigen::Vector3d equilateral_vertex(int v)
{
    switch (v)
    {
        case 0:
            return {-1.0, -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0)};
        case 1:
            return {1.0, -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0)};
        case 2:
            return {0.0, 2.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0)};
        default:
            return {0.0, 0.0, 3.0 / std::sqrt(6.0)};
    }
}

Eigen::VectorXd eval_warp(int p, const Eigen::VectorXd& gauss_x, const Eigen::VectorXd& r_out)
{
    Eigen::VectorXd warp = Eigen::VectorXd::Zero(r_out.size());
    Eigen::VectorXd x_eq(p + 1);
    for (int i = 0; i <= p; ++i)
        x_eq(i) = -1.0 + 2.0 * (p - i) / p;
    for (int i = 0; i <= p; ++i)
    {
        Eigen::VectorXd d = Eigen::VectorXd::Constant(r_out.size(), gauss_x(i) - x_eq(i));
        for (int j = 1; j < p; ++j)
        {
            if (i != j)
                d = d.cwiseProduct(((r_out.array() - x_eq(j)) / (x_eq(i) - x_eq(j))).matrix());
        }
        if (i != 0)
            d = -d / (x_eq(i) - x_eq(0));
        if (i != p)
            d = d / (x_eq(i) - x_eq(p));
        warp += d;
    }
    return warp;
}

void eval_shift(int p, double pval, const Eigen::VectorXd& l1, const Eigen::VectorXd& l2,
                const Eigen::VectorXd& l3, Eigen::VectorXd& dx, Eigen::VectorXd& dy)
{
    const Eigen::VectorXd gauss_x = -gauss_lobatto_points(p);
    const Eigen::ArrayXd blend1 = l2.array() * l3.array();
    const Eigen::ArrayXd blend2 = l1.array() * l3.array();
    const Eigen::ArrayXd blend3 = l1.array() * l2.array();
    const Eigen::ArrayXd wf1 = 4.0 * eval_warp(p, gauss_x, l3 - l2).array();
    const Eigen::ArrayXd wf2 = 4.0 * eval_warp(p, gauss_x, l1 - l3).array();
    const Eigen::ArrayXd wf3 = 4.0 * eval_warp(p, gauss_x, l2 - l1).array();
    const Eigen::ArrayXd w1 = blend1 * wf1 * (1.0 + (pval * l1.array()).square());
    const Eigen::ArrayXd w2 = blend2 * wf2 * (1.0 + (pval * l2.array()).square());
    const Eigen::ArrayXd w3 = blend3 * wf3 * (1.0 + (pval * l3.array()).square());
    const double pi = std::numbers::pi;
    dx = (w1 + std::cos(2.0 * pi / 3.0) * w2 + std::cos(4.0 * pi / 3.0) * w3).matrix();
    dy = (std::sin(2.0 * pi / 3.0) * w2 + std::sin(4.0 * pi / 3.0) * w3).matrix();
}

}  // namespace

Eigen::MatrixXd orthonormal_basis(int degree, const Eigen::MatrixXd& points)
{
    const int np = simplex_dimension(degree);
    Eigen::MatrixXd out(points.rows(), np);
    for (Eigen::Index q = 0; q < points.rows(); ++q)
    {
        const Collapsed abc = collapse(2.0 * points(q, 0) - 1.0, 2.0 * points(q, 1) - 1.0,
                                       2.0 * points(q, 2) - 1.0);
        for_each_mode(degree, [&](int m, int i, int j, int k) {
            const double h1 = jacobi_p(abc.a, 0.0, 0.0, i);
            const double h2 = jacobi_p(abc.b, 2.0 * i + 1.0, 0.0, j);
            const double h3 = jacobi_p(abc.c, 2.0 * (i + j) + 2.0, 0.0, k);
            out(q, m) = 2.0 * std::sqrt(2.0) * h1 * h2 * std::pow(1.0 - abc.b, i) * h3 *
                        std::pow(1.0 - abc.c, i + j);
        });
    }
    return out;
}

std::array<Eigen::MatrixXd, 3> orthonormal_basis_gradient(int degree,
                                                          const Eigen::MatrixXd& points)
{
    const int np = simplex_dimension(degree);
    std::array<Eigen::MatrixXd, 3> out;
    for (auto& m : out)
        m.resize(points.rows(), np);
    for (Eigen::Index q = 0; q < points.rows(); ++q)
    {
        const Collapsed abc = collapse(2.0 * points(q, 0) - 1.0, 2.0 * points(q, 1) - 1.0,
                                       2.0 * points(q, 2) - 1.0);
        const double a = abc.a, b = abc.b, c = abc.c;
        for_each_mode(degree, [&](int m, int i, int j, int k) {
            const double fa = jacobi_p(a, 0.0, 0.0, i);
            const double dfa = grad_jacobi_p(a, 0.0, 0.0, i);
            const double gb = jacobi_p(b, 2.0 * i + 1.0, 0.0, j);
            const double dgb = grad_jacobi_p(b, 2.0 * i + 1.0, 0.0, j);
            const double hc = jacobi_p(c, 2.0 * (i + j) + 2.0, 0.0, k);
            const double dhc = grad_jacobi_p(c, 2.0 * (i + j) + 2.0, 0.0, k);

            double dr = dfa * gb * hc;
            if (i > 0)
                dr *= std::pow(0.5 * (1.0 - b), i - 1);
            if (i + j > 0)
                dr *= std::pow(0.5 * (1.0 - c), i + j - 1);

            double ds = 0.5 * (1.0 + a) * dr;
            double tmp = dgb * std::pow(0.5 * (1.0 - b), i);
            if (i > 0)
                tmp += -0.5 * i * gb * std::pow(0.5 * (1.0 - b), i - 1);
            if (i + j > 0)
                tmp *= std::pow(0.5 * (1.0 - c), i + j - 1);
            tmp = fa * tmp * hc;
            ds += tmp;

            double dt = 0.5 * (1.0 + a) * dr + 0.5 * (1.0 + b) * tmp;
            tmp = dhc * std::pow(0.5 * (1.0 - c), i + j);
            if (i + j > 0)
                tmp -= 0.5 * (i + j) * hc * std::pow(0.5 * (1.0 - c), i + j - 1);
            tmp = fa * gb * tmp * std::pow(0.5 * (1.0 - b), i);
            dt += tmp;

            // Bi-unit normalisation, then chain rule r = 2x - 1.
            const double scale = 2.0 * std::pow(2.0, 2 * i + j + 1.5);
            out[0](q, m) = dr * scale;
            out[1](q, m) = ds * scale;
            out[2](q, m) = dt * scale;
        });
    }
    return out;
}

Eigen::MatrixXd warp_blend_nodes(int p)
{
    static constexpr double kAlphaOpt[] = {0.0,    0.0,    0.0,     0.1002, 1.1332,
                                           1.5608, 1.3413, 1.2577,  1.1603, 1.10153,
                                           0.6080, 0.4523, 0.8856,  0.8717, 0.9655};
    const double alpha = (p <= 15) ? kAlphaOpt[p - 1] : 1.0;
    const int np = simplex_dimension(p);
    const double tol = 1e-10;

    Eigen::VectorXd r(np), s(np), t(np);
    int sk = 0;
    for (int n = 0; n <= p; ++n)
        for (int m = 0; m <= p - n; ++m)
            for (int q = 0; q <= p - n - m; ++q, ++sk)
            {
                r(sk) = -1.0 + q * 2.0 / p;
                s(sk) = -1.0 + m * 2.0 / p;
                t(sk) = -1.0 + n * 2.0 / p;
            }

    const Eigen::VectorXd l1 = 0.5 * (Eigen::VectorXd::Ones(np) + t);
    const Eigen::VectorXd l2 = 0.5 * (Eigen::VectorXd::Ones(np) + s);
    const Eigen::VectorXd l3 = -0.5 * (Eigen::VectorXd::Ones(np) + r + s + t);
    const Eigen::VectorXd l4 = 0.5 * (Eigen::VectorXd::Ones(np) + r);

    const Eigen::Vector3d v1 = equilateral_vertex(0), v2 = equilateral_vertex(1),
                          v3 = equilateral_vertex(2), v4 = equilateral_vertex(3);
    std::array<Eigen::Vector3d, 4> t1{v2 - v1, v2 - v1, v3 - v2, v3 - v1};
    std::array<Eigen::Vector3d, 4> t2{v3 - 0.5 * (v1 + v2), v4 - 0.5 * (v1 + v2),
                                      v4 - 0.5 * (v2 + v3), v4 - 0.5 * (v1 + v3)};
    for (int f = 0; f < 4; ++f)
    {
        t1[f].normalize();
        t2[f].normalize();
    }

    Eigen::MatrixXd xyz(np, 3);
    for (int i = 0; i < np; ++i)
        xyz.row(i) = (l3(i) * v1 + l4(i) * v2 + l2(i) * v3 + l1(i) * v4).transpose();

    Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(np, 3);
    for (int face = 0; face < 4; ++face)
    {
        const Eigen::VectorXd* la = nullptr;
        const Eigen::VectorXd *lb = nullptr, *lc = nullptr, *ld = nullptr;
        switch (face)
        {
            case 0:
                la = &l1, lb = &l2, lc = &l3, ld = &l4;
                break;
            case 1:
                la = &l2, lb = &l1, lc = &l3, ld = &l4;
                break;
            case 2:
                la = &l3, lb = &l1, lc = &l4, ld = &l2;
                break;
            default:
                la = &l4, lb = &l1, lc = &l3, ld = &l2;
                break;
        }
        Eigen::VectorXd warp1, warp2;
        eval_shift(p, alpha, *lb, *lc, *ld, warp1, warp2);
        for (int i = 0; i < np; ++i)
        {
            double blend = (*lb)(i) * (*lc)(i) * (*ld)(i);
            const double denom = ((*lb)(i) + 0.5 * (*la)(i)) * ((*lc)(i) + 0.5 * (*la)(i)) *
                                 ((*ld)(i) + 0.5 * (*la)(i));
            if (denom > tol)
                blend = (1.0 + std::pow(alpha * (*la)(i), 2)) * blend / denom;
            shift.row(i) += (blend * warp1(i)) * t1[face].transpose() +
                            (blend * warp2(i)) * t2[face].transpose();
            const int nonzero =
                ((*lb)(i) > tol) + ((*lc)(i) > tol) + ((*ld)(i) > tol);
            if ((*la)(i) < tol && nonzero < 3)
                shift.row(i) = warp1(i) * t1[face].transpose() + warp2(i) * t2[face].transpose();
        }
    }
    xyz += shift;

    // Equilateral -> bi-unit -> unit coordinates.
    Eigen::Matrix3d a;
    a.col(0) = 0.5 * (v2 - v1);
    a.col(1) = 0.5 * (v3 - v1);
    a.col(2) = 0.5 * (v4 - v1);
    const Eigen::Vector3d offset = 0.5 * (v2 + v3 + v4 - v1);
    const Eigen::Matrix3d a_inv = a.inverse();
    Eigen::MatrixXd nodes(np, 3);
    for (int i = 0; i < np; ++i)
    {
        const Eigen::Vector3d rst = a_inv * (xyz.row(i).transpose() - offset);
        nodes.row(i) = (0.5 * (rst + Eigen::Vector3d::Ones())).transpose();
    }
    return nodes;
}

Eigen::Vector3d reference_vertex(int v)
{
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    if (v > 0)
        x(v - 1) = 1.0;
    return x;
}

Eigen::MatrixXd face_points_on_tet(const std::array<int, 3>& triple,
                                   const Eigen::MatrixXd& triangle_points)
{
    const Eigen::Vector3d xa = reference_vertex(triple[0]);
    const Eigen::Vector3d xb = reference_vertex(triple[1]);
    const Eigen::Vector3d xc = reference_vertex(triple[2]);
    Eigen::MatrixXd out(triangle_points.rows(), 3);
    for (Eigen::Index q = 0; q < triangle_points.rows(); ++q)
    {
        const double u = triangle_points(q, 0);
        const double v = triangle_points(q, 1);
        out.row(q) = ((1.0 - u - v) * xa + u * xb + v * xc).transpose();
    }
    return out;
}

ReferenceElement::ReferenceElement(int degree) : degree_(degree)
{
    if (degree < 1 || degree > kMaxNodalDegree)
    {
        throw UnsupportedDegreeError("nodal degree " + std::to_string(degree) +
                                     " outside [1, " + std::to_string(kMaxNodalDegree) + "]");
    }
    num_nodes_ = simplex_dimension(degree);
    nodes_ = warp_blend_nodes(degree);
    vandermonde_ = orthonormal_basis(degree, nodes_);
    inverse_vandermonde_ = vandermonde_.inverse();
    mass_ = 0.125 * (vandermonde_ * vandermonde_.transpose()).inverse();
    mass_ = 0.5 * (mass_ + mass_.transpose()).eval();
    inverse_mass_ = 8.0 * vandermonde_ * vandermonde_.transpose();
    const auto grad = orthonormal_basis_gradient(degree, nodes_);
    for (int d = 0; d < 3; ++d)
        derivative_[d] = grad[d] * inverse_vandermonde_;
}

Eigen::MatrixXd ReferenceElement::evaluate(const Eigen::MatrixXd& points) const
{
    return orthonormal_basis(degree_, points) * inverse_vandermonde_;
}

std::array<Eigen::MatrixXd, 3> ReferenceElement::evaluate_gradient(
    const Eigen::MatrixXd& points) const
{
    auto grad = orthonormal_basis_gradient(degree_, points);
    for (auto& g : grad)
        g = g * inverse_vandermonde_;
    return grad;
}

Eigen::MatrixXd ReferenceElement::face_interpolation(int face, const QuadratureRule& rule) const
{
    return evaluate(face_points_on_tet(kLocalFaceVertices[face], rule.points));
}

ReferenceElement build_reference_element(int degree)
{
    if (degree < 1 || degree > kMaxSolverDegree)
    {
        throw UnsupportedDegreeError("solver degree " + std::to_string(degree) +
                                     " outside [1, " + std::to_string(kMaxSolverDegree) + "]");
    }
    return ReferenceElement(degree);
}

}  // namespace dgmax
