// SPDX-License-Identifier: Apache-2.0
#include "dgmax/analysis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "dgmax/dg_operator.hpp"

namespace dgmax
{

const ReferenceElement& shared_reference_element(int degree)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<ReferenceElement>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[degree];
    if (!slot)
        slot = std::make_unique<ReferenceElement>(degree);
    return *slot;
}

namespace
{

struct VolumeTables
{
    QuadratureRule rule;
    Eigen::MatrixXd phi;
    std::array<Eigen::MatrixXd, 3> grad;
};

VolumeTables volume_tables(int degree, int quadrature_degree)
{
    const ReferenceElement& ref = shared_reference_element(degree);
    VolumeTables t;
    t.rule = volume_quadrature(quadrature_degree);
    t.phi = ref.evaluate(t.rule.points);
    t.grad = ref.evaluate_gradient(t.rule.points);
    return t;
}

Vec3 curl_from_gradient(const Mat3& g)  // g(c, j) = d V_c / d x_j
{
    return Vec3(g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1));
}

}  // namespace

double hcurl_error(const FieldState& state, const Mesh& mesh, const ExactSolution& exact,
                   double t, Field field, int quadrature_degree, const std::vector<int>* elements)
{
    if (quadrature_degree <= 0)
        quadrature_degree = 2 * state.degree + 4;
    const VolumeTables tab = volume_tables(state.degree, quadrature_degree);
    const int off = field == Field::E ? 0 : 3;
    const int nq = tab.rule.size();

    auto element_error = [&](int e) {
        const ElementGeometry& g = mesh.geometry(e);
        const auto coeffs = state.element(e).middleCols(off, 3);
        // Reference gradients: rg[d] (nq x 3 components)
        std::array<Eigen::MatrixXd, 3> rg;
        for (int d = 0; d < 3; ++d)
            rg[d] = tab.grad[d] * coeffs;
        const Eigen::MatrixXd x = map_to_physical(mesh, e, tab.rule.points);
        double sum = 0.0;
        for (int q = 0; q < nq; ++q)
        {
            Mat3 ref_grad;  // (c, d)
            for (int d = 0; d < 3; ++d)
                ref_grad.col(d) = rg[d].row(q).transpose();
            const Vec3 curl_h = curl_from_gradient(ref_grad * g.inverse_jacobian);
            const FieldValue c = exact.curl(t, x.row(q).transpose());
            const Vec3& ce = field == Field::E ? c.E : c.H;
            sum += tab.rule.weights(q) * (ce - curl_h).squaredNorm();
        }
        return sum * g.det;
    };

    double total = 0.0;
    if (elements)
    {
        for (int e : *elements)
            total += element_error(e);
    }
    else
    {
        for (int e = 0; e < mesh.num_elements(); ++e)
            total += element_error(e);
    }
    return std::sqrt(total);
}

double l2_error(const FieldState& state, const Mesh& mesh, const ExactSolution& exact, double t,
                Field field, int quadrature_degree)
{
    if (quadrature_degree <= 0)
        quadrature_degree = 2 * state.degree + 4;
    const VolumeTables tab = volume_tables(state.degree, quadrature_degree);
    const int off = field == Field::E ? 0 : 3;
    double total = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
        const Eigen::MatrixXd vals = tab.phi * state.element(e).middleCols(off, 3);
        const Eigen::MatrixXd x = map_to_physical(mesh, e, tab.rule.points);
        double sum = 0.0;
        for (int q = 0; q < tab.rule.size(); ++q)
        {
            const FieldValue v = exact.value(t, x.row(q).transpose());
            const Vec3& ve = field == Field::E ? v.E : v.H;
            sum += tab.rule.weights(q) * (ve - vals.row(q).transpose()).squaredNorm();
        }
        total += sum * mesh.geometry(e).det;
    }
    return std::sqrt(total);
}

double discrete_energy(const FieldState& state, const Mesh& mesh)
{
    const ReferenceElement& ref = shared_reference_element(state.degree);
    double total = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
        const auto u = state.element(e);
        const Eigen::MatrixXd mu = ref.mass() * u;
        double we = 0.0, wh = 0.0;
        for (int c = 0; c < 3; ++c)
        {
            we += u.col(c).dot(mu.col(c));
            wh += u.col(c + 3).dot(mu.col(c + 3));
        }
        total += 0.5 * mesh.geometry(e).det * (mesh.eps(e) * we + mesh.mu(e) * wh);
    }
    return total;
}

FieldValue evaluate_at(const FieldState& state, const Mesh& mesh, int e, const Vec3& x)
{
    const ReferenceElement& ref = shared_reference_element(state.degree);
    const ElementGeometry& g = mesh.geometry(e);
    const Eigen::MatrixXd xi = (g.inverse_jacobian * (x - g.origin)).transpose();
    const Eigen::RowVectorXd v = ref.evaluate(xi) * state.element(e);
    return {v.segment<3>(0).transpose(), v.segment<3>(3).transpose()};
}

FieldValue curl_at(const FieldState& state, const Mesh& mesh, int e, const Vec3& x)
{
    const ReferenceElement& ref = shared_reference_element(state.degree);
    const ElementGeometry& g = mesh.geometry(e);
    const Eigen::MatrixXd xi = (g.inverse_jacobian * (x - g.origin)).transpose();
    const auto grad = ref.evaluate_gradient(xi);
    Eigen::Matrix<double, 6, 3> rg;  // (component, reference direction)
    for (int d = 0; d < 3; ++d)
        rg.col(d) = (grad[d] * state.element(e)).transpose();
    const Eigen::Matrix<double, 6, 3> pg = rg * g.inverse_jacobian;
    return {curl_from_gradient(pg.topRows<3>()), curl_from_gradient(pg.bottomRows<3>())};
}

std::vector<EocRow> eoc(const std::vector<double>& errors, const std::vector<double>& hs)
{
    if (errors.size() != hs.size() || errors.size() < 2)
        throw std::invalid_argument("eoc needs matching lists of at least two entries");
    std::vector<EocRow> rows(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
    {
        if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
            throw std::invalid_argument("eoc needs positive finite errors");
        if (i > 0 && !(hs[i] < hs[i - 1]))
            throw std::invalid_argument("mesh sizes must be strictly decreasing");
        rows[i].h = hs[i];
        rows[i].error = errors[i];
        if (i > 0)
        {
            rows[i].eoc = std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]);
            rows[i].has_eoc = true;
        }
    }
    return rows;
}

double probe_relative_error(const std::vector<Vec3>& reference, const std::vector<Vec3>& discrete)
{
    if (reference.size() != discrete.size())
        throw std::invalid_argument("probe series have different lengths");
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < reference.size(); ++n)
    {
        num += (reference[n] - discrete[n]).squaredNorm();
        den += reference[n].squaredNorm();
    }
    if (!(den > 0.0))
        throw ZeroDenominatorError("reference curl vanishes over the whole probe series");
    return std::sqrt(num / den);
}

ProbeErrors probe_relative_errors(const std::string& name, const ProbeSeries& reference,
                                  const ProbeSeries& primary, const ProbeSeries& postprocessed)
{
    ProbeErrors p;
    p.name = name;
    p.err_E = probe_relative_error(reference.curl_E, primary.curl_E);
    p.err_H = probe_relative_error(reference.curl_H, primary.curl_H);
    p.err_post_E = probe_relative_error(reference.curl_E, postprocessed.curl_E);
    p.err_post_H = probe_relative_error(reference.curl_H, postprocessed.curl_H);
    return p;
}

}  // namespace dgmax
