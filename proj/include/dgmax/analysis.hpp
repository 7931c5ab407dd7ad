// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dgmax/field_state.hpp"
#include "dgmax/mesh.hpp"
#include "dgmax/scenarios.hpp"

namespace dgmax
{

enum class Field
{
    E,
    H
};

/// Shared immutable reference element of any nodal degree.
const ReferenceElement& shared_reference_element(int degree);

/// sqrt(sum_K int_K |curl V_exact(t) - curl V_h|^2); quadrature degree
/// defaults to 2 * state.degree + 4. `elements` restricts the sum when given.
double hcurl_error(const FieldState& state, const Mesh& mesh, const ExactSolution& exact,
                   double t, Field field, int quadrature_degree = 0,
                   const std::vector<int>* elements = nullptr);

/// sqrt(sum_K int_K |V_exact(t) - V_h|^2).
double l2_error(const FieldState& state, const Mesh& mesh, const ExactSolution& exact, double t,
                Field field, int quadrature_degree = 0);

/// (1/2) sum_K int_K eps |E_h|^2 + mu |H_h|^2.
double discrete_energy(const FieldState& state, const Mesh& mesh);

/// Field values and curls of element e's polynomials at physical point x.
FieldValue evaluate_at(const FieldState& state, const Mesh& mesh, int e, const Vec3& x);
FieldValue curl_at(const FieldState& state, const Mesh& mesh, int e, const Vec3& x);

struct EocRow
{
    double h = 0.0;
    double error = 0.0;
    double eoc = 0.0;  // undefined (0) on the first row
    bool has_eoc = false;
};

/// eoc_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i).
std::vector<EocRow> eoc(const std::vector<double>& errors, const std::vector<double>& hs);

class ZeroDenominatorError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Relative probe error sqrt(sum_n |r_n - v_n|^2 / sum_n |r_n|^2) of point curls.
double probe_relative_error(const std::vector<Vec3>& reference, const std::vector<Vec3>& discrete);

struct ProbeErrors
{
    std::string name;
    double err_E = 0.0;
    double err_post_E = 0.0;
    double err_H = 0.0;
    double err_post_H = 0.0;
};

/// Point-curl time series at one probe; index n runs over the shared time grid.
struct ProbeSeries
{
    std::vector<Vec3> curl_E;
    std::vector<Vec3> curl_H;
};

ProbeErrors probe_relative_errors(const std::string& name, const ProbeSeries& reference,
                                  const ProbeSeries& primary, const ProbeSeries& postprocessed);

}  // namespace dgmax
