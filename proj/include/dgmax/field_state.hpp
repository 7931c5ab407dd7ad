// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "dgmax/reference_element.hpp"

namespace dgmax
{

/// Nodal coefficients of (E, H) for every element at one instant.
/// Column 6e + c holds component c of element e: c = 0..2 for E, 3..5 for H.
struct FieldState
{
    int degree = 0;
    int num_nodes = 0;
    int num_elements = 0;
    double time = 0.0;
    Eigen::MatrixXd data;

    FieldState() = default;
    FieldState(int num_elements, int degree, double time = 0.0)
        : degree(degree),
          num_nodes(simplex_dimension(degree)),
          num_elements(num_elements),
          time(time),
          data(Eigen::MatrixXd::Zero(simplex_dimension(degree), 6 * num_elements))
    {
    }

    auto element(int e) { return data.middleCols(6 * e, 6); }
    auto element(int e) const { return data.middleCols(6 * e, 6); }
    auto E(int e) { return data.middleCols(6 * e, 3); }
    auto E(int e) const { return data.middleCols(6 * e, 3); }
    auto H(int e) { return data.middleCols(6 * e + 3, 3); }
    auto H(int e) const { return data.middleCols(6 * e + 3, 3); }
};

/// y += a * x
inline void axpy(FieldState& y, double a, const FieldState& x) { y.data += a * x.data; }

inline bool all_finite(const FieldState& s) { return s.data.allFinite(); }

}  // namespace dgmax
