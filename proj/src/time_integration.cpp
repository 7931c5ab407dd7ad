// SPDX-License-Identifier: Apache-2.0
#include "dgmax/time_integration.hpp"

#include <limits>

#include "dgmax/reference_element.hpp"

namespace dgmax
{

const LSRKScheme& lsrk54()
{
    static const LSRKScheme scheme{
        {0.0, -567301805773.0 / 1357537059087.0, -2404267990393.0 / 2016746695238.0,
         -3550918686646.0 / 2091501179385.0, -1275806237668.0 / 842570457699.0},
        {1432997174477.0 / 9575080441755.0, 5161836677717.0 / 13612068292357.0,
         1720146321549.0 / 2090206949498.0, 3134564353537.0 / 4481467310338.0,
         2277821191437.0 / 14882151754819.0},
        {0.0, 1432997174477.0 / 9575080441755.0, 2526269341429.0 / 6820363962896.0,
         2006345519317.0 / 3224310063776.0, 2802321613138.0 / 2924317926251.0}};
    return scheme;
}

double cfl_alpha(int degree)
{
    if (degree < 1 || degree > 4)
        throw UnsupportedDegreeError("no CFL constant for degree " + std::to_string(degree));
    return kCflAlpha[degree - 1];
}

double cfl_time_step(const Mesh& mesh, int degree)
{
    double ratio = std::numeric_limits<double>::infinity();
    for (int e = 0; e < mesh.num_elements(); ++e)
    {
        const ElementGeometry& g = mesh.geometry(e);
        ratio = std::min(ratio, g.volume / g.surface_area / mesh.wave_speed(e));
    }
    return cfl_alpha(degree) * ratio;
}

}  // namespace dgmax
