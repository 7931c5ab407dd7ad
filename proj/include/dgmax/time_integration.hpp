// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgmax/field_state.hpp"
#include "dgmax/mesh.hpp"

namespace dgmax
{

/// Five-stage, fourth-order, 2N-storage Runge-Kutta coefficients.
struct LSRKScheme
{
    std::array<double, 5> a;
    std::array<double, 5> b;
    std::array<double, 5> c;
};

/// Carpenter-Kennedy LSRK(5,4) coefficients.
const LSRKScheme& lsrk54();

/// CFL constants alpha_k for k = 1..4.
inline constexpr std::array<double, 4> kCflAlpha{0.70, 0.46, 0.30, 0.21};

double cfl_alpha(int degree);

/// alpha_k * min_K (V_K / A_K) / c_K.
double cfl_time_step(const Mesh& mesh, int degree);

class NonFiniteStateError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class SimulationDiverged : public std::runtime_error
{
  public:
    SimulationDiverged(long step, double time)
        : std::runtime_error("simulation diverged: non-finite state at step " +
                             std::to_string(step)),
          step(step),
          time(time)
    {
    }
    long step;
    double time;
};

inline FieldState zero_like(const FieldState& s)
{
    return FieldState(s.num_elements, s.degree, s.time);
}

/// One LSRK(5,4) step. `rhs(t, u, alpha, beta, out)` must compute
/// out = beta * out + alpha * f(t, u), treating beta == 0 as assignment.
/// v1 holds U^n on entry and U^{n+1} on exit; v2 is the second work vector.
template <class State, class Rhs>
void lsrk_step(State& v1, double t, double dt, Rhs&& rhs, State& v2,
               const LSRKScheme& scheme = lsrk54())
{
    for (int i = 0; i < 5; ++i)
    {
        rhs(t + scheme.c[i] * dt, v1, dt, scheme.a[i], v2);
        axpy(v1, scheme.b[i], v2);
    }
    if (!all_finite(v1))
        throw NonFiniteStateError("non-finite value produced by the time step");
}

/// Number of steps for [0, T] with nominal step dt; the last step is shortened.
inline long step_count(double final_time, double dt)
{
    if (!(final_time > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("final time and time step must be positive");
    return static_cast<long>(std::ceil(final_time / dt * (1.0 - 1e-12)));
}

template <class State>
using Observer = std::function<void(long step, double t, const State& state)>;

struct RunSummary
{
    long steps = 0;
    double final_time = 0.0;
    double dt = 0.0;
};

/// Advances `state` from t = 0 to T; observers run after every step with
/// (n, t_n, U^n). Only one extra state-sized buffer is created.
template <class State, class Rhs>
RunSummary run_simulation(State& state, double final_time, double dt, Rhs&& rhs,
                          const std::vector<Observer<State>>& observers = {},
                          const LSRKScheme& scheme = lsrk54())
{
    const long n_steps = step_count(final_time, dt);
    State work = zero_like(state);
    for (long n = 0; n < n_steps; ++n)
    {
        const double t = n * dt;
        const double t_next = (n + 1 == n_steps) ? final_time : (n + 1) * dt;
        try
        {
            lsrk_step(state, t, t_next - t, rhs, work, scheme);
        }
        catch (const NonFiniteStateError&)
        {
            throw SimulationDiverged(n + 1, t_next);
        }
        if constexpr (requires { state.time; })
            state.time = t_next;
        for (const auto& obs : observers)
            obs(n + 1, t_next, state);
    }
    return {n_steps, final_time, dt};
}

}  // namespace dgmax
