// SPDX-License-Identifier: Apache-2.0
// Batch front-end: single runs, convergence sweeps, reference comparisons, mesh generation.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dgmax/format.hpp"
#include "dgmax/mesh.hpp"
#include "dgmax/run.hpp"
#include "dgmax/scenarios.hpp"
#include "dgmax/time_integration.hpp"

namespace
{

struct Overrides
{
    std::string config;
    std::optional<std::string> scenario;
    std::optional<int> degree;
    std::optional<int> n;
    std::optional<std::string> mesh;
    std::vector<int> sweep;
    std::optional<std::string> out;
    std::optional<double> dt;
    std::optional<double> final_time;
    std::vector<std::string> sets;

    void add_to(CLI::App& app)
    {
        app.add_option("-c,--config", config, "key=value config file");
        app.add_option("--scenario", scenario, "cavity | planewave | scattering");
        app.add_option("--degree", degree, "polynomial degree 1..4");
        app.add_option("--n", n, "cells per cube edge");
        app.add_option("--mesh", mesh, "mesh file");
        app.add_option("--sweep", sweep, "strictly increasing list of n")->delimiter(',');
        app.add_option("--out", out, "output directory");
        app.add_option("--dt", dt, "time step override (s)");
        app.add_option("--final-time", final_time, "final time override (s)");
        app.add_option("--set", sets, "extra key=value config entries");
    }

    dgmax::RunConfig build() const
    {
        dgmax::RunConfig c;
        if (!config.empty())
            c = dgmax::load_config(config, c);
        for (const auto& kv : sets)
        {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw dgmax::ConfigError("--set expects key=value, got '" + kv + "'");
            dgmax::set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (scenario)
            c.scenario = *scenario;
        if (degree)
            c.degree = *degree;
        if (n)
            c.n = *n;
        if (mesh)
            c.mesh_file = *mesh;
        if (!sweep.empty())
            c.sweep = sweep;
        if (out)
            c.out_dir = *out;
        if (dt)
            c.dt = *dt;
        if (final_time)
            c.final_time = *final_time;
        dgmax::validate(c);
        return c;
    }
};

void print_report(const dgmax::RunReport& r)
{
    using dgmax::format_double;
    std::printf("%s k=%d h=%s elements=%d steps=%ld dt=%s\n", r.scenario.c_str(), r.degree,
                format_double(r.h).c_str(), r.elements, r.steps, format_double(r.dt).c_str());
    std::printf("  curl E: raw %.4e  post %.4e\n", r.final_E, r.final_post_E);
    std::printf("  curl H: raw %.4e  post %.4e\n", r.final_H, r.final_post_H);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nodal DG time-domain Maxwell solver with local curl postprocessing"};
    app.require_subcommand(1);

    Overrides run_opts, cmp_opts;
    auto* run_cmd = app.add_subcommand("run", "single run or convergence sweep against an exact solution");
    run_opts.add_to(*run_cmd);

    auto* cmp_cmd = app.add_subcommand("compare", "probe errors against a higher-degree reference run");
    cmp_opts.add_to(*cmp_cmd);
    std::optional<int> ref_degree;
    std::optional<int> ref_divisor;
    cmp_cmd->add_option("--reference-degree", ref_degree, "reference degree (default k + 2)");
    cmp_cmd->add_option("--reference-divisor", ref_divisor, "reference dt = dt / divisor (default 3)");

    auto* mesh_cmd = app.add_subcommand("mesh", "write the dielectric-sphere stand-in mesh");
    int mesh_n = 11;
    std::string mesh_out = "sphere.mesh";
    mesh_cmd->add_option("--n", mesh_n, "cells per cube edge")->check(CLI::PositiveNumber);
    mesh_cmd->add_option("-o,--output", mesh_out, "output mesh file");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run_cmd)
        {
            const dgmax::RunConfig c = run_opts.build();
            if (c.sweep.empty())
                print_report(dgmax::run(c));
            else
                for (const auto& r : dgmax::run_sweep(c))
                    print_report(r);
            std::printf("results in %s\n", c.out_dir.string().c_str());
        }
        else if (*cmp_cmd)
        {
            dgmax::RunConfig c = cmp_opts.build();
            if (ref_degree)
                c.reference_degree = *ref_degree;
            if (ref_divisor)
                c.reference_dt_divisor = *ref_divisor;
            dgmax::validate(c);
            const auto errors = dgmax::compare_with_reference(c);
            std::printf("%-6s %-5s %-12s %-12s\n", "probe", "field", "err", "err*");
            for (const auto& p : errors)
            {
                std::printf("%-6s %-5s %-12.4e %-12.4e\n", p.name.c_str(), "E", p.err_E, p.err_post_E);
                std::printf("%-6s %-5s %-12.4e %-12.4e\n", p.name.c_str(), "H", p.err_H, p.err_post_H);
            }
            std::printf("results in %s\n", c.out_dir.string().c_str());
        }
        else if (*mesh_cmd)
        {
            const dgmax::Mesh mesh =
                dgmax::build_scattering_standin_mesh(dgmax::scattering_scenario(), mesh_n);
            dgmax::write_mesh(mesh, mesh_out);
            std::printf("%d elements written to %s\n", mesh.num_elements(), mesh_out.c_str());
        }
    }
    catch (const dgmax::SimulationDiverged& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    catch (const dgmax::ConfigError& e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
