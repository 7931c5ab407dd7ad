// SPDX-License-Identifier: Apache-2.0
#include "dgmax/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "dgmax/analysis.hpp"
#include "dgmax/dg_operator.hpp"
#include "dgmax/format.hpp"
#include "dgmax/postprocess.hpp"
#include "dgmax/time_integration.hpp"

namespace dgmax
{

namespace
{

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        parts.push_back(trim(item));
    if (!s.empty() && s.back() == sep)
        parts.emplace_back();
    return parts;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& text)
{
    Int value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return value;
}

double parse_number(const std::string& key, const std::string& text)
{
    try
    {
        return parse_double(text);
    }
    catch (const std::invalid_argument&)
    {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
}

Probe parse_probe(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("probe: expected name:x,y,z, got '" + text + "'");
    const auto coords = split(text.substr(colon + 1), ',');
    if (coords.size() != 3)
        throw ConfigError("probe: expected three coordinates in '" + text + "'");
    Probe p{trim(text.substr(0, colon)), Vec3::Zero()};
    if (p.name.empty())
        throw ConfigError("probe: empty name in '" + text + "'");
    for (int i = 0; i < 3; ++i)
        p.point[i] = parse_number("probe", coords[i]);
    return p;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

bool same_double(double a, double b)
{
    return (std::isnan(a) && std::isnan(b)) || std::memcmp(&a, &b, sizeof(double)) == 0;
}

double grid_size(const RunConfig& config, const Scenario& scenario, const Mesh& mesh)
{
    return config.mesh_file.empty() ? scenario.length / config.n : mesh_size(mesh);
}

auto operator_rhs(const MaxwellOperator& op)
{
    return [&op](double t, const FieldState& u, double alpha, double beta, FieldState& out) {
        op.apply(t, u, alpha, beta, out);
    };
}

}  // namespace

void validate(const RunConfig& c)
{
    const auto names = builtin_scenario_names();
    if (std::find(names.begin(), names.end(), c.scenario) == names.end())
        throw ConfigError("unknown scenario '" + c.scenario + "'");
    if (c.degree < 1 || c.degree > kMaxSolverDegree)
        throw ConfigError("degree must be in 1..4, got " + std::to_string(c.degree));
    if (c.mesh_file.empty() && c.n < 1)
        throw ConfigError("n must be positive");
    if (c.dt && !(std::isfinite(*c.dt) && *c.dt > 0.0))
        throw ConfigError("dt must be positive");
    if (c.final_time && !(std::isfinite(*c.final_time) && *c.final_time > 0.0))
        throw ConfigError("final_time must be positive");
    if (c.error_stride < 1)
        throw ConfigError("error_stride must be at least 1");
    for (long s : c.postprocess_steps)
        if (s < 0)
            throw ConfigError("postprocess_steps entries must be nonnegative");
    for (std::size_t i = 0; i < c.sweep.size(); ++i)
    {
        if (c.sweep[i] < 1)
            throw ConfigError("sweep entries must be positive");
        if (i > 0 && c.sweep[i] <= c.sweep[i - 1])
            throw ConfigError("sweep list must be strictly increasing");
    }
    if (c.reference_degree != 0 && (c.reference_degree < 1 || c.reference_degree > kMaxSolverDegree))
        throw ConfigError("reference_degree must be in 1..4");
    if (!(std::isfinite(c.incident_ramp) && c.incident_ramp >= 0.0))
        throw ConfigError("incident_ramp must be nonnegative");
    if (c.reference_dt_divisor < 1)
        throw ConfigError("reference_dt_divisor must be at least 1");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value)
{
    if (key == "scenario")
        c.scenario = value;
    else if (key == "degree")
        c.degree = parse_integer<int>(key, value);
    else if (key == "n")
        c.n = parse_integer<int>(key, value);
    else if (key == "mesh")
        c.mesh_file = value;
    else if (key == "dt")
        c.dt = parse_number(key, value);
    else if (key == "final_time")
        c.final_time = parse_number(key, value);
    else if (key == "out")
        c.out_dir = value;
    else if (key == "error_stride")
        c.error_stride = parse_integer<int>(key, value);
    else if (key == "postprocess_steps")
    {
        c.postprocess_steps.clear();
        c.postprocess_all = value == "all";
        if (!c.postprocess_all && !value.empty())
            for (const auto& s : split(value, ','))
                c.postprocess_steps.push_back(parse_integer<long>(key, s));
    }
    else if (key == "probe")
        c.probes.push_back(parse_probe(value));
    else if (key == "sweep")
    {
        c.sweep.clear();
        if (!value.empty())
            for (const auto& s : split(value, ','))
                c.sweep.push_back(parse_integer<int>(key, s));
    }
    else if (key == "incident_ramp")
        c.incident_ramp = parse_number(key, value);
    else if (key == "reference_degree")
        c.reference_degree = parse_integer<int>(key, value);
    else if (key == "reference_dt_divisor")
        c.reference_dt_divisor = parse_integer<int>(key, value);
    else
        throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::istream& in, RunConfig base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        const std::string text = trim(line.substr(0, hash));
        if (text.empty())
            continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(base, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    return parse_config(in, std::move(base));
}

bool ErrorSeries::operator==(const ErrorSeries& o) const
{
    if (step != o.step || t.size() != o.t.size() || err_raw.size() != o.err_raw.size() ||
        err_post.size() != o.err_post.size())
        return false;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (!same_double(t[i], o.t[i]) || !same_double(err_raw[i], o.err_raw[i]) ||
            !same_double(err_post[i], o.err_post[i]))
            return false;
    return true;
}

void write_error_csv(const ErrorSeries& s, std::ostream& out)
{
    out << "step,t,err_raw,err_post\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << s.step[i] << ',' << format_double(s.t[i]) << ',' << format_double(s.err_raw[i])
            << ',' << format_double(s.err_post[i]) << '\n';
}

void write_error_csv(const ErrorSeries& s, const std::filesystem::path& path)
{
    std::ostringstream out;
    write_error_csv(s, out);
    write_file(path, out.str());
}

ErrorSeries read_error_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || trim(line) != "step,t,err_raw,err_post")
        throw std::runtime_error("errors csv: bad header");
    ErrorSeries s;
    while (std::getline(in, line))
    {
        if (trim(line).empty())
            continue;
        const auto f = split(trim(line), ',');
        if (f.size() != 4)
            throw std::runtime_error("errors csv: expected 4 columns in '" + line + "'");
        s.step.push_back(parse_integer<long>("step", f[0]));
        s.t.push_back(parse_double(f[1]));
        s.err_raw.push_back(parse_double(f[2]));
        s.err_post.push_back(parse_double(f[3]));
    }
    return s;
}

ErrorSeries read_error_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return read_error_csv(in);
}

double mesh_size(const Mesh& mesh)
{
    double h = 0.0;
    for (const auto& el : mesh.elements())
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                h = std::max(h, (mesh.vertices()[el[i]] - mesh.vertices()[el[j]]).norm());
    return h;
}

Scenario configured_scenario(const RunConfig& config)
{
    Scenario s = builtin_scenario(config.scenario);
    const double ramp = config.incident_ramp;
    if (ramp > 0.0)
    {
        if (s.exact)
            throw ConfigError("incident_ramp would invalidate the exact solution of '" + s.name + "'");
        if (s.source.boundary_data)
            s.source.boundary_data = [g = s.source.boundary_data, ramp](double t, const Vec3& x,
                                                                         const Vec3& n, double z) {
                const double r = t >= ramp ? 1.0 : std::pow(std::sin(0.5 * M_PI * t / ramp), 2);
                return Vec3(r * g(t, x, n, z));
            };
    }
    return s;
}

Mesh build_mesh(const RunConfig& config, const Scenario& scenario)
{
    if (!config.mesh_file.empty())
        return load_mesh(config.mesh_file);
    if (scenario.domain == DomainKind::MeshFile)
        throw ConfigError("scenario '" + scenario.name + "' requires a mesh file");
    return build_structured_cube_mesh(config.n, scenario.length, scenario.boundary, Material{},
                                      scenario.origin);
}

void write_state_snapshot(const FieldState& state, const std::filesystem::path& path)
{
    std::ostringstream out;
    out << "dgmax-state 1\n"
        << state.degree << ' ' << state.num_nodes << ' ' << state.num_elements << ' '
        << format_double(state.time) << '\n';
    for (Eigen::Index i = 0; i < state.data.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < state.data.cols(); ++j)
            out << (j ? " " : "") << format_double(state.data(i, j));
        out << '\n';
    }
    write_file(path, out.str());
}

FieldState read_state_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "dgmax-state" || version != 1)
        throw std::runtime_error(path.string() + ": not a state snapshot");
    int degree = 0, nodes = 0, elements = 0;
    std::string time;
    in >> degree >> nodes >> elements >> time;
    if (!in || degree < 1 || degree > kMaxNodalDegree || elements < 0 ||
        nodes != simplex_dimension(degree))
        throw std::runtime_error(path.string() + ": bad snapshot header");
    FieldState s(elements, degree, parse_double(time));
    std::string token;
    for (Eigen::Index i = 0; i < s.data.rows(); ++i)
        for (Eigen::Index j = 0; j < s.data.cols(); ++j)
        {
            if (!(in >> token))
                throw std::runtime_error(path.string() + ": truncated snapshot");
            s.data(i, j) = parse_double(token);
        }
    return s;
}

RunReport run(const RunConfig& config)
{
    validate(config);
    const Scenario scenario = configured_scenario(config);
    if (!scenario.exact)
        throw ConfigError("scenario '" + scenario.name +
                          "' has no exact solution; use the reference comparison");
    const Mesh mesh = build_mesh(config, scenario);
    const int k = config.degree;
    const double final_time = config.final_time.value_or(scenario.final_time);

    MaxwellOperator op(mesh, k, scenario.source);
    Postprocessor post(mesh, k, scenario.source);
    FieldState u = project_initial_conditions(scenario.initial_E, scenario.initial_H, mesh,
                                              op.reference());

    RunReport report;
    report.scenario = scenario.name;
    report.degree = k;
    report.n = config.mesh_file.empty() ? config.n : 0;
    report.h = grid_size(config, scenario, mesh);
    report.dt = config.dt.value_or(cfl_time_step(mesh, k));
    report.steps = step_count(final_time, report.dt);
    report.final_time = final_time;
    report.elements = mesh.num_elements();

    const std::set<long> post_steps(config.postprocess_steps.begin(),
                                    config.postprocess_steps.end());
    const ExactSolution& exact = *scenario.exact;
    auto record = [&](long n, double t, const FieldState& state) {
        const bool last = n == report.steps;
        if (n % config.error_stride != 0 && !last)
            return;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        double post_E = nan, post_H = nan;
        if (last || config.postprocess_all || post_steps.count(n))
        {
            const PostprocessedState ps = post.postprocess(state);
            post_E = hcurl_error(ps, mesh, exact, t, Field::E);
            post_H = hcurl_error(ps, mesh, exact, t, Field::H);
            report.max_moment_residual = std::max(report.max_moment_residual, ps.max_moment_residual);
        }
        for (auto [series, field, pv] : {std::tuple{&report.errors_E, Field::E, post_E},
                                         std::tuple{&report.errors_H, Field::H, post_H}})
        {
            series->step.push_back(n);
            series->t.push_back(t);
            series->err_raw.push_back(hcurl_error(state, mesh, exact, t, field));
            series->err_post.push_back(pv);
        }
    };

    record(0, 0.0, u);
    run_simulation(u, final_time, report.dt, operator_rhs(op), {record});

    report.final_E = report.errors_E.err_raw.back();
    report.final_post_E = report.errors_E.err_post.back();
    report.final_H = report.errors_H.err_raw.back();
    report.final_post_H = report.errors_H.err_post.back();

    std::filesystem::create_directories(config.out_dir);
    write_error_csv(report.errors_E, config.out_dir / "errors_E.csv");
    write_error_csv(report.errors_H, config.out_dir / "errors_H.csv");
    write_state_snapshot(u, config.out_dir / "snapshot.txt");

    nlohmann::ordered_json j;
    j["scenario"] = report.scenario;
    j["k"] = k;
    if (report.n > 0)
        j["n"] = report.n;
    else
        j["mesh"] = config.mesh_file;
    j["h"] = report.h;
    j["elements"] = report.elements;
    j["dt"] = report.dt;
    j["N"] = report.steps;
    j["T"] = final_time;
    j["final"]["E"] = {{"err_raw", report.final_E}, {"err_post", report.final_post_E}};
    j["final"]["H"] = {{"err_raw", report.final_H}, {"err_post", report.final_post_H}};
    j["max_moment_residual"] = report.max_moment_residual;
    write_file(config.out_dir / "summary.json", j.dump(2) + "\n");
    return report;
}

std::vector<RunReport> run_sweep(const RunConfig& config)
{
    validate(config);
    if (config.sweep.empty())
        throw ConfigError("sweep list is empty");
    if (!config.mesh_file.empty())
        throw ConfigError("sweeps need a structured mesh, not a mesh file");

    std::vector<RunReport> reports;
    for (int n : config.sweep)
    {
        RunConfig c = config;
        c.n = n;
        c.sweep.clear();
        c.out_dir = config.out_dir / ("n" + std::to_string(n));
        reports.push_back(run(c));
    }

    std::vector<double> hs;
    std::vector<std::vector<double>> errs(4);
    for (const auto& r : reports)
    {
        hs.push_back(r.h);
        errs[0].push_back(r.final_E);
        errs[1].push_back(r.final_post_E);
        errs[2].push_back(r.final_H);
        errs[3].push_back(r.final_post_H);
    }
    std::ostringstream out;
    out << "n,h,err_E,eoc_E,err_post_E,eoc_post_E,err_H,eoc_H,err_post_H,eoc_post_H\n";
    if (reports.size() == 1)
    {
        const auto& r = reports[0];
        out << r.n << ',' << format_double(r.h);
        for (const auto& e : errs)
            out << ',' << format_double(e[0]) << ',';
        out << '\n';
    }
    else
    {
        std::vector<std::vector<EocRow>> tables;
        for (const auto& e : errs)
            tables.push_back(eoc(e, hs));
        for (std::size_t i = 0; i < reports.size(); ++i)
        {
            out << reports[i].n << ',' << format_double(hs[i]);
            for (const auto& table : tables)
            {
                out << ',' << format_double(table[i].error) << ',';
                if (table[i].has_eoc)
                    out << format_double(table[i].eoc);
            }
            out << '\n';
        }
    }
    std::filesystem::create_directories(config.out_dir);
    write_file(config.out_dir / "eoc.csv", out.str());
    return reports;
}

std::vector<ProbeErrors> compare_with_reference(const RunConfig& config)
{
    validate(config);
    const Scenario scenario = configured_scenario(config);
    const Mesh mesh = build_mesh(config, scenario);
    const std::vector<Probe> probes = config.probes.empty() ? scenario.probes : config.probes;
    if (probes.empty())
        throw ConfigError("no probe points for scenario '" + scenario.name + "'");

    std::vector<int> probe_element;
    for (const auto& p : probes)
    {
        const int e = locate_point(mesh, p.point);
        if (e < 0)
            throw ConfigError("probe " + p.name + " lies outside the mesh");
        probe_element.push_back(e);
    }
    std::vector<int> elements = probe_element;
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());

    const int k = config.degree;
    const int k_ref = config.reference_degree ? config.reference_degree : k + 2;
    if (k_ref > kMaxSolverDegree)
        throw ConfigError("reference degree " + std::to_string(k_ref) + " exceeds 4");
    const int divisor = config.reference_dt_divisor;
    const double final_time = config.final_time.value_or(scenario.final_time);
    // The CFL step is shortened so that both grids end exactly at T without a partial step.
    const double dt = config.dt ? *config.dt
                                : final_time / step_count(final_time, cfl_time_step(mesh, k));
    const double dt_ref = dt / divisor;
    const long steps = step_count(final_time, dt);
    const long steps_ref = step_count(final_time, dt_ref);
    if (steps_ref != steps * divisor)
        throw TimeGridMismatch("reference grid has " + std::to_string(steps_ref) +
                               " steps, expected " + std::to_string(steps * divisor));

    std::vector<ProbeSeries> reference(probes.size()), primary(probes.size()),
        postprocessed(probes.size());
    {
        MaxwellOperator op(mesh, k_ref, scenario.source);
        FieldState u = project_initial_conditions(scenario.initial_E, scenario.initial_H, mesh,
                                                  op.reference());
        auto record = [&](long m, double t, const FieldState& state) {
            if (m % divisor != 0)
                return;
            const long n = m / divisor;
            const double t_primary = n == steps ? final_time : n * dt;
            if (std::abs(t - t_primary) > 1e-9 * dt)
                throw TimeGridMismatch("reference step " + std::to_string(m) +
                                       " is not aligned with primary step " + std::to_string(n));
            for (std::size_t i = 0; i < probes.size(); ++i)
            {
                const FieldValue c = curl_at(state, mesh, probe_element[i], probes[i].point);
                reference[i].curl_E.push_back(c.E);
                reference[i].curl_H.push_back(c.H);
            }
        };
        run_simulation(u, final_time, dt_ref, operator_rhs(op), {record});
    }

    MaxwellOperator op(mesh, k, scenario.source);
    Postprocessor post(mesh, k, scenario.source);
    FieldState u = project_initial_conditions(scenario.initial_E, scenario.initial_H, mesh,
                                              op.reference());
    double max_residual = 0.0;
    auto record = [&](long, double, const FieldState& state) {
        const PostprocessedState ps = post.postprocess(state, &elements);
        max_residual = std::max(max_residual, ps.max_moment_residual);
        for (std::size_t i = 0; i < probes.size(); ++i)
        {
            const FieldValue c = curl_at(state, mesh, probe_element[i], probes[i].point);
            primary[i].curl_E.push_back(c.E);
            primary[i].curl_H.push_back(c.H);
            const FieldValue cp = curl_at(ps, mesh, probe_element[i], probes[i].point);
            postprocessed[i].curl_E.push_back(cp.E);
            postprocessed[i].curl_H.push_back(cp.H);
        }
    };
    run_simulation(u, final_time, dt, operator_rhs(op), {record});

    std::vector<ProbeErrors> result;
    std::ostringstream csv;
    csv << "probe,x,y,z,field,err,err_post\n";
    for (std::size_t i = 0; i < probes.size(); ++i)
    {
        result.push_back(
            probe_relative_errors(probes[i].name, reference[i], primary[i], postprocessed[i]));
        const ProbeErrors& r = result.back();
        const Vec3& x = probes[i].point;
        const std::string where = r.name + ',' + format_double(x[0]) + ',' +
                                  format_double(x[1]) + ',' + format_double(x[2]);
        csv << where << ",E," << format_double(r.err_E) << ',' << format_double(r.err_post_E)
            << '\n';
        csv << where << ",H," << format_double(r.err_H) << ',' << format_double(r.err_post_H)
            << '\n';
    }

    std::filesystem::create_directories(config.out_dir);
    write_file(config.out_dir / "probe_errors.csv", csv.str());
    nlohmann::ordered_json j;
    j["scenario"] = scenario.name;
    j["k"] = k;
    j["k_reference"] = k_ref;
    j["elements"] = mesh.num_elements();
    j["h"] = grid_size(config, scenario, mesh);
    j["dt"] = dt;
    j["dt_reference"] = dt_ref;
    j["N"] = steps;
    j["N_reference"] = steps_ref;
    j["T"] = final_time;
    j["max_moment_residual"] = max_residual;
    write_file(config.out_dir / "summary.json", j.dump(2) + "\n");
    return result;
}

}  // namespace dgmax
