#include "wgmfem/experiment.hpp"

#include "wgmfem/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace wgmfem {

using nlohmann::json;

void ExperimentConfig::validate() const
{
    if (example != "example1" && example != "example2" && example != "patch" && example != "custom")
        throw Error("config: unknown example '" + example + "'");
    if (k < 1 || k > 3)
        throw Error("config: k must be 1, 2 or 3");
    if (!(kappa[0] > 0.0 && kappa[1] > 0.0))
        throw Error("config: kappa values must be positive");
    if (levels.empty())
        throw Error("config: at least one level is required");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 2)
            throw Error("config: levels must be at least 2");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw Error("config: levels must be strictly increasing");
    }
    if (quad_bump < 0)
        throw Error("config: quad_bump must be nonnegative");
    if (mesh_type != "auto" && mesh_type != "tri" && mesh_type != "quad")
        throw Error("config: mesh must be auto, tri or quad");
    if (example == "custom" && (!domain || !curve))
        throw Error("config: the custom example needs a domain and a curve");
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const { return to_json(*this) == to_json(o); }

json curve_to_json(const InterfaceCurve& c)
{
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return {{"kind", "circle"}, {"center", {s.center.x(), s.center.y()}}, {"radius", s.radius}};
            } else if constexpr (std::is_same_v<T, SineGraph>) {
                return {{"kind", "graph"}, {"amp", s.amp}, {"freq", s.freq}};
            } else {
                return {{"kind", "segment"}, {"a", {s.a.x(), s.a.y()}}, {"b", {s.b.x(), s.b.y()}}};
            }
        },
        c.shape());
}

InterfaceCurve curve_from_json(const json& j)
{
    try {
        const std::string kind = j.at("kind");
        auto pt = [](const json& p) { return Point(p.at(0).get<double>(), p.at(1).get<double>()); };
        if (kind == "circle")
            return InterfaceCurve::circle(pt(j.at("center")), j.at("radius").get<double>());
        if (kind == "graph")
            return InterfaceCurve::graph(j.value("amp", 0.05), j.value("freq", 3.0));
        if (kind == "segment")
            return InterfaceCurve::segment(pt(j.at("a")), pt(j.at("b")));
        throw Error("config: unknown curve kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw Error(std::string("config: bad curve specification: ") + e.what());
    }
}

json to_json(const ExperimentConfig& c)
{
    json j;
    j["example"] = c.example;
    j["k"] = c.k;
    j["kappa"] = {c.kappa[0], c.kappa[1]};
    j["levels"] = c.levels;
    j["correction"] = c.correction;
    j["quad_bump"] = c.quad_bump;
    j["output"] = c.output;
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    j["deep"] = c.deep;
    j["taylor"] = c.taylor == TaylorMode::Fast ? "fast" : "explicit";
    j["mesh"] = c.mesh_type;
    if (c.domain)
        j["domain"] = {c.domain->xmin, c.domain->xmax, c.domain->ymin, c.domain->ymax};
    if (c.curve)
        j["curve"] = curve_to_json(*c.curve);
    return j;
}

ExperimentConfig config_from_json(const json& j)
{
    ExperimentConfig c;
    try {
        c.example = j.value("example", c.example);
        c.k = j.value("k", c.k);
        if (j.contains("kappa"))
            c.kappa = {j.at("kappa").at(0).get<double>(), j.at("kappa").at(1).get<double>()};
        if (j.contains("levels"))
            c.levels = j.at("levels").get<std::vector<int>>();
        c.correction = j.value("correction", c.correction);
        c.quad_bump = j.value("quad_bump", c.quad_bump);
        c.output = j.value("output", c.output);
        if (j.contains("seed") && !j.at("seed").is_null())
            c.seed = j.at("seed").get<std::uint64_t>();
        c.deep = j.value("deep", c.deep);
        const std::string taylor = j.value("taylor", std::string("fast"));
        if (taylor != "fast" && taylor != "explicit")
            throw Error("config: taylor must be fast or explicit");
        c.taylor = taylor == "fast" ? TaylorMode::Fast : TaylorMode::Explicit;
        c.mesh_type = j.value("mesh", c.mesh_type);
        if (j.contains("domain")) {
            const auto& d = j.at("domain");
            c.domain = Box{d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>(), d.at(3).get<double>()};
        }
        if (j.contains("curve"))
            c.curve = curve_from_json(j.at("curve"));
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ManufacturedCase make_case(const ExperimentConfig& c)
{
    if (c.example == "example1")
        return example1_case(c.kappa);
    if (c.example == "example2")
        return example2_case(c.kappa);
    if (c.example == "patch")
        return patch_case(c.kappa);
    if (c.example == "custom") {
        if (!c.domain || !c.curve)
            throw Error("config: the custom example needs a domain and a curve");
        return custom_case(*c.domain, *c.curve, c.kappa);
    }
    throw Error("config: unknown example '" + c.example + "'");
}

PolyMesh make_mesh(const ExperimentConfig& c, const ManufacturedCase& mc, int level)
{
    const int n = static_cast<int>(std::lround(level * std::max(mc.domain.width(), mc.domain.height())));
    std::string type = c.mesh_type;
    if (type == "auto")
        type = c.example == "example2" ? "quad" : "tri";
    PolyMesh mesh = type == "quad" ? generate_fitted_quad_mesh(mc.domain, mc.curve, n)
                                   : generate_fitted_tri_mesh(mc.domain, mc.curve, n);
    if (c.seed)
        mesh = perturb_mesh(mesh, mc.curve, *c.seed + static_cast<std::uint64_t>(level));
    return mesh;
}

std::vector<int> effective_levels(const ExperimentConfig& c, std::vector<std::string>* notes)
{
    std::vector<int> out;
    for (int l : c.levels) {
        if (c.k == 3 && l > 32 && !c.deep) {
            if (notes)
                notes->push_back("level " + std::to_string(l) + " skipped for k = 3; pass --deep to run it");
            continue;
        }
        out.push_back(l);
    }
    return out;
}

ExperimentError::ExperimentError(int level, const std::string& what)
    : Error("level " + std::to_string(level) + ": " + what), level_(level)
{
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunHooks& hooks)
{
    config.validate();
    ExperimentResult result;
    result.config = config;
    const auto levels = effective_levels(config, &result.notes);
    if (hooks.log)
        for (const auto& n : result.notes)
            *hooks.log << "note: " << n << "\n";
    const ManufacturedCase mc = make_case(config);
    const Spaces spaces = Spaces::from_degree(config.k);

    AssemblyOptions opt;
    opt.correction = config.correction;
    opt.taylor = config.taylor;
    opt.quad_bump = config.quad_bump;

    for (int level : levels) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const PolyMesh mesh = make_mesh(config, mc, level);
            if (!hooks.dump_mesh.empty())
                save_mesh(mesh, hooks.dump_mesh + "_L" + std::to_string(level) + ".mesh");
            const Assembler assembler(mesh, mc.curve, spaces, opt);
            const SaddleSystem system = assembler.assemble(mc.problem_data());
            if (!hooks.dump_system.empty())
                dump_system(system, hooks.dump_system + "_L" + std::to_string(level) + ".mtx");
            const WgSolution sol = solve(system);

            LevelResult r;
            r.level = level;
            r.h = 1.0 / level;
            r.cells = static_cast<int>(mesh.num_cells());
            r.dofs = system.size();
            r.e_u = energy_error(system, mesh, sol.u, mc, 2 + config.quad_bump);
            r.e_p = pressure_error(mesh, system.dofs, sol.p, mc, 2 + config.quad_bump);
            r.p_integral = pressure_integral(system, sol.p);
            r.report = sol.report;
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.record.add(r.h, r.e_u, r.e_p);
            result.levels.push_back(r);
            if (hooks.log) {
                char line[256];
                std::snprintf(line, sizeof line,
                              "level %d: %d cells, %d unknowns, e_u %.3e, e_p %.3e, residual %.1e (%s), %.1f s\n", level,
                              r.cells, r.dofs, r.e_u, r.e_p, r.report.residual, r.report.backend.c_str(), r.seconds);
                *hooks.log << line << std::flush;
            }
        } catch (const ExperimentError&) {
            throw;
        } catch (const std::exception& e) {
            throw ExperimentError(level, e.what());
        }
    }
    if (!config.output.empty()) {
        std::ofstream os(config.output);
        if (!os)
            throw Error("cannot write CSV output " + config.output);
        result.record.write_csv(os);
    }
    return result;
}

std::vector<CheckResult> selfcheck(const SelfcheckOptions& options)
{
    std::vector<CheckResult> out;
    auto add = [&](std::string name, bool ok, double value, double limit) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.3e (limit %.1e)", value, limit);
        out.push_back({std::move(name), ok, buf});
    };

    const double q = quadrature_exactness_defect(10);
    add("quadrature exactness", q < 1e-12, q, 1e-12);

    const auto ex1 = example1_case({1.0, 10.0});
    const PolyMesh mesh = generate_fitted_tri_mesh(ex1.domain, ex1.curve, 8);

    const double comm = commutativity_defect(mesh, 2, 3, 7);
    add("commutativity", comm < 1e-10, comm, 1e-10);

    const double trick = taylor_trick_deviation(mesh, ex1.curve, 3, 100, 11, options.disable_pullback);
    add("taylor trick equivalence", trick < 1e-12, trick, 1e-12);

    const double orth = projection_orthogonality_defect(mesh, 2);
    add("projection optimality", orth < 1e-10, orth, 1e-10);

    const double slope = circle_fit_slope({16, 32, 64});
    char buf[128];
    std::snprintf(buf, sizeof buf, "slope %.3f (minimum 1.8)", slope);
    out.push_back({"interface fit O(h^2)", slope >= 1.8, buf});
    return out;
}

} // namespace wgmfem
