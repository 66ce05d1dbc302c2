// Command-line driver: convergence sweeps and the self-check suite.

#include "wgmfem/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace wgmfem;

namespace {

int run_command(const ExperimentConfig& base, const CLI::App& cmd, const std::string& config_path,
                const std::string& correction, const std::vector<double>& kappa, const std::vector<double>& domain,
                const std::string& curve, const std::string& taylor, const RunHooks& hooks, bool print_config,
                ExperimentConfig cli)
{
    ExperimentConfig cfg = base;
    if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is)
            throw Error("cannot open config file " + config_path);
        nlohmann::json j;
        try {
            is >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error("config file " + config_path + ": " + e.what());
        }
        cfg = config_from_json(j);
    }
    auto given = [&](const char* name) { return cmd.count(name) > 0; };
    if (given("--example"))
        cfg.example = cli.example;
    if (given("--k"))
        cfg.k = cli.k;
    if (given("--kappa"))
        cfg.kappa = {kappa[0], kappa[1]};
    if (given("--levels"))
        cfg.levels = cli.levels;
    if (given("--correction"))
        cfg.correction = correction == "on";
    if (given("--quad-bump"))
        cfg.quad_bump = cli.quad_bump;
    if (given("--csv"))
        cfg.output = cli.output;
    if (given("--seed"))
        cfg.seed = cli.seed;
    if (given("--deep"))
        cfg.deep = true;
    if (given("--taylor"))
        cfg.taylor = taylor == "fast" ? TaylorMode::Fast : TaylorMode::Explicit;
    if (given("--mesh"))
        cfg.mesh_type = cli.mesh_type;
    if (given("--domain"))
        cfg.domain = Box{domain[0], domain[1], domain[2], domain[3]};
    if (given("--curve")) {
        try {
            cfg.curve = curve_from_json(nlohmann::json::parse(curve));
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("--curve: ") + e.what());
        }
    }
    cfg.validate();
    if (print_config) {
        std::cout << to_json(cfg).dump(2) << "\n";
        return 0;
    }

    std::cout << "example " << cfg.example << ", k = " << cfg.k << ", kappa = (" << cfg.kappa[0] << ", " << cfg.kappa[1]
              << "), correction " << (cfg.correction ? "on" : "off") << "\n";
    const ExperimentResult res = run_experiment(cfg, hooks);
    res.record.write_table(std::cout);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weak Galerkin mixed FEM for Darcy interface problems with curved interfaces"};
    app.require_subcommand(1);

    ExperimentConfig cli;
    std::string config_path, correction = "on", curve, taylor = "fast";
    std::vector<double> kappa, domain;
    RunHooks hooks;
    bool print_config = false;
    bool quiet = false;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "Run a refinement sweep and print the error table");
    run->add_option("--config", config_path, "JSON experiment config (flags override it)")->check(CLI::ExistingFile);
    run->add_option("--example", cli.example, "example1, example2, patch or custom")
        ->check(CLI::IsMember({"example1", "example2", "patch", "custom"}));
    run->add_option("--k", cli.k, "polynomial degree (1-3)")->check(CLI::Range(1, 3));
    run->add_option("--kappa", kappa, "conductivities kappa1 kappa2")->expected(2);
    run->add_option("--levels", cli.levels, "mesh levels L (h = 1/L), increasing")->expected(1, -1);
    run->add_option("--correction", correction, "boundary value correction on/off")->check(CLI::IsMember({"on", "off"}));
    run->add_option("--quad-bump", cli.quad_bump, "extra quadrature order")->check(CLI::NonNegativeNumber);
    run->add_option("--csv", cli.output, "write h,e_u,order_u,e_p,order_p to this file");
    run->add_option("--seed", seed, "randomly perturb interior vertices with this seed");
    run->add_flag("--deep", "allow k = 3 levels above 32");
    run->add_option("--taylor", taylor, "fast or explicit Taylor evaluation")->check(CLI::IsMember({"fast", "explicit"}));
    run->add_option("--mesh", cli.mesh_type, "auto, tri or quad")->check(CLI::IsMember({"auto", "tri", "quad"}));
    run->add_option("--domain", domain, "custom box xmin xmax ymin ymax")->expected(4);
    run->add_option("--curve", curve, R"(custom curve as JSON, e.g. {"kind":"circle","center":[0,0],"radius":0.5})");
    run->add_option("--dump-system", hooks.dump_system, "Matrix Market path prefix for the assembled systems");
    run->add_option("--dump-mesh", hooks.dump_mesh, "path prefix for the generated meshes");
    run->add_flag("--print-config", print_config, "print the resolved config as JSON and exit");
    run->add_flag("--quiet", quiet, "suppress per-level progress lines");

    bool disable_pullback = false;
    auto* check = app.add_subcommand("selfcheck", "Run the fast invariant suite");
    check->add_flag("--disable-pullback", disable_pullback, "evaluate the fast Taylor path at x_h instead of the foot");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            cli.seed = seed;
            if (!quiet)
                hooks.log = &std::cerr;
            return run_command(ExperimentConfig{}, *run, config_path, correction, kappa, domain, curve, taylor, hooks,
                               print_config, cli);
        }
        SelfcheckOptions opt;
        opt.disable_pullback = disable_pullback;
        bool ok = true;
        for (const auto& r : selfcheck(opt)) {
            std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << ": " << r.detail << "\n";
            ok = ok && r.passed;
        }
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
