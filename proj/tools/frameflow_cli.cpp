// frameflow: generate test meshes, solve frame fields, run comparison
// matrices and diff topology signatures.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frameflow/frameflow.hpp"

namespace
{

using namespace frameflow;

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg, bool& trace)
{
    cmd->add_option("--memory", cfg.memory, "L-BFGS history size")->capture_default_str();
    cmd->add_option("--grad-tol", cfg.grad_tol, "gradient infinity-norm tolerance")->capture_default_str();
    cmd->add_option("--max-iters", cfg.max_iters, "iteration cap")->capture_default_str();
    cmd->add_option("--c1", cfg.wolfe_c1, "sufficient decrease constant")->capture_default_str();
    cmd->add_option("--c2", cfg.wolfe_c2, "curvature constant")->capture_default_str();
    cmd->add_option("--max-line-search", cfg.max_line_search_steps, "line search evaluations")
        ->capture_default_str();
    cmd->add_flag("--trace", trace, "write <cell>.trace.csv per L-BFGS cell");
}

int report(const ExperimentResult& res)
{
    std::cout << res.summary_csv;
    return res.any_failed() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Frame field design on planar triangle meshes"};
    app.require_subcommand(1);

    // gen
    std::string kind = "disk";
    int resolution = 8;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "write a generated test mesh (OBJ subset)");
    gen->add_option("--kind", kind, "disk | annulus | square")->capture_default_str();
    gen->add_option("--resolution", resolution, "rings or grid size (>= 3)")->capture_default_str();
    gen->add_option("-o,--output", gen_out, "output path (default stdout)");

    // solve
    ExperimentPlan solve_plan;
    std::string sampling = "primal", solver = "lbfgs", init = "front";
    std::uint64_t seed = 1;
    bool solve_trace = false;
    auto* solve = app.add_subcommand("solve", "solve a single cell");
    solve->add_option("--mesh", solve_plan.mesh_path, "mesh file")->required();
    solve->add_option("--sampling", sampling, "primal | dual")->capture_default_str();
    solve->add_option("--solver", solver, "dedicated | lbfgs")->capture_default_str();
    solve->add_option("--init", init, "random | zero | front")->capture_default_str();
    solve->add_option("--seed", seed, "seed for random init")->capture_default_str();
    solve->add_option("--out", solve_plan.output_dir, "output directory");
    add_solver_flags(solve, solve_plan.config, solve_trace);

    // experiment
    ExperimentPlan plan;
    std::vector<std::string> samplings{"primal", "dual"}, solvers{"dedicated", "lbfgs"}, inits{"random", "front"};
    std::vector<std::uint64_t> seeds{1};
    bool exp_trace = false;
    auto* exp = app.add_subcommand("experiment", "run a samplings x solvers x inits x seeds matrix");
    exp->add_option("--mesh", plan.mesh_path, "mesh file")->required();
    exp->add_option("--samplings", samplings, "primal,dual")->delimiter(',')->capture_default_str();
    exp->add_option("--solvers", solvers, "dedicated,lbfgs")->delimiter(',')->capture_default_str();
    exp->add_option("--inits", inits, "random,zero,front")->delimiter(',')->capture_default_str();
    exp->add_option("--seeds", seeds, "seed list for random init")->delimiter(',')->capture_default_str();
    exp->add_option("--out", plan.output_dir, "output directory");
    exp->add_option("--jobs", plan.jobs, "worker threads")->capture_default_str();
    add_solver_flags(exp, plan.config, exp_trace);

    // compare
    std::string sig_a, sig_b;
    auto* cmp = app.add_subcommand("compare", "diff two signature JSON files");
    cmp->add_option("a", sig_a, "first signature")->required();
    cmp->add_option("b", sig_b, "second signature")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            auto text = write_obj(generate_test_mesh(parse_test_mesh_kind(kind), resolution));
            if (gen_out.empty()) {
                std::cout << text;
            }
            else {
                std::ofstream(gen_out, std::ios::binary) << text;
            }
            return 0;
        }
        if (*solve) {
            solve_plan.samplings = {parse_sampling(sampling)};
            solve_plan.solvers = {parse_solver(solver)};
            solve_plan.inits = {parse_init(init)};
            solve_plan.seeds = {seed};
            solve_plan.write_traces = solve_trace;
            return report(run_experiment(solve_plan));
        }
        if (*exp) {
            plan.samplings.clear();
            plan.solvers.clear();
            plan.inits.clear();
            for (const auto& s : samplings) {
                plan.samplings.push_back(parse_sampling(s));
            }
            for (const auto& s : solvers) {
                plan.solvers.push_back(parse_solver(s));
            }
            for (const auto& s : inits) {
                plan.inits.push_back(parse_init(s));
            }
            plan.seeds = seeds;
            plan.write_traces = exp_trace;
            return report(run_experiment(plan));
        }
        if (*cmp) {
            auto a = signature_from_json(nlohmann::json::parse(read_text_file(sig_a)));
            auto b = signature_from_json(nlohmann::json::parse(read_text_file(sig_b)));
            auto d = compare(a, b);
            std::cout << "indices: " << (d.same_indices ? "equal" : "different") << '\n'
                      << "holes: " << (d.same_holes ? "equal" : "different") << '\n'
                      << "singularity count difference: " << d.count_difference << '\n'
                      << d.verdict << '\n';
            return 0;
        }
    }
    catch (const std::exception& e) {
        std::cerr << "frameflow: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
