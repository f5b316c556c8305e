#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "frameflow/dedicated.hpp"
#include "frameflow/energy.hpp"
#include "frameflow/graph.hpp"
#include "frameflow/init.hpp"
#include "frameflow/mesh.hpp"
#include "frameflow/optimize.hpp"
#include "frameflow/svg.hpp"
#include "frameflow/topology.hpp"

namespace frameflow
{

enum class SolverKind { Dedicated, Lbfgs };

inline std::string_view to_string(SolverKind s) { return s == SolverKind::Dedicated ? "dedicated" : "lbfgs"; }

inline SolverKind parse_solver(std::string_view s)
{
    if (s == "dedicated") {
        return SolverKind::Dedicated;
    }
    if (s == "lbfgs") {
        return SolverKind::Lbfgs;
    }
    throw std::invalid_argument("unknown solver '" + std::string(s) + "'");
}

/**
 * @brief The comparison matrix: samplings x solvers x inits x seeds.
 *
 * The dedicated solver ignores inits; L-BFGS needs at least one init; a
 * random init needs at least one seed.
 */
struct ExperimentPlan {
    std::filesystem::path mesh_path;
    std::vector<Sampling> samplings{Sampling::Primal, Sampling::Dual};
    std::vector<SolverKind> solvers{SolverKind::Dedicated, SolverKind::Lbfgs};
    std::vector<InitKind> inits{InitKind::Random, InitKind::Front};
    std::vector<std::uint64_t> seeds{1};
    SolverConfig config;
    /// empty: nothing is written
    std::filesystem::path output_dir;
    bool write_traces{false};
    unsigned jobs{1};

    void validate() const
    {
        config.validate();
        if (samplings.empty() || solvers.empty()) {
            throw std::invalid_argument("ExperimentPlan: need at least one sampling and one solver");
        }
        bool lbfgs = std::find(solvers.begin(), solvers.end(), SolverKind::Lbfgs) != solvers.end();
        if (lbfgs && inits.empty()) {
            throw std::invalid_argument("ExperimentPlan: lbfgs requires at least one init");
        }
        bool random = std::find(inits.begin(), inits.end(), InitKind::Random) != inits.end();
        if (lbfgs && random && seeds.empty()) {
            throw std::invalid_argument("ExperimentPlan: random init requires at least one seed");
        }
    }
};

/// One cell of the matrix.
struct CellSpec {
    Sampling sampling{Sampling::Primal};
    SolverKind solver{SolverKind::Dedicated};
    std::optional<InitKind> init;
    std::optional<std::uint64_t> seed;

    [[nodiscard]] std::string id() const
    {
        std::string s = std::string(to_string(sampling)) + '-' + std::string(to_string(solver));
        if (init) {
            s += '-' + std::string(to_string(*init));
        }
        if (seed) {
            s += "-s" + std::to_string(*seed);
        }
        return s;
    }
};

struct CellResult {
    CellSpec spec;
    std::string status;
    bool failed{false};
    double energy{0};
    int iterations{0};
    FrameField field;
    TopologySignature signature;
    /// topology of the starting field (L-BFGS cells only)
    std::optional<TopologySignature> initial_signature;
    std::vector<TracePoint> trace;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    std::string summary_csv;

    [[nodiscard]] bool any_failed() const
    {
        return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.failed; });
    }
};

inline constexpr const char* kSummaryHeader =
    "cell,sampling,solver,init,seed,energy,iterations,singularities,total_index,hole_turnings,status";

inline std::vector<CellSpec> enumerate_cells(const ExperimentPlan& plan)
{
    std::vector<CellSpec> cells;
    for (auto sampling : plan.samplings) {
        for (auto solver : plan.solvers) {
            if (solver == SolverKind::Dedicated) {
                cells.push_back({sampling, solver, std::nullopt, std::nullopt});
                continue;
            }
            for (auto init : plan.inits) {
                if (init == InitKind::Random) {
                    for (auto seed : plan.seeds) {
                        cells.push_back({sampling, solver, init, seed});
                    }
                }
                else {
                    cells.push_back({sampling, solver, init, std::nullopt});
                }
            }
        }
    }
    return cells;
}

/** @brief Solve one cell on a prebuilt graph. Never throws; errors land in status. */
inline CellResult run_cell(const FieldGraph& graph, const CellSpec& spec, const SolverConfig& config)
{
    CellResult r;
    r.spec = spec;
    try {
        if (spec.solver == SolverKind::Dedicated) {
            r.field = solve_field_dedicated(graph);
            r.status = "ok";
        }
        else {
            InitSpec init{spec.init.value_or(InitKind::Front), spec.seed};
            auto theta0 = initialize(graph, init);
            r.initial_signature = signature(graph, theta0);
            SolveResult sr;
            r.field = solve_field_lbfgs(graph, theta0, config,
                                        {"lbfgs", std::string(to_string(init.kind)), init.seed}, &sr);
            r.iterations = sr.iterations;
            r.trace = std::move(sr.trace);
            r.status = sr.status == SolveStatus::Converged ? "ok" : std::string(to_string(sr.status));
        }
        r.energy = energy(graph, r.field.theta);
        r.signature = signature(graph, r.field);
    }
    catch (const std::exception& e) {
        r.failed = true;
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        r.status = "error: " + msg;
    }
    return r;
}

namespace detail
{
inline std::string hole_column(const TopologySignature& s)
{
    std::string out;
    for (const auto& h : s.holes) {
        if (!out.empty()) {
            out += ';';
        }
        out += std::to_string(h.loop) + ':' + std::to_string(h.turning);
    }
    return out;
}

inline void write_text(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + p.string());
    }
    f << text;
}
}  // namespace detail

inline std::string summary_row(const CellResult& c)
{
    std::string row = c.spec.id() + ',' + std::string(to_string(c.spec.sampling)) + ',' +
                      std::string(to_string(c.spec.solver)) + ',' +
                      (c.spec.init ? std::string(to_string(*c.spec.init)) : "none") + ',' +
                      (c.spec.seed ? std::to_string(*c.spec.seed) : "") + ',';
    if (c.failed) {
        row += ",,,,,";
    }
    else {
        row += detail::format_double(c.energy) + ',' + std::to_string(c.iterations) + ',' +
               std::to_string(c.signature.singularities.size()) + ',' + std::to_string(c.signature.total_index) +
               ',' + detail::hole_column(c.signature) + ',';
    }
    return row + c.status;
}

/**
 * @brief Run every cell of the plan on an already loaded mesh.
 *
 * Cells are independent and may run on several threads; results are stored
 * by cell position, so the output does not depend on scheduling. When
 * output_dir is set, writes per cell <id>.field.txt, <id>.sig.json,
 * <id>.svg (and <id>.trace.csv if requested) plus summary.csv.
 */
inline ExperimentResult run_experiment(const Mesh& mesh, const ExperimentPlan& plan)
{
    plan.validate();
    ExperimentResult result;
    auto specs = enumerate_cells(plan);
    result.cells.resize(specs.size());

    std::optional<FieldGraph> primal, dual;
    std::string graph_error;
    try {
        if (std::find(plan.samplings.begin(), plan.samplings.end(), Sampling::Primal) != plan.samplings.end()) {
            primal = build_primal(mesh);
        }
        if (std::find(plan.samplings.begin(), plan.samplings.end(), Sampling::Dual) != plan.samplings.end()) {
            dual = build_dual(mesh);
        }
    }
    catch (const std::exception& e) {
        graph_error = e.what();
    }

    auto work = [&](std::size_t k) {
        const auto& spec = specs[k];
        const auto& g = spec.sampling == Sampling::Primal ? primal : dual;
        if (!g) {
            result.cells[k].spec = spec;
            result.cells[k].failed = true;
            result.cells[k].status = "error: graph construction failed: " + graph_error;
            return;
        }
        result.cells[k] = run_cell(*g, spec, plan.config);
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(plan.jobs, static_cast<unsigned>(specs.size())));
    if (jobs <= 1) {
        for (std::size_t k = 0; k < specs.size(); ++k) {
            work(k);
        }
    }
    else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < specs.size(); k = next++) {
                    work(k);
                }
            });
        }
    }

    result.summary_csv = std::string(kSummaryHeader) + '\n';
    for (const auto& c : result.cells) {
        result.summary_csv += summary_row(c) + '\n';
    }

    if (!plan.output_dir.empty()) {
        std::filesystem::create_directories(plan.output_dir);
        for (const auto& c : result.cells) {
            if (c.failed) {
                continue;
            }
            const auto id = c.spec.id();
            const auto& g = c.spec.sampling == Sampling::Primal ? *primal : *dual;
            detail::write_text(plan.output_dir / (id + ".field.txt"), write_field(c.field));
            detail::write_text(plan.output_dir / (id + ".sig.json"), to_json(c.signature).dump(2) + '\n');
            detail::write_text(plan.output_dir / (id + ".svg"), render_svg(mesh, g, c.field, c.signature));
            if (plan.write_traces && c.spec.solver == SolverKind::Lbfgs) {
                std::string trace = "iter,f,grad_norm\n";
                for (std::size_t i = 0; i < c.trace.size(); ++i) {
                    trace += std::to_string(i) + ',' + detail::format_double(c.trace[i].f) + ',' +
                             detail::format_double(c.trace[i].grad_norm) + '\n';
                }
                detail::write_text(plan.output_dir / (id + ".trace.csv"), trace);
            }
        }
        detail::write_text(plan.output_dir / "summary.csv", result.summary_csv);
    }
    return result;
}

inline std::string read_text_file(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot read " + p.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/** @brief Load plan.mesh_path and run the plan. */
inline ExperimentResult run_experiment(const ExperimentPlan& plan)
{
    return run_experiment(load_mesh(read_text_file(plan.mesh_path)), plan);
}

}  // namespace frameflow
