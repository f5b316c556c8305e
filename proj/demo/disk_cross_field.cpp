// Smooth cross field on a unit disk: linear relaxation vs. L-BFGS from a
// random start, on vertex and triangle sampling.
#include <cstdio>

#include "frameflow/frameflow.hpp"

int main()
{
    using namespace frameflow;
    const Mesh disk = make_disk(8);

    for (const auto& graph : {build_primal(disk), build_dual(disk)}) {
        auto relaxed = solve_field_dedicated(graph);
        auto random = solve_field_lbfgs(graph, init_random(graph, 7), SolverConfig{});

        for (const auto* f : {&relaxed, &random}) {
            auto sig = signature(graph, *f);
            std::printf("%-6s %-9s energy %8.3f  singularities %zu  total index %+d\n",
                        std::string(to_string(graph.sampling())).c_str(), f->provenance.solver.c_str(),
                        energy(graph, f->theta), sig.singularities.size(), sig.total_index);
        }
    }
}
