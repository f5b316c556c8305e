#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "frameflow/graph.hpp"
#include "frameflow/mesh.hpp"
#include "frameflow/topology.hpp"

namespace frameflow
{

struct SvgStyle {
    double width_px{800};
    double margin_px{20};
    /// glyph arm length as a fraction of the mean incident edge length
    double arm_scale{0.3};
    /// singularity radius as a fraction of the mean glyph arm
    double singularity_scale{0.6};
};

namespace detail
{
inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}
}  // namespace detail

/**
 * @brief SVG 1.1 picture of a frame field: light mesh edges, one cross
 * glyph per node, singularities as filled circles (red for positive
 * index, blue for negative) and boundary-loop turnings as text labels.
 */
inline std::string render_svg(const Mesh& mesh, const FieldGraph& graph, const FrameField& field,
                              const TopologySignature& sig, const SvgStyle& style = {})
{
    const auto& pos = graph.positions();
    double xmin = std::numeric_limits<double>::max(), ymin = xmin;
    double xmax = std::numeric_limits<double>::lowest(), ymax = xmax;
    auto grow = [&](const Vec2& p) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    };
    for (const auto& p : mesh.vertices()) {
        grow(p);
    }
    for (const auto& p : pos) {
        grow(p);
    }
    if (xmin > xmax) {
        xmin = ymin = 0;
        xmax = ymax = 1;
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double scale = (style.width_px - 2 * style.margin_px) / span;
    const double height = (ymax - ymin) * scale + 2 * style.margin_px;
    auto sx = [&](double x) { return detail::fmt(style.margin_px + (x - xmin) * scale); };
    auto sy = [&](double y) { return detail::fmt(style.margin_px + (ymax - y) * scale); };

    // per-node arm length from incident graph edges
    std::vector<double> edge_sum(graph.node_count(), 0.0);
    std::vector<int> edge_cnt(graph.node_count(), 0);
    double total = 0;
    for (const auto& [i, j] : graph.edges()) {
        double len = norm(pos[i] - pos[j]);
        edge_sum[i] += len;
        edge_sum[j] += len;
        ++edge_cnt[i];
        ++edge_cnt[j];
        total += len;
    }
    double fallback = 0;
    if (!graph.edges().empty()) {
        fallback = total / static_cast<double>(graph.edges().size());
    }
    else {
        for (const auto& e : mesh.edges()) {
            fallback += norm(mesh.vertices()[e[0]] - mesh.vertices()[e[1]]);
        }
        fallback = mesh.edges().empty() ? 0.05 * span : fallback / static_cast<double>(mesh.edges().size());
    }

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + detail::fmt(style.width_px) +
           "\" height=\"" + detail::fmt(height) + "\" viewBox=\"0 0 " + detail::fmt(style.width_px) + ' ' +
           detail::fmt(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    out += "<g stroke=\"#cccccc\" stroke-width=\"0.5\" fill=\"none\">\n";
    for (const auto& e : mesh.edges()) {
        const auto& a = mesh.vertices()[e[0]];
        const auto& b = mesh.vertices()[e[1]];
        out += "<line x1=\"" + sx(a.x) + "\" y1=\"" + sy(a.y) + "\" x2=\"" + sx(b.x) + "\" y2=\"" + sy(b.y) + "\"/>\n";
    }
    out += "</g>\n";

    double arm_total = 0;
    out += "<g stroke=\"#222222\" stroke-width=\"1\" fill=\"none\">\n";
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
        double mean = edge_cnt[i] > 0 ? edge_sum[i] / edge_cnt[i] : fallback;
        double arm = style.arm_scale * mean;
        arm_total += arm;
        const auto& p = pos[i];
        double c = std::cos(field.theta[i]) * arm;
        double s = std::sin(field.theta[i]) * arm;
        // two strokes through the node cover the four arms theta + k pi/2
        out += "<path class=\"glyph\" d=\"M" + sx(p.x - c) + ' ' + sy(p.y - s) + " L" + sx(p.x + c) + ' ' +
               sy(p.y + s) + " M" + sx(p.x + s) + ' ' + sy(p.y - c) + " L" + sx(p.x - s) + ' ' + sy(p.y + c) +
               "\"/>\n";
    }
    out += "</g>\n";

    const double mean_arm = graph.node_count() > 0 ? arm_total / static_cast<double>(graph.node_count()) : 0.0;
    const double radius = style.singularity_scale * mean_arm * scale;
    for (const auto& s : sig.singularities) {
        out += "<circle class=\"" + std::string(s.index > 0 ? "singularity-positive" : "singularity-negative") +
               "\" cx=\"" + sx(s.position.x) + "\" cy=\"" + sy(s.position.y) + "\" r=\"" + detail::fmt(radius) +
               "\" fill=\"" + (s.index > 0 ? "#d62728" : "#1f77b4") + "\"/>\n";
    }

    std::size_t loop = 0;
    for (const auto& c : graph.cycles()) {
        if (c.kind != Cycle::Kind::BoundaryLoop) {
            continue;
        }
        if (loop < sig.holes.size()) {
            Vec2 ctr = c.nodes.empty() ? Vec2{} : pos[c.nodes.front()];
            out += "<text class=\"turning\" x=\"" + sx(ctr.x) + "\" y=\"" + sy(ctr.y) +
                   "\" font-size=\"12\" font-family=\"sans-serif\" text-anchor=\"middle\">loop " +
                   std::to_string(sig.holes[loop].loop) + ": " + std::to_string(sig.holes[loop].turning) +
                   "</text>\n";
        }
        ++loop;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace frameflow
