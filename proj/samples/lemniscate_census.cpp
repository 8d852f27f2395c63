// Critical data, graph and domain census of (z^2 - 1)(z^2 - 4), then the
// component count of |p| = c for a few levels.
#include <iostream>

#include "qdl/graph.hpp"

int main() {
  using namespace qdl;
  const RationalMap r(Polynomial{4.0, 0.0, -5.0, 0.0, 1.0});
  const QuadraticDifferential qd = build(r);

  for (const CriticalValue& v : critical_values(qd))
    std::cout << "critical point " << v.location << "  value " << v.value << "\n";

  const CriticalGraph g = build_graph(qd);
  const DomainConfiguration dc = domain_configurations(g, qd);
  std::cout << "graph: " << g.vertices.size() << " vertices, " << g.edges.size() << " edges, "
            << g.component_count << " components\n"
            << "faces: " << dc.count(FaceKind::Circle) << " circle, " << dc.count(FaceKind::Ring) << " ring\n";

  for (double c : {0.5, 3.0, 100.0})
    std::cout << "|p| = " << c << ": " << lemniscate_components(qd, c, default_window(qd)).count << " components\n";
}
