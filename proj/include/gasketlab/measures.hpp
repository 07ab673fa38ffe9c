// measures.hpp -- cell and vertex measures on a gasket graph.
#pragma once

#include <vector>

#include "gasketlab/geometry.hpp"

namespace gasketlab {

// Mass per cell, indexed in the graph's cell order (one word per slot).
struct CellMeasure {
  int depth = 0;
  std::vector<double> mass;

  double total() const;
};

// The self-similar measure: every depth-n cell carries 1/M_n.
CellMeasure uniform_cell_measure(const GasketGraph& g);

// Mass per vertex.
struct VertexMeasure {
  std::vector<double> mass;

  double total() const;
};

// Discretization convention: each cell splits its mass equally among its
// N+1 vertices.
VertexMeasure vertex_measure_from_cells(const GasketGraph& g, const CellMeasure& cm);

} // namespace gasketlab
