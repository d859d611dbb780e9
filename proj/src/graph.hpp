#pragma once

// Internal helpers for chain decomposition. Not installed.

#include <cstddef>
#include <vector>

namespace mehc::detail {

/// Adjacency list over n nodes.
using Graph = std::vector<std::vector<std::size_t>>;

struct Components {
    std::vector<std::size_t> component_of; // node -> component id
    std::size_t count = 0;
};

/// Strongly connected components (iterative Tarjan).
Components strongly_connected(const Graph& graph);

/// Components with no edge leaving them, i.e. the recurrent classes of a chain.
std::vector<bool> closed_components(const Graph& graph, const Components& components);

/// Nodes reachable from `source` (including it).
std::vector<bool> reachable_from(const Graph& graph, std::size_t source);

} // namespace mehc::detail
