"""
Exact references on small graphs
================================

On tiny graphs the modularity optimum can be found by listing every
partition, and the expected number of links between two nodes under uniform
random rewiring can be counted exactly.  Both make useful yardsticks.
"""

import numpy as np

from hetmod import LouvainConfig, build, run
from hetmod.oracle import exact_null_matrix, max_modularity_exhaustive, null_expectation_gaps

rng = np.random.default_rng(3)
edges = [((0, i), (0, j)) for i in range(5) for j in range(i + 1, 5) if rng.random() < 0.5]
edges += [((0, i), (1, j)) for i in range(5) for j in range(4) if rng.random() < 0.4]
g = build([5, 4], edges)

best = max_modularity_exhaustive(g)
found = run(g, LouvainConfig(restarts=50, seed=0))
print("exhaustive optimum", round(best.modularity, 6), "in", len(best.partitions), "partitions")
print("heuristic         ", round(found.modularity, 6))

# expected links given the degrees, as fractions; rows sum to the degrees
E = exact_null_matrix([3, 2, 2, 2, 1])
print(np.vectorize(str)(E))
print("row sums", [str(sum(row)) for row in E])

# how far the usual d_i d_j / 2m shortcut is from the exact value
print(np.round(null_expectation_gaps(g, 0, 0).astype(float), 3))
