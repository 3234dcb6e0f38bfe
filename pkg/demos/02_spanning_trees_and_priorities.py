"""From an incomplete comparison matrix to priorities, tree by tree.

A spanning tree of the comparison graph is a minimal self-sufficient set of
judgments: it fixes every ratio by multiplying along paths, so each tree
yields one complete consistent matrix and one priority vector. Enumerating
all trees extracts every independent reading the data supports.
"""

import numpy as np

from treeconsensus import (
    Judgment,
    ScaleRegistry,
    build_pcm,
    enumerate_trees,
    priorities_from_icpcm,
    reconstruct_icpcm,
)

registry = ScaleRegistry()
unified = registry.unified()
s9 = registry.get(9)

# one expert, four options, five of six comparisons answered
judgments = [
    Judgment("alice", 0, 1, 2, s9, ">"),   # option 0 twice as good as 1
    Judgment("alice", 0, 2, 4, s9, ">"),
    Judgment("alice", 1, 2, 2, s9, ">"),
    Judgment("alice", 1, 3, 2, s9, "<"),   # option 3 dominates
    Judgment("alice", 2, 3, 4, s9, "<"),
]
pcm = build_pcm(judgments, 4, unified, expert="alice")
print("alice's matrix (NaN = not answered):")
print(np.round(pcm.to_array(), 3))

trees = enumerate_trees(pcm)
print(f"\nher graph misses edge (0,3); it still supports {len(trees)} spanning trees "
      "(a complete graph on 4 options would give 16)")

for tree in trees[:3]:
    edges = ", ".join(f"{i}-{j}={value:g}" for i, j, value, _ in tree.edges)
    icpcm = reconstruct_icpcm(tree)
    w = priorities_from_icpcm(icpcm)
    print(f"  tree {tree.index}: [{edges}] -> priorities {np.round(w.w, 4)}")

print("\neach tree completes the matrix consistently, e.g. tree 0 fills (0,3):")
print(np.round(reconstruct_icpcm(trees[0]).matrix, 3))
