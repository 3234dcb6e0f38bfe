"""Aggregating a whole group: competences, scale weights, and tree ratings.

Every tree of every expert is replicated against each group member and rated:
closeness to that member's raw matrix (consistency for the owner,
compatibility for the others), both experts' competences, and the information
weights of the scales involved. The rating-weighted geometric mean over all
trees is the group answer; the simple unweighted mean is shown next to it.
"""

import numpy as np

from treeconsensus import (
    EngineConfig,
    Judgment,
    ScaleRegistry,
    build_pcm,
    evaluate_group,
    simple_aggregate,
)

registry = ScaleRegistry()
unified = registry.unified()

options = ["expand north", "expand south", "partner up", "hold position"]
ratios = {(0, 1): 2, (0, 2): 4, (0, 3): 8, (1, 2): 2, (1, 3): 4, (2, 3): 2}

pcms = {}
for expert, habit, blind_spot in [
    ("casey", 9, (1, 2)),       # skips one comparison
    ("jordan", 7, None),
    ("riley", 5, (0, 3)),       # skips another, grades coarsely
]:
    scale = registry.get(habit)
    judgments = []
    for (i, j), ratio in ratios.items():
        if blind_spot == (i, j):
            continue
        # snap the target ratio onto this expert's own scale
        grade = max(1, min(habit, round(ratio * (habit - 1) / 8 + (1 - (habit - 1) / 8))))
        judgments.append(Judgment(expert, i, j, grade, scale, ">"))
    pcms[expert] = build_pcm(judgments, 4, unified, expert=expert)

competences = {"casey": 0.5, "jordan": 0.3, "riley": 0.2}
evaluation = evaluate_group(pcms, competences, EngineConfig())

print(f"trees per expert: { {e: len(t) for e, t in evaluation.trees.items()} }")
print(f"total trees T = {evaluation.tree_count}, "
      f"rated replicas m*T = {evaluation.result.replica_count}")

print("\nrating-weighted aggregate vs simple geometric mean:")
weighted = evaluation.result.w.w
simple = simple_aggregate(evaluation.vectors).w
for name, wv, sv in zip(options, weighted, simple):
    print(f"  {name:<15} weighted {wv:.4f}   simple {sv:.4f}")

print(f"\nagreement per coordinate: {np.round(evaluation.report.K, 3)}")
print(f"status: {evaluation.status}")
print("\nthe aggregate's implied consistent matrix (feedback target):")
print(np.round(evaluation.result.icpcm.matrix, 3))
