"""Estimation scales and how much a judgment weighs.

Experts pick a scale per comparison: a 9-grade scale carries more information
than a yes-or-no 2-grade scale, and an unanswered comparison carries none.
This demo walks through grade conversion into the most detailed scale and the
geometric-mean weights of whole comparison sets.
"""

import math

from treeconsensus import Scale, ScaleRegistry, hartley_weight, to_unified, tree_scale_weight

registry = ScaleRegistry()           # {2, 3, 5, 7, 9} grades by default
unified = registry.unified()
print(f"registered scales: {registry.grade_counts()}, unified scale: {unified.grades} grades")

print("\ninformation weight of a single comparison (log2 of the grade count):")
for grades in registry.grade_counts():
    print(f"  {grades}-grade scale -> {hartley_weight(Scale(grades)):.4f} bits")
print(f"  missing comparison -> {hartley_weight(None):.4f} bits")

print("\nconverting grades into the unified 9-grade scale:")
for grades, grade in [(5, 1), (5, 3), (5, 5), (7, 2), (7, 4)]:
    mapped = to_unified(grade, registry.get(grades), unified)
    print(f"  grade {grade} of {grades} -> unified grade {mapped}")

print("\na spanning tree of comparisons weighs the geometric mean of its edges:")
uniform = [registry.get(9)] * 3
mixed = [registry.get(7), registry.get(9), registry.get(9)]
broken = [registry.get(9), None, registry.get(9)]
print(f"  three 9-grade edges   -> {tree_scale_weight(uniform):.4f}  (= log2 9 = {math.log2(9):.4f})")
print(f"  edges on 7/9/9 grades -> {tree_scale_weight(mixed):.4f}")
print(f"  one edge missing      -> {tree_scale_weight(broken):.4f}  (the tree is unusable)")
