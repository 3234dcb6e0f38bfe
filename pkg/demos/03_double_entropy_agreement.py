"""Scoring agreement with the double-entropy index.

Priority values are binned onto a discrete spectrum; the index combines two
entropies - where the occupied grades sit (gap entropy) and how the mass
splits among them (frequency entropy) - into a single 0..1 agreement score.
1 means unanimity, 0 means maximal spread with uniform support.
"""

import numpy as np

from treeconsensus import PriorityVector, agreement_report, build_spectrum, double_entropy_index

print("hand-built spectrums over a 9-grade domain:")
cases = [
    ("unanimous: everyone says grade 5", [(5, 6)]),
    ("two adjacent camps", [(4, 3), (5, 3)]),
    ("two distant camps", [(1, 3), (9, 3)]),
    ("spread everywhere", [(g, 1) for g in range(1, 10)]),
]
for label, votes in cases:
    spectrum = build_spectrum(
        [(grade / 9, float(count)) for grade, count in votes], grades=9)
    print(f"  {label:<35} index = {double_entropy_index(spectrum):.4f}")

print("\nper-coordinate report over whole priority vectors (threshold 0.7):")
group = [
    PriorityVector(np.array([0.42, 0.33, 0.15, 0.10])),
    PriorityVector(np.array([0.44, 0.31, 0.15, 0.10])),
    PriorityVector(np.array([0.10, 0.33, 0.15, 0.42])),   # the dissenter
]
report = agreement_report([(v, 1.0) for v in group], epsilon=0.01, threshold=0.7)
for coordinate, index in enumerate(report.K):
    marker = "ok " if index > report.threshold else "LOW"
    print(f"  coordinate {coordinate}: K = {index:.4f}  {marker}")
print(f"  passing: {report.passing}; worst coordinate: {report.worst_coordinate}")
