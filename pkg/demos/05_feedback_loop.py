"""The facilitation loop: ask, revise, re-evaluate, until agreement.

One expert strongly disagrees with the group on one comparison. The loop
finds the worst coordinate, asks the most deviant expert to move that cell
toward the group's implied value, and repeats until every coordinate clears
the 0.7 agreement threshold.
"""

import numpy as np

from treeconsensus import (
    EngineConfig,
    GroupState,
    Judgment,
    ScaleRegistry,
    build_pcm,
    run_loop,
)
from treeconsensus.simulate import make_responder

registry = ScaleRegistry()
unified = registry.unified()
s9 = registry.get(9)

ratios = {(0, 1): 2, (0, 2): 4, (0, 3): 8, (1, 2): 2, (1, 3): 4, (2, 3): 2}
pcms = {}
for expert in ("ana", "ben", "kim"):
    judgments = []
    for (i, j), grade in ratios.items():
        if expert == "ben" and (i, j) == (0, 1):
            grade = 9    # ben wildly overrates option 0 against option 1
        judgments.append(Judgment(expert, i, j, grade, s9, ">"))
    pcms[expert] = build_pcm(judgments, 4, unified, expert=expert)

state = GroupState(pcms, {e: 1 / 3 for e in pcms},
                   EngineConfig(epsilon=0.001))

before = state.evaluate()
print(f"before feedback: K = {np.round(before.report.K, 3)}, status {before.status}")

trace = run_loop(state, make_responder("accept"))
for record in trace.rounds:
    request = record.request
    print(f"  round {record.round_number}: asked {request.expert} to move "
          f"({request.i},{request.j}) from {request.current_value:.3f} toward "
          f"{request.suggested_value:.3f}; min K now {record.min_index:.3f}")

print(f"\nafter {len(trace.rounds)} round(s): {trace.status}")
print(f"final K = {np.round(trace.final.report.K, 3)}")
print(f"group priorities: {np.round(trace.final.result.w.w, 4)}")
print(f"ben's revised cell (0,1): {state.pcms['ben'].value(0, 1):.4f}")
