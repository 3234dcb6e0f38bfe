"""Durable facilitation sessions and the HTTP service.

Sessions persist as one JSON document each, mutate through an append-only
event log, and are served over HTTP for the browser frontend. This demo runs
the whole lifecycle in-process: create, submit, evaluate, answer a revision
request, then prove the event log replays to the same state.
"""

import tempfile

from fastapi.testclient import TestClient

from treeconsensus.service import create_app
from treeconsensus.session import replay_events, Session

client = TestClient(create_app(tempfile.mkdtemp()))

created = client.post("/sessions", json={
    "alternatives": ["site A", "site B", "site C", "site D"],
    "experts": [
        {"id": "ana", "competence": 0.5},
        {"id": "ben", "competence": 0.3},
        {"id": "kim", "competence": 0.2},
    ],
    "config": {"epsilon": 0.001},
}).json()
sid, auth = created["id"], {"token": created["token"]}
print(f"session {sid} created, competences "
      f"{[e['competence'] for e in created['experts']]}")

ratios = {(0, 1): 2, (0, 2): 4, (0, 3): 8, (1, 2): 2, (1, 3): 4, (2, 3): 2}
rows = []
for expert in ("ana", "ben", "kim"):
    for (i, j), grade in ratios.items():
        if expert == "ben" and (i, j) == (0, 1):
            grade = 9
        rows.append({"expert": expert, "i": i, "j": j,
                     "grade": grade, "scale_grades": 9, "direction": ">"})
print("judgments:", client.put(f"/sessions/{sid}/judgments",
                               params=auth, json=rows).json())

evaluated = client.post(f"/sessions/{sid}/evaluate", params=auth).json()
print(f"evaluate -> {evaluated['status']}, K = "
      f"{[round(k, 3) for k in evaluated['K']]}")

while evaluated["status"] == "awaiting-revision":
    opened = client.get(f"/sessions/{sid}/revision", params=auth).json()
    request = opened["request"]
    if request is None:
        break
    print(f"revision request for {request['expert']}: cell "
          f"({request['i']},{request['j']}) {request['current_value']:.3f} -> "
          f"{request['suggested_value']:.3f}")
    answered = client.post(f"/sessions/{sid}/revision", params=auth, json={
        "request_id": request["request_id"], "action": "accept",
        "version": opened["version"],
    }).json()
    evaluated = client.get(f"/sessions/{sid}/agreement", params=auth).json()
    evaluated["status"] = answered["status"]

doc = client.get(f"/sessions/{sid}", params=auth).json()
print(f"final status: {doc['status']}, w = "
      f"{[round(x, 4) for x in doc['results']['w']]}")

replayed = replay_events(doc["events"])
same = replayed.state_fingerprint() == Session.from_dict(doc).state_fingerprint()
print(f"event log has {len(doc['events'])} entries; replay reproduces state: {same}")
