"""Record one complete conference walkthrough against a live API server.

Starts `casenet serve` on a scratch port, drives the two-paper reviewing
story over plain HTTP, and writes every worklist snapshot, request body,
and response to test/fixtures/recorded-walkthrough.json. The UI contract
tests replay that file instead of talking to a server.

Run from the repository root:

    python3 frontend/scripts/record_session.py
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time
from pathlib import Path

import httpx

REPO = Path(__file__).resolve().parent.parent.parent
OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "recorded-walkthrough.json"
PORT = 8712

WALKTHROUGH = (
    ("conference scheduled", None, {"Conference": {"name": "icpm"}}),
    ("open submission", None, None),
    ("submit paper [in 0]", None,
     {"AuthorTeam": {"name": "team a"}, "Paper": {"title": "paper 0"}}),
    ("send submission notification", None, None),
    ("submit paper [in 0]", None,
     {"AuthorTeam": {"name": "team b"}, "Paper": {"title": "paper 1"}}),
    ("send submission notification", ("v_Paper", "Paper", 1), None),
    ("close submission", None, None),
    ("assign reviewer", ("v_Paper", "Paper", 0), {"Review": {"score": 7}}),
    ("create review", ("v_Review", "Review", 0), None),
    ("assign reviewer", ("v_Paper", "Paper", 1), {"Review": {"score": 4}}),
    ("create review", ("v_Review", "Review", 1), None),
    ("assign reviewer", ("v_Paper", "Paper", 1), {"Review": {"score": 5}}),
    ("create review", ("v_Review", "Review", 2), None),
    ("decide on paper [out 1]", ("v_Paper", "Paper", 0),
     {"Decision": {"rationale": "strong", "final": True}}),
    ("decide on paper [out 2]", ("v_Paper", "Paper", 1),
     {"Decision": {"rationale": "weak", "final": True}}),
    ("send notification [in 0]", None, None),
    ("send notification [in 1]", None, None),
    ("close reviewing", None, None),
    ("close case", None, None),
)


def pick(worklist: dict, label: str, want) -> dict:
    options = [o for o in worklist["options"] if o["label"] == label]
    if want is not None:
        var, cls, idx = want
        options = [
            o for o in options
            if o["binding"].get(var) == {"type": "id", "class": cls, "index": idx}
        ]
    if not options:
        raise SystemExit(f"no enabled option '{label}' (want={want})")
    return options[0]


def main() -> None:
    env = {**os.environ, "FCM_PORT": str(PORT)}
    server = subprocess.Popen(
        ["casenet", "serve", "fixtures"],
        cwd=REPO, env=env,
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
    )
    base = f"http://127.0.0.1:{PORT}"
    try:
        for _ in range(50):
            try:
                httpx.get(f"{base}/models", timeout=1.0)
                break
            except httpx.TransportError:
                time.sleep(0.1)
        else:
            raise SystemExit("server did not come up")

        created = httpx.post(f"{base}/cases", json={"modelId": "conference-mini"}).json()
        cid = created["caseId"]

        steps = []
        for label, want, forms in WALKTHROUGH:
            worklist = httpx.get(f"{base}/cases/{cid}/steps").json()
            option = pick(worklist, label, want)
            body = {"optionId": option["optionId"], "attributes": forms or {}}
            resp = httpx.post(f"{base}/cases/{cid}/steps", json=body)
            resp.raise_for_status()
            steps.append({"worklist": worklist, "post": body, "result": resp.json()})

        recording = {
            "modelId": "conference-mini",
            "created": created,
            "steps": steps,
            "final": {
                "worklist": httpx.get(f"{base}/cases/{cid}/steps").json(),
                "summary": httpx.get(f"{base}/cases/{cid}").json(),
                "terminable": httpx.get(f"{base}/cases/{cid}/terminable").json(),
            },
        }
    finally:
        server.terminate()
        server.wait(timeout=10)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(recording, indent=2) + "\n")
    print(f"recorded {len(steps)} steps -> {OUT}")


if __name__ == "__main__":
    sys.exit(main())
