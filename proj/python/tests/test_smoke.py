import json
import os
from pathlib import Path

import pytest

import tierplan

DATA = Path(os.environ.get("TIERPLAN_DATA_DIR", Path(__file__).resolve().parents[2] / "data")) / "nonrunning"
MANIFEST = DATA / "manifest.json"


def inline_manifest(name="manifest.json"):
    m = json.loads((DATA / name).read_text())
    for tier in m["tiers"]:
        tier["domain"] = (DATA / tier.pop("domain_file")).read_text()
    return m


def test_validate():
    assert tierplan.validate(MANIFEST)["valid"] is True


def test_compile_counts():
    out = tierplan.compile(MANIFEST)
    assert out["operators"] == 29
    assert "(when" not in tierplan.compile(MANIFEST, flatten=True)["domain"]


def test_solve_extract_verify():
    sol = tierplan.solve(MANIFEST)
    assert sol["solved"]
    d3 = {tuple(e["state"]): e["actions"] for e in sol["mtc"]["tiers"]["d3"]}
    assert d3[("(at c2)",)] == ["walk_c2_c1"]
    assert tierplan.verify(MANIFEST, sol["mtc"])["solution"] is True


def test_inline_manifest_matches_path():
    assert tierplan.solve(inline_manifest()) == tierplan.solve(MANIFEST)


def test_scratched_unsolvable():
    assert tierplan.solve(DATA / "scratched.json")["solved"] is False


def test_simulate_walkthrough():
    trace = tierplan.simulate(MANIFEST, "d1", script=[1])
    events = [e["event"] for e in trace["events"]]
    assert events == ["degrade", "step", "goal"]
    assert trace["events"][0]["to"] == "d2"
    assert tierplan.simulate(MANIFEST, "d2", seed=3) == tierplan.simulate(MANIFEST, "d2", seed=3)


def test_errors():
    with pytest.raises(tierplan.TierplanError):
        tierplan.validate(DATA / "missing.json")
    with pytest.raises(tierplan.TierplanError):
        tierplan.simulate(DATA / "scratched.json", "d1", seed=1)


def test_service_session():
    svc = tierplan.Service()
    status, body = svc.request("POST", "/problems", inline_manifest())
    assert status == 201
    pid = body["problem_id"]
    assert svc.request("POST", f"/problems/{pid}/solve")[0] == 200
    status, snap = svc.request("POST", "/sessions", {"problem_id": pid, "ground_truth": "d3"})
    assert status == 201
    status, step = svc.request("POST", f"/sessions/{snap['session_id']}/choose", {"successor": 0})
    assert status == 200
    assert step["snapshot"]["state"] == ["(at c1)"]
    assert svc.request("GET", "/sessions/nope")[0] == 404
