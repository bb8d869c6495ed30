"""Python bindings for the tierplan multi-tier planner."""

import json
import os

try:
    from . import _tierplan
except ImportError:
    import _tierplan

TierplanError = _tierplan.TierplanError
SCHEMA_VERSION = _tierplan.SCHEMA_VERSION

__all__ = ["Service", "TierplanError", "compile", "simulate", "solve", "validate", "verify"]


def _source(manifest):
    if isinstance(manifest, dict):
        return json.dumps(manifest), False
    return os.fspath(manifest), True


def validate(manifest):
    return json.loads(_tierplan.validate_json(*_source(manifest)))


def compile(manifest, flatten=False):
    return json.loads(_tierplan.compile_json(*_source(manifest), flatten=flatten))


def solve(manifest, node_cap=1_000_000):
    return json.loads(_tierplan.solve_json(*_source(manifest), node_cap=node_cap))


def verify(manifest, mtc):
    return json.loads(_tierplan.verify_json(*_source(manifest), mtc=json.dumps(mtc)))


def simulate(manifest, ground_truth, script=None, seed=None, adversarial=False, step_cap=1000):
    text = _tierplan.simulate_json(
        *_source(manifest),
        ground_truth=ground_truth,
        script=script,
        seed=seed,
        adversarial=adversarial,
        step_cap=step_cap,
    )
    return json.loads(text)


class Service:
    """In-process version of the HTTP API."""

    def __init__(self, solve_budget_ms=2000, node_cap=1_000_000):
        self._impl = _tierplan.Service(solve_budget_ms, node_cap)

    def request(self, method, path, body=None):
        text = "" if body is None else json.dumps(body)
        status, out = self._impl.handle_json(method, path, text)
        return status, json.loads(out)
