"""Certification reports."""

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

from .. import __version__


def _clean(value):
    """Coerce numpy scalars and containers into plain JSON-friendly values."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, "tolist") and not isinstance(value, (str, bytes)):
        value = value.tolist()
        if isinstance(value, list):
            return _clean(value)
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


@dataclass
class CertReport:
    """Outcome of one grid or sample certification.

    `passed` is min_margin > tolerance. A composite report carries child
    reports; its margin is the worst child slack min(child.min_margin -
    child.tolerance) against tolerance 0, so it passes iff every child does.
    """

    check_name: str
    params: dict
    grid: dict
    min_margin: float
    argmin: dict
    tolerance: float = 0.0
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)
    children: list = field(default_factory=list)

    @property
    def passed(self):
        return bool(self.min_margin > self.tolerance)

    @classmethod
    def composite(cls, check_name, params, children, details=None, wall_time=0.0):
        worst = min(children, key=lambda c: c.min_margin - c.tolerance)
        grid = {c.check_name: c.grid for c in children}
        argmin = {"child": worst.check_name, **worst.argmin}
        return cls(check_name, params, grid, float(worst.min_margin - worst.tolerance), argmin,
                   0.0, wall_time, details or {}, list(children))

    def child(self, name):
        for c in self.children:
            if c.check_name == name:
                return c
        raise KeyError(name)

    def to_dict(self, timing=True):
        doc = {
            "check_name": self.check_name,
            "params": self.params,
            "grid": self.grid,
            "min_margin": self.min_margin,
            "argmin": self.argmin,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "version": __version__,
        }
        if timing:
            doc["wall_time_s"] = self.wall_time
        if self.details:
            doc["details"] = self.details
        if self.children:
            doc["children"] = [c.to_dict(timing) for c in self.children]
        return _clean(doc)

    def to_json(self, timing=True):
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"


@contextmanager
def stopwatch():
    """Yield a one-element list that holds the elapsed seconds on exit."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = time.perf_counter() - start
