"""Composable initial-condition descriptors.

A descriptor is a mapping with a ``type`` key:

* ``gaussian``: ``center``, ``width``, ``amplitude``
* ``plane_wave``: ``k`` (wavenumber), ``amplitude``, ``phase``
* ``zero``
* ``sum``: ``terms`` (list of descriptors)

Vector-valued targets also accept ``direction`` (internal 3-vector,
default ``[1, 0, 0]``).  Gaussians are made periodic by summing images.
Plane waves are ``cos(k x + phase)`` for real targets and
``exp(i (k x + phase))`` for complex ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

_KEYS = {
    "gaussian": {"type", "center", "width", "amplitude", "direction"},
    "plane_wave": {"type", "k", "amplitude", "phase", "direction"},
    "zero": {"type", "direction"},
    "sum": {"type", "terms"},
}
_IMAGES = range(-3, 4)


@dataclass(frozen=True)
class InitialCondition:
    type: str
    center: float = 0.5
    width: float = 0.05
    amplitude: float = 1.0
    k: float = 0.0
    phase: float = 0.0
    direction: tuple = (1.0, 0.0, 0.0)
    terms: tuple = ()

    @classmethod
    def parse(cls, desc, key: str = "initial", vector: bool = True) -> "InitialCondition":
        if not isinstance(desc, dict):
            raise ConfigError(key, "initial condition must be a table")
        kind = desc.get("type")
        if kind not in _KEYS:
            raise ConfigError(f"{key}.type", f"unknown initial condition {kind!r}; expected one of {sorted(_KEYS)}")
        allowed = set(_KEYS[kind])
        if not vector:
            allowed.discard("direction")
        for k in desc:
            if k not in allowed:
                raise ConfigError(f"{key}.{k}", "unknown key")
        if kind == "sum":
            terms = desc.get("terms", [])
            if not isinstance(terms, list):
                raise ConfigError(f"{key}.terms", "must be a list of descriptors")
            parsed = tuple(cls.parse(t, f"{key}.terms[{i}]", vector) for i, t in enumerate(terms))
            return cls("sum", terms=parsed)
        kwargs = {k: v for k, v in desc.items() if k not in ("type", "direction")}
        for k, v in kwargs.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
                raise ConfigError(f"{key}.{k}", "must be a finite number")
        if kind == "gaussian" and kwargs.get("width", cls.width) <= 0:
            raise ConfigError(f"{key}.width", "must be positive")
        if "direction" in desc:
            d = desc["direction"]
            if not (isinstance(d, list) and len(d) == 3 and all(isinstance(c, (int, float)) for c in d)):
                raise ConfigError(f"{key}.direction", "must be a list of 3 numbers")
            kwargs["direction"] = tuple(float(c) for c in d)
        return cls(kind, **{k: float(v) if k != "direction" else v for k, v in kwargs.items()})

    def to_dict(self, vector: bool = True) -> dict:
        if self.type == "sum":
            return {"type": "sum", "terms": [t.to_dict(vector) for t in self.terms]}
        keys = sorted(_KEYS[self.type] - {"type"} - (set() if vector else {"direction"}))
        d = {"type": self.type}
        for k in keys:
            v = getattr(self, k)
            d[k] = list(v) if k == "direction" else v
        return d

    def _profile(self, x: np.ndarray, length: float, complex_: bool, derivative: bool):
        if self.type == "zero":
            return np.zeros_like(x, dtype=complex if complex_ else float)
        if self.type == "gaussian":
            out = np.zeros_like(x, dtype=float)
            for m in _IMAGES:
                d = x - self.center + m * length
                g = np.exp(-(d**2) / (2.0 * self.width**2))
                out += -d / self.width**2 * g if derivative else g
            return self.amplitude * out
        if self.type == "plane_wave":
            arg = self.k * x + self.phase
            if complex_:
                f = np.exp(1j * arg)
                return self.amplitude * (1j * self.k * f if derivative else f)
            return self.amplitude * (-self.k * np.sin(arg) if derivative else np.cos(arg))
        raise AssertionError(self.type)

    def scalar(self, x, length: float, complex_: bool = False, derivative: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.type == "sum":
            out = np.zeros_like(x, dtype=complex if complex_ else float)
            for t in self.terms:
                out = out + t.scalar(x, length, complex_, derivative)
            return out
        return self._profile(x, length, complex_, derivative)

    def vector(self, x, length: float, derivative: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.type == "sum":
            out = np.zeros((x.size, 3))
            for t in self.terms:
                out += t.vector(x, length, derivative)
            return out
        return np.outer(self._profile(x, length, False, derivative), np.asarray(self.direction, dtype=float))


def motion_velocity(ic: InitialCondition, x, length: float, speed: float, motion: str, vector: bool, complex_: bool = False):
    """Initial time derivative for a standing (zero velocity) or travelling pulse."""
    if motion == "standing":
        return None
    sign = {"right": -1.0, "left": 1.0}.get(motion)
    if sign is None:
        raise ConfigError("motion", f"must be 'standing', 'right' or 'left', got {motion!r}")
    deriv = ic.vector(x, length, derivative=True) if vector else ic.scalar(x, length, complex_, derivative=True)
    return sign * speed * deriv
