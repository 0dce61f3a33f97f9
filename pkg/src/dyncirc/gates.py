"""Gate alphabet and unitary semantics.

Qubit ordering convention used everywhere in the package: the first qubit
listed for a gate is the most significant bit of the matrix index, and in a
register qubit 0 is the most significant bit of a statevector index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InvalidParameter(ValueError):
    """A gate parameter is not a finite real number."""


@dataclass(frozen=True)
class GateSpec:
    name: str
    arity: int
    n_params: int


ALPHABET: dict[str, GateSpec] = {
    spec.name: spec
    for spec in (
        GateSpec("h", 1, 0),
        GateSpec("x", 1, 0),
        GateSpec("y", 1, 0),
        GateSpec("z", 1, 0),
        GateSpec("s", 1, 0),
        GateSpec("sdg", 1, 0),
        GateSpec("t", 1, 0),
        GateSpec("tdg", 1, 0),
        GateSpec("rx", 1, 1),
        GateSpec("ry", 1, 1),
        GateSpec("rz", 1, 1),
        GateSpec("u", 1, 3),
        GateSpec("cx", 2, 0),
        GateSpec("cz", 2, 0),
        GateSpec("swap", 2, 0),
        GateSpec("ccx", 3, 0),
    )
}

SELF_INVERSE = frozenset({"h", "x", "y", "z", "cx", "cz", "swap", "ccx"})
ADJOINT_NAME = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}

_SQ2 = 1.0 / math.sqrt(2.0)

_FIXED: dict[str, np.ndarray] = {
    "h": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "tdg": np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex),
    "cx": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}
_ccx = np.eye(8, dtype=complex)
_ccx[[6, 7]] = _ccx[[7, 6]]
_FIXED["ccx"] = _ccx
for _m in _FIXED.values():
    _m.setflags(write=False)


def check_params(name: str, params: tuple[float, ...]) -> None:
    spec = ALPHABET.get(name)
    if spec is None:
        raise KeyError(f"unknown gate {name!r}")
    if len(params) != spec.n_params:
        raise InvalidParameter(
            f"{name} takes {spec.n_params} parameter(s), got {len(params)}"
        )
    for p in params:
        if not isinstance(p, (int, float)) or not math.isfinite(p):
            raise InvalidParameter(f"non-finite parameter {p!r} for {name}")


def unitary_of(name: str, params: tuple[float, ...] = ()) -> np.ndarray:
    """Return the ``2**arity`` square unitary matrix of a gate kind."""
    check_params(name, params)
    if name in _FIXED:
        return _FIXED[name]
    if name == "rx":
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if name == "ry":
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "rz":
        (theta,) = params
        return np.array(
            [[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex
        )
    if name == "u":
        theta, phi, lam = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array(
            [
                [c, -np.exp(1j * lam) * s],
                [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
            ],
            dtype=complex,
        )
    raise AssertionError(name)  # pragma: no cover


def adjoint(name: str, params: tuple[float, ...]) -> tuple[str, tuple[float, ...]]:
    """Name and parameters of the adjoint gate, staying inside the alphabet."""
    if name in SELF_INVERSE:
        return name, params
    if name in ADJOINT_NAME:
        return ADJOINT_NAME[name], params
    if name in ("rx", "ry", "rz"):
        return name, (-params[0],)
    if name == "u":
        theta, phi, lam = params
        return "u", (-theta, -lam, -phi)
    raise KeyError(f"unknown gate {name!r}")
