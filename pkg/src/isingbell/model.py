"""Triplet-sector model of two Ising-coupled spins in a rotating transverse field.

Everything is expressed in coupling units: field amplitudes in units of the
Ising strength xi, times in units of 1/xi, hbar = 1.  The dynamical basis is
the triplet {|dd>, (|du>+|ud>)/sqrt(2), |uu>}; the singlet carries total spin
0 and is decoupled, so it never enters.

The rotating-frame Hamiltonian driving all dynamics is

    H_c = [[ delta,      omega/sqrt(2),  0             ],
           [ omega/sqrt(2),  0,          omega/sqrt(2) ],
           [ 0,          omega/sqrt(2),  4*xi - delta  ]]

and the two-level reduction of the {|dd>, bell} block (up to a phase shift
proportional to the identity) is

    H_0 = (1/2) [[delta, sqrt(2)*omega], [sqrt(2)*omega, -delta]].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class PhysicalUnits:
    """Unit system anchored to the Ising coupling strength ``xi > 0``.

    Internally xi is 1; the field exists so the 4*xi diagonal shift and any
    future rescaling stay explicit instead of being buried in literals.
    """

    xi: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.xi) and self.xi > 0.0):
            raise ValueError(f"coupling strength must be positive and finite, got {self.xi}")


@dataclass(frozen=True)
class TripletAmplitudes:
    """Complex amplitudes (c1, c2, c3) on the triplet basis, unit norm."""

    c1: complex
    c2: complex
    c3: complex

    def __post_init__(self):
        vals = (self.c1, self.c2, self.c3)
        if not all(cmath.isfinite(c) for c in vals):
            raise ValueError(f"amplitudes must be finite, got {vals}")
        norm2 = sum(abs(c) ** 2 for c in vals)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |c|^2 = {norm2!r}")

    @classmethod
    def spin_down(cls) -> "TripletAmplitudes":
        """The unentangled |dd> starting state, (1, 0, 0)."""
        return cls(1.0 + 0.0j, 0.0j, 0.0j)

    @classmethod
    def from_array(cls, vec: np.ndarray) -> "TripletAmplitudes":
        c = np.asarray(vec, dtype=complex).ravel()
        if c.shape != (3,):
            raise ValueError(f"expected a 3-vector, got shape {c.shape}")
        return cls(complex(c[0]), complex(c[1]), complex(c[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=complex)

    def populations(self) -> np.ndarray:
        return np.abs(self.as_array()) ** 2


@dataclass(frozen=True)
class ControlSample:
    """Instantaneous control pair: detuning ``delta`` and Rabi frequency
    ``omega`` (both in xi units) at time ``t`` (in 1/xi units)."""

    delta: float
    omega: float
    t: float = 0.0

    def __post_init__(self):
        for name in ("delta", "omega", "t"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")


@dataclass(frozen=True)
class RotatingFrame:
    """Rotating transverse-field frame at angular frequency ``omega_rf``
    (xi units).  The frame frequency is a free parameter of the transform;
    it is otherwise absorbed into the detuning and never fixed here."""

    omega_rf: float

    def __post_init__(self):
        if not math.isfinite(self.omega_rf):
            raise ValueError(f"frame frequency must be finite, got {self.omega_rf}")


def hamiltonian_c(sample: ControlSample, units: PhysicalUnits = PhysicalUnits()) -> np.ndarray:
    """Rotating-frame triplet Hamiltonian, a real symmetric 3x3 array.

    Diagonal (delta, 0, 4*xi - delta); the single transverse field couples
    both adjacent pairs with strength omega/sqrt(2); the (1,3) corner stays
    zero (tridiagonal structure).
    """
    w = sample.omega / SQRT2
    return np.array(
        [
            [sample.delta, w, 0.0],
            [w, 0.0, w],
            [0.0, w, 4.0 * units.xi - sample.delta],
        ]
    )


def hamiltonian_two_level(sample: ControlSample) -> np.ndarray:
    """Two-level reduction of the |dd> <-> bell block:
    (1/2) [[delta, sqrt(2) omega], [sqrt(2) omega, -delta]]."""
    w = SQRT2 * sample.omega
    return 0.5 * np.array([[sample.delta, w], [w, -sample.delta]])


def _frame_phases(t: float, frame: RotatingFrame, units: PhysicalUnits) -> np.ndarray:
    # lab amplitude a_i picks up these phases on the way to the rotating frame:
    # c1 = a1 e^{-i(w+xi)t}, c2 = a2 e^{-i xi t}, c3 = a3 e^{+i(w-xi)t}
    w, xi = frame.omega_rf, units.xi
    return np.exp(1j * np.array([-(w + xi) * t, -xi * t, (w - xi) * t]))


def frame_transform(
    a: TripletAmplitudes,
    t: float,
    frame: RotatingFrame,
    units: PhysicalUnits = PhysicalUnits(),
    direction: str = "lab_to_rotating",
) -> TripletAmplitudes:
    """Apply the diagonal phase map between lab-frame and rotating-frame
    amplitudes (or its inverse).  Unitary: every |component|^2 is preserved."""
    phases = _frame_phases(t, frame, units)
    if direction == "lab_to_rotating":
        out = a.as_array() * phases
    elif direction == "rotating_to_lab":
        out = a.as_array() / phases
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return TripletAmplitudes.from_array(out)


def polar_controls(e0: float, theta: float, t: float = 0.0) -> ControlSample:
    """Polar control parametrization: delta = E0 cos(theta),
    omega = (E0/sqrt(2)) sin(theta).  The two-level Hamiltonian of such a
    sample has eigenvalues exactly +-E0/2."""
    if not (math.isfinite(e0) and e0 >= 0.0):
        raise ValueError(f"energy scale must be non-negative, got {e0}")
    return ControlSample(delta=e0 * math.cos(theta), omega=e0 * math.sin(theta) / SQRT2, t=t)
