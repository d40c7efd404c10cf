"""Numerical flows of bracket-generated vector fields.

Fields are compiled once into flat term arrays and handed to the RK4 kernel
(compiled extension when available, otherwise pure Python).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, TextIO

import numpy as np

from . import _kernels
from .brackets import nambu_bracket
from .polyalgebra import Polynomial
from .tensor import AntisymTensor


class NonFiniteStateError(ArithmeticError):
    def __init__(self, step: int, trajectory: "Trajectory | None" = None):
        super().__init__(f"non-finite state at step {step}")
        self.step = step
        self.trajectory = trajectory


@dataclass
class FlowProblem:
    field: Sequence[Polynomial]
    z0: Sequence[float]
    dt: float
    T: float
    invariants: Mapping[str, Polynomial] = field(default_factory=dict)

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError("dt must be a positive finite number")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError("T must be a positive finite number")
        if self.dt >= self.T:
            raise ValueError("dt must be smaller than T")
        n = len(self.field)
        if len(self.z0) != n:
            raise ValueError(f"initial state has {len(self.z0)} entries, field has {n}")
        for p in list(self.field) + list(self.invariants.values()):
            if p.nvars != n:
                raise ValueError("field and invariants must live in the state's ring")

    @property
    def nsteps(self) -> int:
        return max(1, math.ceil(self.T / self.dt - 1e-9))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    invariants: dict
    drift: dict

    def to_csv(self, fh: TextIO) -> None:
        n = self.states.shape[1]
        names = list(self.invariants)
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"z{i + 1}" for i in range(n)] + names)
        series = [self.invariants[k] for k in names]
        for row in range(len(self.times)):
            vals = [self.times[row], *self.states[row], *(s[row] for s in series)]
            w.writerow([f"{float(v):.17g}" for v in vals])


def compile_plan(polys: Sequence[Polynomial]):
    """Flatten polynomials into ``(coef, exps, comp, maxdeg)`` arrays.

    Terms are grouped by output component, highest degree first.
    """
    nv = polys[0].nvars if polys else 0
    coef, exps, comp = [], [], []
    maxdeg = 1
    for k, p in enumerate(polys):
        for e, c in p.items():
            coef.append(float(c))
            exps.append(e)
            comp.append(k)
            maxdeg = max(maxdeg, max(e, default=0))
    return (np.asarray(coef, dtype=np.float64),
            np.asarray(exps, dtype=np.int64).reshape(len(coef), nv),
            np.asarray(comp, dtype=np.int64),
            maxdeg)


def relative_drift(series: np.ndarray) -> float:
    if len(series) == 0:
        return 0.0
    return float(np.max(np.abs(series - series[0])) / max(1.0, abs(series[0])))


def integrate_rk4(problem: FlowProblem, backend: str | None = None) -> Trajectory:
    """Classical fixed-step RK4 over ``ceil(T / dt)`` steps."""
    kernel = _kernels.rk4 if backend is None else _kernels.BACKENDS[backend]
    names = list(problem.invariants)
    fc, fe, fk, d1 = compile_plan(list(problem.field))
    ic, ie, ik, d2 = compile_plan([problem.invariants[k] for k in names])
    n = len(problem.field)
    if not len(ic):
        ie = np.zeros((0, n), dtype=np.int64)
    z0 = np.asarray(problem.z0, dtype=np.float64)
    states, invs, bad = kernel(fc, fe, fk, ic, ie, ik, len(names), z0,
                               float(problem.dt), problem.nsteps, max(d1, d2))
    states = np.asarray(states)
    invs = np.asarray(invs)
    drift = {k: relative_drift(invs[:, i]) for i, k in enumerate(names)}
    if len(invs) < len(states):
        # blow-up: the kernel skips invariants of the non-finite last state
        invs = np.vstack([invs, np.full((len(states) - len(invs), len(names)), np.nan)])
    times = np.arange(len(states)) * problem.dt
    series = {k: invs[:, i] for i, k in enumerate(names)}
    traj = Trajectory(times, states, series, drift)
    if bad >= 0:
        raise NonFiniteStateError(bad, traj)
    return traj


@dataclass
class ConservationReport:
    drift: dict
    tolerance: float | None
    exceeded: list

    @property
    def passed(self) -> bool:
        return not self.exceeded

    def to_dict(self) -> dict:
        return {"drift": self.drift, "tolerance": self.tolerance,
                "exceeded": self.exceeded, "passed": self.passed}

    def render(self) -> str:
        lines = []
        for k, v in self.drift.items():
            flag = "  EXCEEDS TOLERANCE" if k in self.exceeded else ""
            lines.append(f"{k}: max relative drift {v:.3e}{flag}")
        return "\n".join(lines)


def conservation_report(traj: Trajectory, tolerance: float | None = None) -> ConservationReport:
    bad = [k for k, v in traj.drift.items() if tolerance is not None and not v < tolerance]
    return ConservationReport(dict(traj.drift), tolerance, bad)


def generator_derivatives(tensor: AntisymTensor, generators: Sequence[Polynomial]) -> list:
    """Exact ``d G_j / dt = {G_j, G_1, ..., G_{r-1}}``; all zero by antisymmetry."""
    return [nambu_bracket(tensor, [g, *generators]) for g in generators]
