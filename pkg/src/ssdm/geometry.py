"""Dense polyhedral primitives: lifted polyhedra, separators, and balls.

All arrays are float64 and C-contiguous.  Types are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadBox, ZeroGradient

UNIT_NORM_TOL = 1e-9
_MIN_RADIUS = 1e-9


def as_vec(x, size: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float64 array (a fresh copy)."""
    v = np.array(x, dtype=float, order="C").reshape(-1)
    if size is not None and v.size != size:
        raise ValueError(f"expected vector of size {size}, got {v.size}")
    if v.size and not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_mat(x, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a finite 2-D float64 array (a fresh copy)."""
    m = np.array(x, dtype=float, order="C")
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={m.ndim}")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {m.shape[1]}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class PolyhedralRep:
    """Lifted polyhedron {y : exists w with A y + C w <= d}.

    Nonemptiness is not an invariant; callers test it where required.
    """

    A: np.ndarray
    C: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        A = as_mat(self.A)
        C = as_mat(self.C, rows=A.shape[0])
        d = as_vec(self.d, size=A.shape[0])
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def n_aux(self) -> int:
        return self.C.shape[1]

    @property
    def rows(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class StagePolyhedron:
    """One stage's constraint system over (y, x, w):

        A y + B x + C w <= d,   x_lo <= x <= x_hi,   w_lo <= w <= w_hi.

    The column split is explicit: A carries the strategic block, B the local
    decision, C the auxiliary certificate block.  Bounds default to free; a
    builder may use them instead of rows for plain boxes (the LP kernel folds
    their multipliers back into separator constants).
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    d: np.ndarray
    x_lo: np.ndarray | None = None
    x_hi: np.ndarray | None = None
    w_lo: np.ndarray | None = None
    w_hi: np.ndarray | None = None

    def __post_init__(self):
        A = as_mat(self.A)
        m = A.shape[0]
        B = as_mat(self.B, rows=m)
        C = as_mat(self.C, rows=m)
        d = as_vec(self.d, size=m)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "d", d)
        for name, size in (("x_lo", B.shape[1]), ("x_hi", B.shape[1]),
                           ("w_lo", C.shape[1]), ("w_hi", C.shape[1])):
            val = getattr(self, name)
            if val is not None:
                arr = np.array(val, dtype=float).reshape(-1)
                if arr.size != size:
                    raise ValueError(f"{name} has size {arr.size}, expected {size}")
                object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def n_x(self) -> int:
        return self.B.shape[1]

    @property
    def n_w(self) -> int:
        return self.C.shape[1]


@dataclass(frozen=True)
class Separator:
    """Unit-gradient affine function f(y) = a.y + alpha.

    Near-unit gradients are re-normalized rather than rejected.
    """

    a: np.ndarray
    alpha: float

    def __post_init__(self):
        a = as_vec(self.a)
        nrm = float(np.linalg.norm(a))
        if nrm <= 1e-12:
            raise ZeroGradient("separator gradient is numerically zero")
        alpha = float(self.alpha)
        if abs(nrm - 1.0) > UNIT_NORM_TOL:
            alpha /= nrm
            a = a / nrm
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "alpha", alpha)

    def __call__(self, y) -> float:
        return float(self.a @ np.asarray(y, dtype=float)) + self.alpha


@dataclass(frozen=True)
class Ball:
    """Euclidean ball with positive radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_vec(self.center)
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        if not (self.radius > 0.0):
            raise ValueError("ball radius must be positive")

    def contains(self, y, tol: float = 1e-9) -> bool:
        return float(np.linalg.norm(np.asarray(y, dtype=float) - self.center)) \
            <= self.radius + tol


def normalize_separator(g, gamma: float) -> Separator:
    """Turn a raw cut g.y >= gamma (violated side) into a unit-gradient separator.

    Returns f with f(y) = (g.y - gamma) / ||g||, i.e. a = g/||g|| and
    alpha = -gamma/||g||.  Raises ZeroGradient when ||g|| <= 1e-12, which
    signals a degenerate Farkas certificate upstream.
    """
    g = np.asarray(g, dtype=float).reshape(-1)
    nrm = float(np.linalg.norm(g))
    if nrm <= 1e-12:
        raise ZeroGradient("cannot normalize a zero cut gradient")
    return Separator(a=g / nrm, alpha=-float(gamma) / nrm)


def bounding_ball(box_lo, box_hi) -> Ball:
    """Smallest ball enclosing the box [box_lo, box_hi].

    Center is the midpoint; radius is ||(hi - lo)/2||, floored at 1e-9 so a
    degenerate (point) box still yields a valid ball.
    """
    lo = np.asarray(box_lo, dtype=float).reshape(-1)
    hi = np.asarray(box_hi, dtype=float).reshape(-1)
    if lo.size != hi.size:
        raise BadBox("box bounds have mismatched sizes")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise BadBox("box bounds must be finite")
    if np.any(lo > hi):
        raise BadBox("box has lo > hi")
    center = 0.5 * (lo + hi)
    radius = float(np.linalg.norm(0.5 * (hi - lo)))
    return Ball(center=center, radius=max(radius, _MIN_RADIUS))
