"""Decision-rule remodeling.

Replaces the deterministic strategic blocks y_0..y_K by rules
y_s = sum over basis terms of chi_term . phi_term(xi_s) and emits an
equivalent model over the coefficient vector chi: the stage systems stay
affine because basis values are data once the scenario is fixed, and one
fictitious terminal stage (with its local decision pinned to zero) carries
the original static constraints on the reconstructed y.

Scenario convention here is explicit prefix storage: stage s's data vector is
the first ``stage_data_len[s-1]`` entries of any later stage vector, so
earlier-stage data is a deterministic slice of later-stage data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BasisDimensionMismatch, UnboundedChi
from .geometry import PolyhedralRep, StagePolyhedron
from .model import Scenario, SemiStochasticModel


@dataclass(frozen=True)
class BlockSplit:
    """Partition of the strategic vector into blocks y_0..y_K.

    blocks[s] = (offset, dim); offsets must tile [0, n) exactly (any order in
    memory, block 0 is the time-zero component).
    """

    blocks: tuple

    def __post_init__(self):
        blocks = tuple((int(o), int(w)) for o, w in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if any(w < 0 or o < 0 for o, w in blocks):
            raise ValueError("block offsets and dims must be nonnegative")
        covered = sorted((o, o + w) for o, w in blocks if w > 0)
        pos = 0
        for a, b in covered:
            if a != pos:
                raise ValueError("blocks must tile [0, n) without gaps or overlap")
            pos = b
        object.__setattr__(self, "n", pos)

    @property
    def count(self) -> int:
        return len(self.blocks)

    def dim(self, s: int) -> int:
        return self.blocks[s][1]

    def offset(self, s: int) -> int:
        return self.blocks[s][0]


@dataclass(frozen=True)
class BasisTerm:
    """One scalar-valued family of basis functions for a block.

    kind "constant": phi(xi) = (1,); "affine_in_xi": phi(xi) = xi itself
    (raw stage-data coordinates); "callback": a user function with a declared
    output length.  The block rule is y_s = sum_terms chi_mat . phi(xi_s)
    with chi_mat of shape (block dim, output length).
    """

    kind: str
    fn: Callable | None = None
    out_dim: int | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "affine_in_xi", "callback"):
            raise ValueError(f"unknown basis term kind {self.kind!r}")
        if self.kind == "callback" and (self.fn is None or self.out_dim is None
                                        or self.out_dim < 1):
            raise ValueError("callback terms need fn and a positive out_dim")

    def width(self, data_len: int) -> int:
        if self.kind == "constant":
            return 1
        if self.kind == "affine_in_xi":
            return data_len
        return int(self.out_dim)

    def evaluate(self, xi_s: np.ndarray, data_len: int) -> np.ndarray:
        if self.kind == "constant":
            return np.ones(1)
        if self.kind == "affine_in_xi":
            return np.asarray(xi_s, dtype=float).reshape(-1)
        out = np.asarray(self.fn(xi_s), dtype=float).reshape(-1)
        if out.size != self.out_dim:
            raise BasisDimensionMismatch(
                f"callback returned {out.size} values, declared {self.out_dim}")
        return out


@dataclass(frozen=True)
class DecisionBasis:
    """Per-block term lists (index s = 0..K).

    Every block must include a constant term so all constant rules stay
    representable; block 0 has no data, so only constant (or data-free
    callback) terms make sense there.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple(tuple(ts) for ts in self.terms)
        object.__setattr__(self, "terms", terms)
        for s, ts in enumerate(terms):
            if not ts:
                raise ValueError(f"block {s} has no basis terms")
            if not any(t.kind == "constant" for t in ts):
                raise ValueError(f"block {s} cannot represent constants")

    @classmethod
    def constants(cls, n_blocks: int) -> "DecisionBasis":
        return cls(terms=tuple((BasisTerm("constant"),) for _ in range(n_blocks)))

    @classmethod
    def affine(cls, n_blocks: int) -> "DecisionBasis":
        """Constant + affine-in-data terms for every block past time zero."""
        ts = [(BasisTerm("constant"),)]
        ts += [(BasisTerm("constant"), BasisTerm("affine_in_xi"))
               for _ in range(n_blocks - 1)]
        return cls(terms=tuple(ts))


@dataclass(frozen=True)
class BlockStagedModel:
    """Remodeling input: block-split strategic space, per-stage systems over
    the revealed blocks, the original static set, and the scenario sampler.

    w_builder(t, xi_t) returns the stage system over ([y_0;...;y_t], x, w);
    stage_data_len[s-1] = len(xi_s) supports prefix extraction.
    """

    K: int
    split: BlockSplit
    Y: PolyhedralRep
    w_builder: Callable[[int, np.ndarray], StagePolyhedron]
    sampler: Callable[[np.random.Generator], Scenario]
    stage_data_len: tuple

    def __post_init__(self):
        if self.split.count != self.K + 1:
            raise ValueError("need exactly K+1 blocks (y_0..y_K)")
        if self.Y.n != self.split.n:
            raise ValueError("Y dimension must match the block split")
        lens = tuple(int(v) for v in self.stage_data_len)
        if len(lens) != self.K or any(b < a for a, b in zip(lens, lens[1:])):
            raise ValueError("stage_data_len must list K nondecreasing lengths")
        object.__setattr__(self, "stage_data_len", lens)

    def data_len(self, s: int) -> int:
        return 0 if s == 0 else self.stage_data_len[s - 1]

    def prefix(self, xi_t: np.ndarray, s: int) -> np.ndarray:
        """Stage-s data recovered from stage-t data, s <= t."""
        return np.asarray(xi_t, dtype=float).reshape(-1)[: self.data_len(s)]


class _Layout:
    """Column bookkeeping for the flattened coefficient vector."""

    def __init__(self, staged: BlockStagedModel, basis: DecisionBasis):
        if len(basis.terms) != staged.K + 1:
            raise BasisDimensionMismatch(
                f"basis lists {len(basis.terms)} blocks, model has {staged.K + 1}")
        self.staged = staged
        self.basis = basis
        self.block_cols = []  # per block: list of (col0, width, term)
        col = 0
        for s in range(staged.K + 1):
            n_s = staged.split.dim(s)
            entries = []
            for term in basis.terms[s]:
                w = term.width(staged.data_len(s))
                if w == 0:
                    raise BasisDimensionMismatch(
                        f"block {s}: term {term.kind} has no data to act on")
                entries.append((col, w, term))
                col += n_s * w
            self.block_cols.append(entries)
        self.n_chi = col

    def block_matrix(self, s: int, xi_s: np.ndarray) -> np.ndarray:
        """T_s(xi_s): maps chi to the block value y_s (n_s x n_chi)."""
        n_s = self.staged.split.dim(s)
        T = np.zeros((n_s, self.n_chi))
        for col0, w, term in self.block_cols[s]:
            phi = term.evaluate(xi_s, self.staged.data_len(s))
            for i in range(n_s):
                T[i, col0 + i * w: col0 + (i + 1) * w] = phi
        return T

    def stack_matrix(self, t: int, xi_t: np.ndarray) -> np.ndarray:
        """Maps chi to [y_0;...;y_t] evaluated on the prefixes of xi_t."""
        mats = [self.block_matrix(s, self.staged.prefix(xi_t, s))
                for s in range(t + 1)]
        return np.vstack(mats)

    def embed_constant(self, y: np.ndarray) -> np.ndarray:
        """chi reproducing the deterministic decision y via constant terms."""
        y = np.asarray(y, dtype=float).reshape(-1)
        chi = np.zeros(self.n_chi)
        for s in range(self.staged.K + 1):
            o, n_s = self.staged.split.blocks[s]
            for col0, w, term in self.block_cols[s]:
                if term.kind == "constant":
                    chi[col0: col0 + n_s * w: w] = y[o:o + n_s]
                    break
        return chi


def reconstruct_decision(staged: BlockStagedModel, basis: DecisionBasis,
                         chi, xi_K) -> np.ndarray:
    """Evaluate the rules on a full scenario: the deterministic y they induce."""
    lay = _Layout(staged, basis)
    chi = np.asarray(chi, dtype=float).reshape(-1)
    y = np.empty(staged.split.n)
    for s in range(staged.K + 1):
        o, n_s = staged.split.blocks[s]
        T = lay.block_matrix(s, staged.prefix(xi_K, s))
        y[o:o + n_s] = T @ chi
    return y


def embed_constant(staged: BlockStagedModel, basis: DecisionBasis, y) -> np.ndarray:
    return _Layout(staged, basis).embed_constant(y)


def coefficient_box(staged: BlockStagedModel, basis: DecisionBasis,
                    y_box_lo, y_box_hi, scale: float = 1.0) -> tuple:
    """A workable coefficient box: constant terms inherit the block's y-box;
    data-dependent coefficients get symmetric bounds scaled to the block's
    magnitude.  Purely a convenience - the lift accepts any finite box."""
    y_lo = np.asarray(y_box_lo, dtype=float).reshape(-1)
    y_hi = np.asarray(y_box_hi, dtype=float).reshape(-1)
    lay = _Layout(staged, basis)
    lo = np.empty(lay.n_chi)
    hi = np.empty(lay.n_chi)
    for s in range(staged.K + 1):
        o, n_s = staged.split.blocks[s]
        amp = np.maximum(np.maximum(np.abs(y_lo[o:o + n_s]),
                                    np.abs(y_hi[o:o + n_s])), 1.0) * scale
        for col0, w, term in lay.block_cols[s]:
            for i in range(n_s):
                cols = slice(col0 + i * w, col0 + (i + 1) * w)
                if term.kind == "constant":
                    lo[cols] = y_lo[o + i]
                    hi[cols] = y_hi[o + i]
                else:
                    lo[cols] = -amp[i]
                    hi[cols] = amp[i]
    return lo, hi


def lift(staged: BlockStagedModel, basis: DecisionBasis, chi_box) -> SemiStochasticModel:
    """The coefficient-space model: stages 1..K substitute the rules into the
    stage systems; stage K+1 pins its local decision to zero and carries the
    original static constraints on the reconstructed decision."""
    if chi_box is None:
        raise UnboundedChi("a finite coefficient box is required")
    lay = _Layout(staged, basis)
    lo = np.asarray(chi_box[0], dtype=float).reshape(-1)
    hi = np.asarray(chi_box[1], dtype=float).reshape(-1)
    if lo.size != lay.n_chi or hi.size != lay.n_chi:
        raise BasisDimensionMismatch(
            f"coefficient box has size {lo.size}, expected {lay.n_chi}")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise UnboundedChi("coefficient box must be finite")
    n_chi = lay.n_chi
    K = staged.K

    eye = np.eye(n_chi)
    Y_chi = PolyhedralRep(A=np.vstack([eye, -eye]),
                          C=np.zeros((2 * n_chi, 0)),
                          d=np.concatenate([hi, -lo]))

    def builder(t: int, xi_t: np.ndarray) -> StagePolyhedron:
        if t <= K:
            sp = staged.w_builder(t, np.asarray(xi_t, dtype=float).reshape(-1))
            T = lay.stack_matrix(t, xi_t)
            if sp.A.shape[1] != T.shape[0]:
                raise BasisDimensionMismatch(
                    f"stage {t} system expects {sp.A.shape[1]} revealed "
                    f"coordinates, split provides {T.shape[0]}")
            return StagePolyhedron(A=sp.A @ T, B=sp.B, C=sp.C, d=sp.d,
                                   x_lo=sp.x_lo, x_hi=sp.x_hi,
                                   w_lo=sp.w_lo, w_hi=sp.w_hi)
        # terminal stage: reconstructed y must satisfy the static set
        T = lay.stack_matrix(K, xi_t)
        full = np.zeros((staged.split.n, n_chi))
        row = 0
        for s in range(K + 1):
            o, n_s = staged.split.blocks[s]
            full[o:o + n_s] = T[row:row + n_s]
            row += n_s
        m = staged.Y.rows
        return StagePolyhedron(A=staged.Y.A @ full, B=np.zeros((m, 1)),
                               C=staged.Y.C, d=staged.Y.d,
                               x_lo=np.zeros(1), x_hi=np.zeros(1))

    def sampler(rng: np.random.Generator) -> Scenario:
        base = staged.sampler(rng)
        stages = tuple(base.stages) + (base.stages[-1],)
        return Scenario(stages=stages)

    return SemiStochasticModel(n=n_chi, K=K + 1, Y=Y_chi, stage_builder=builder,
                               sampler=sampler, box_lo=lo, box_hi=hi)
