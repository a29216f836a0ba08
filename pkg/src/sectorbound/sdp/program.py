"""Linear cone-program data model.

A program is the standard primal form

    minimize    c' x
    subject to  A x = b,   x in K,

where K is a product of free blocks, nonnegative-orthant blocks, and PSD
blocks.  Each PSD block of order k is stored in scaled-vectorized form
(packed upper triangle, off-diagonals scaled by sqrt(2)), contributing
k(k+1)/2 scalar variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, NonFiniteEntry
from ..symmetric import smat, svec, tri_len


@dataclass(frozen=True)
class Free:
    n: int


@dataclass(frozen=True)
class Nonneg:
    n: int


@dataclass(frozen=True)
class PsdBlock:
    k: int


Block = Free | Nonneg | PsdBlock


def block_len(blk: Block) -> int:
    if isinstance(blk, PsdBlock):
        return tri_len(blk.k)
    return blk.n


@dataclass
class ConeProgram:
    """Conic linear program over free, orthant and PSD blocks.

    ``names`` maps semantic names (``"P"``, ``"M"``, ``"gamma_sq"``, ...) to
    block indices so that solutions can be unpacked by meaning rather than by
    position.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    blocks: tuple[Block, ...]
    names: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.asarray(self.A, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        n = sum(block_len(bl) for bl in self.blocks)
        if self.c.shape != (n,):
            raise DimensionMismatch(f"c has length {self.c.shape}, expected {n}")
        if self.A.ndim != 2 or self.A.shape[1] != n:
            raise DimensionMismatch(f"A has shape {self.A.shape}, expected (*, {n})")
        if self.b.shape != (self.A.shape[0],):
            raise DimensionMismatch("b length does not match the row count of A")
        for arr in (self.c, self.A, self.b):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteEntry("cone program data contains non-finite entries")

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    def block_slices(self) -> list[slice]:
        out, off = [], 0
        for bl in self.blocks:
            ln = block_len(bl)
            out.append(slice(off, off + ln))
            off += ln
        return out

    def slice_of(self, name: str) -> slice:
        return self.block_slices()[self.names[name]]

    def extract(self, x: np.ndarray, name: str):
        """Return the named block of a solution vector: a dense symmetric
        matrix for PSD blocks, a plain vector otherwise."""
        idx = self.names[name]
        sl = self.block_slices()[idx]
        blk = self.blocks[idx]
        if isinstance(blk, PsdBlock):
            return smat(x[sl])
        return np.array(x[sl])

    def dump(self, path) -> None:
        """Write the program in the documented plain-text triplet format.

        Layout: a header describing blocks (kind and size), then one line per
        nonzero of c, A and b as ``c i v`` / ``A i j v`` / ``b i v``.
        """
        kind = {Free: "free", Nonneg: "nonneg", PsdBlock: "psd"}
        with open(path, "w") as fh:
            fh.write(f"coneprogram rows={self.num_rows} vars={self.num_vars}\n")
            for i, bl in enumerate(self.blocks):
                size = bl.k if isinstance(bl, PsdBlock) else bl.n
                name = next((nm for nm, v in self.names.items() if v == i), "")
                fh.write(f"block {i} {kind[type(bl)]} {size} {name}\n")
            for i in np.nonzero(self.c)[0]:
                fh.write(f"c {i} {self.c[i]:.17g}\n")
            rows, cols = np.nonzero(self.A)
            for i, j in zip(rows, cols):
                fh.write(f"A {i} {j} {self.A[i, j]:.17g}\n")
            for i in np.nonzero(self.b)[0]:
                fh.write(f"b {i} {self.b[i]:.17g}\n")


class ProgramBuilder:
    """Incremental construction of a :class:`ConeProgram`.

    Variables are declared block by block; equality rows are accumulated as
    sparse (slice, coefficient) entries and assembled into a dense matrix at
    :meth:`build` time.
    """

    def __init__(self):
        self._blocks: list[Block] = []
        self._names: dict[str, int] = {}
        self._offsets: list[int] = []
        self._n = 0
        self._rows: list[list[tuple[int, np.ndarray]]] = []
        self._rhs: list[float] = []
        self._obj: list[tuple[int, np.ndarray]] = []

    def _add_block(self, name: str, blk: Block) -> int:
        if name in self._names:
            raise ValueError(f"duplicate block name {name!r}")
        self._names[name] = len(self._blocks)
        self._blocks.append(blk)
        self._offsets.append(self._n)
        self._n += block_len(blk)
        return self._names[name]

    def add_free(self, name: str, n: int) -> int:
        return self._add_block(name, Free(n))

    def add_nonneg(self, name: str, n: int) -> int:
        return self._add_block(name, Nonneg(n))

    def add_psd(self, name: str, k: int) -> int:
        return self._add_block(name, PsdBlock(k))

    def offset(self, name: str) -> int:
        return self._offsets[self._names[name]]

    def length(self, name: str) -> int:
        return block_len(self._blocks[self._names[name]])

    def add_row(self, terms: dict[str, np.ndarray], rhs: float) -> None:
        """Add one equality row; ``terms`` maps block name to its coefficient
        vector over that block's scalar variables."""
        row = []
        for name, coeff in terms.items():
            coeff = np.asarray(coeff, dtype=float)
            if coeff.shape != (self.length(name),):
                raise DimensionMismatch(
                    f"coefficient for block {name!r} has length {coeff.shape},"
                    f" expected {self.length(name)}"
                )
            row.append((self.offset(name), coeff))
        self._rows.append(row)
        self._rhs.append(float(rhs))

    def add_matrix_equality(self, terms: dict[str, np.ndarray], rhs_mat: np.ndarray) -> None:
        """Add svec(sum of affine matrix expressions) = svec(rhs).

        ``terms[name]`` is a (tri_len(k), block_len(name)) matrix mapping the
        block's variables to the svec of its contribution.
        """
        r = svec(rhs_mat)
        t = len(r)
        mats = {}
        for name, Mmap in terms.items():
            Mmap = np.asarray(Mmap, dtype=float)
            if Mmap.shape != (t, self.length(name)):
                raise DimensionMismatch(
                    f"matrix map for block {name!r} has shape {Mmap.shape},"
                    f" expected ({t}, {self.length(name)})"
                )
            mats[name] = Mmap
        for i in range(t):
            self._rows.append([(self.offset(nm), mats[nm][i]) for nm in mats])
            self._rhs.append(float(r[i]))

    def set_objective(self, name: str, coeff: np.ndarray) -> None:
        coeff = np.asarray(coeff, dtype=float)
        if coeff.shape != (self.length(name),):
            raise DimensionMismatch("objective coefficient length mismatch")
        self._obj.append((self.offset(name), coeff))

    def build(self) -> ConeProgram:
        p = len(self._rows)
        A = np.zeros((p, self._n))
        for i, row in enumerate(self._rows):
            for off, coeff in row:
                A[i, off : off + len(coeff)] += coeff
        c = np.zeros(self._n)
        for off, coeff in self._obj:
            c[off : off + len(coeff)] += coeff
        return ConeProgram(
            c=c, A=A, b=np.array(self._rhs), blocks=tuple(self._blocks),
            names=dict(self._names),
        )


def psd_unit_basis(k: int):
    """Yield the dense symmetric basis matrices matching svec coordinates."""
    i, j = np.triu_indices(k)
    for a, b in zip(i, j):
        E = np.zeros((k, k))
        if a == b:
            E[a, a] = 1.0
        else:
            E[a, b] = E[b, a] = 1.0 / np.sqrt(2.0)
        yield E
