"""Dense complex substrate and the block-partitioned Hamiltonian data model.

A Hamiltonian is stored as Hermitian diagonal blocks plus one coupling block
per partition pair, together with a ±1 sign per pair.  The assembled matrix
carries ``sign * B`` above the diagonal and ``B†`` below it, so Hermiticity
is recovered when every sign is +1.  A diagonal ±1 metric ``Q`` twists the
conjugate transpose into the involution ``M -> Q M† Q``; matrices assembled
from a consistent sign pattern are exact fixed points of that involution
(see :mod:`qspectra.signpat` for consistency and normal forms).

All residuals in this package use the max-absolute-entry norm, exposed as
:func:`max_abs`.  Every type here is an immutable value: arrays are stored
read-only and operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np

from .errors import StructuralError

__all__ = [
    "BlockPartition",
    "SignPattern",
    "GradingMetric",
    "SymmetryOperator",
    "PartitionedHamiltonian",
    "as_complex_matrix",
    "max_abs",
    "scale_of",
    "iter_pairs",
    "table_pair_order",
    "assemble",
    "ddagger",
    "pseudo_hermiticity_residual",
    "qform",
    "pt_structure_residual",
]


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite complex128 2-D array (copy, at least 1x1)."""
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise StructuralError(f"{name}: expected a 2-D array, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise StructuralError(f"{name}: empty dimension in shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError(f"{name}: non-finite entries")
    return arr


def max_abs(a) -> float:
    """Max-absolute-entry norm, the residual norm used throughout."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def scale_of(a) -> float:
    """Tolerance scale ``max(1, max|entry|)`` of an array."""
    return max(1.0, max_abs(a))


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def iter_pairs(n: int) -> Iterator[tuple[int, int]]:
    """Partition pairs (i, j) with i < j in row-major order."""
    for i in range(n):
        for j in range(i + 1, n):
            yield (i, j)


def table_pair_order(n: int) -> list[tuple[int, int]]:
    """Pairs ordered as sign tables list them: all pairs among the first
    k partitions precede pairs that touch partition k."""
    return [(i, j) for j in range(1, n) for i in range(j)]


@dataclass(frozen=True)
class BlockPartition:
    """Ordered list of positive block dimensions."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise StructuralError("partition needs at least one block")
        if any(d < 1 for d in dims):
            raise StructuralError(f"block dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_partitions(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for d in self.dims:
            out.append(acc)
            acc += d
        return tuple(out)

    def block_slice(self, i: int) -> slice:
        off = self.offsets[i]
        return slice(off, off + self.dims[i])

    def block_indices(self, i: int) -> np.ndarray:
        s = self.block_slice(i)
        return np.arange(s.start, s.stop)


@dataclass(frozen=True)
class SignPattern:
    """One ±1 sign per partition pair (i, j), i < j.

    ``signs`` stores the upper triangle in row-major order, i.e. the order
    produced by :func:`iter_pairs`.  Use :meth:`from_table_row` /
    :meth:`table_row` for the grouped order used in printed sign tables.
    """

    n_partitions: int
    signs: tuple[int, ...]

    def __post_init__(self):
        n = int(self.n_partitions)
        if n < 1:
            raise StructuralError("pattern needs at least one partition")
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != n * (n - 1) // 2:
            raise StructuralError(
                f"pattern for {n} partitions needs {n * (n - 1) // 2} signs, "
                f"got {len(signs)}"
            )
        if any(s not in (-1, 1) for s in signs):
            raise StructuralError(f"signs must be ±1, got {signs}")
        object.__setattr__(self, "n_partitions", n)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[tuple[int, int], int]) -> "SignPattern":
        pairs = list(iter_pairs(n))
        extra = set(mapping) - set(pairs)
        if extra:
            raise StructuralError(f"unexpected pair keys {sorted(extra)}")
        missing = set(pairs) - set(mapping)
        if missing:
            raise StructuralError(f"missing pair keys {sorted(missing)}")
        return cls(n, tuple(mapping[p] for p in pairs))

    @classmethod
    def from_table_row(cls, n: int, row) -> "SignPattern":
        """Build from a sign tuple in table order (see :func:`table_pair_order`)."""
        order = table_pair_order(n)
        row = tuple(int(s) for s in row)
        if len(row) != len(order):
            raise StructuralError(f"table row for {n} partitions needs {len(order)} signs")
        return cls.from_mapping(n, dict(zip(order, row)))

    @classmethod
    def all_plus(cls, n: int) -> "SignPattern":
        return cls(n, (1,) * (n * (n - 1) // 2))

    def _index(self, i: int, j: int) -> int:
        if not (0 <= i < j < self.n_partitions):
            raise StructuralError(f"pair ({i}, {j}) out of range for N={self.n_partitions}")
        # row-major offset of (i, j) in the strict upper triangle
        return i * self.n_partitions - i * (i + 1) // 2 + (j - i - 1)

    def sign(self, i: int, j: int) -> int:
        return self.signs[self._index(i, j)]

    def as_mapping(self) -> dict[tuple[int, int], int]:
        return {p: self.sign(*p) for p in iter_pairs(self.n_partitions)}

    def table_row(self) -> tuple[int, ...]:
        return tuple(self.sign(i, j) for (i, j) in table_pair_order(self.n_partitions))


@dataclass(frozen=True)
class GradingMetric:
    """Diagonal ±1 involution defining the indefinite inner product."""

    signature: tuple[int, ...]

    def __post_init__(self):
        sig = tuple(int(s) for s in self.signature)
        if len(sig) < 1:
            raise StructuralError("metric needs at least one entry")
        if any(s not in (-1, 1) for s in sig):
            raise StructuralError("metric signature entries must be ±1")
        object.__setattr__(self, "signature", sig)

    @classmethod
    def identity(cls, dim: int) -> "GradingMetric":
        return cls((1,) * dim)

    @property
    def dim(self) -> int:
        return len(self.signature)

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.signature, dtype=np.float64)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal())


@dataclass(frozen=True)
class SymmetryOperator:
    """Permutation of basis indices, optionally composed with complex
    conjugation (an antilinear operator).

    Acts as ``(O v)[k] = v[perm[k]]`` with an entrywise conjugation first
    when ``conjugates`` is set.
    """

    permutation: tuple[int, ...]
    conjugates: bool = False

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        if sorted(perm) != list(range(len(perm))):
            raise StructuralError("permutation must be a bijection on 0..D-1")
        object.__setattr__(self, "permutation", perm)

    @classmethod
    def cyclic_shift(cls, dim: int, step: int, conjugates: bool = False) -> "SymmetryOperator":
        return cls(tuple((k + step) % dim for k in range(dim)), conjugates)

    @property
    def kind(self) -> str:
        return "permutation-with-conjugation" if self.conjugates else "permutation"

    @property
    def dim(self) -> int:
        return len(self.permutation)

    def matrix(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        m[np.arange(self.dim), list(self.permutation)] = 1.0
        return m

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        out = v[list(self.permutation)]
        return np.conj(out) if self.conjugates else out

    def is_involution(self) -> bool:
        p = self.permutation
        return all(p[p[k]] == k for k in range(self.dim))

    def power_permutation(self, exponent: int) -> tuple[int, ...]:
        out = tuple(range(self.dim))
        for _ in range(exponent % self._order_bound()):
            out = tuple(self.permutation[k] for k in out)
        return out

    def _order_bound(self) -> int:
        # permutation order divides dim!, but callers only use small powers
        return max(1, self.dim)


@dataclass(frozen=True)
class PartitionedHamiltonian:
    """Hermitian diagonal blocks + signed upper coupling blocks.

    Diagonal blocks are symmetrized ``(B + B†)/2`` on construction so the
    Hermiticity invariant is exact rather than tolerance-based.  Missing
    coupling pairs are implicit zero blocks.
    """

    partition: BlockPartition
    diagonal: tuple[np.ndarray, ...]
    coupling: Mapping[tuple[int, int], np.ndarray]
    pattern: SignPattern

    def __post_init__(self):
        p = self.partition
        n = p.n_partitions
        if self.pattern.n_partitions != n:
            raise StructuralError(
                f"pattern has {self.pattern.n_partitions} partitions, partition has {n}"
            )
        if len(self.diagonal) != n:
            raise StructuralError(f"need {n} diagonal blocks, got {len(self.diagonal)}")
        diag = []
        for i, block in enumerate(self.diagonal):
            b = as_complex_matrix(block, name=f"diagonal[{i}]")
            d = p.dims[i]
            if b.shape != (d, d):
                raise StructuralError(f"diagonal[{i}]: expected shape {(d, d)}, got {b.shape}")
            diag.append(_readonly((b + b.conj().T) / 2))
        coup: dict[tuple[int, int], np.ndarray] = {}
        for key in sorted(self.coupling):
            i, j = key
            if not (0 <= i < j < n):
                raise StructuralError(f"coupling pair {key}: indices must satisfy 0 <= i < j < {n}")
            b = as_complex_matrix(self.coupling[key], name=f"coupling[{key}]")
            want = (p.dims[i], p.dims[j])
            if b.shape != want:
                raise StructuralError(f"coupling[{key}]: expected shape {want}, got {b.shape}")
            coup[(i, j)] = _readonly(b)
        object.__setattr__(self, "diagonal", tuple(diag))
        object.__setattr__(self, "coupling", MappingProxyType(coup))

    @property
    def dim(self) -> int:
        return self.partition.total

    def coupling_block(self, i: int, j: int) -> np.ndarray:
        if (i, j) in self.coupling:
            return self.coupling[(i, j)]
        return np.zeros((self.partition.dims[i], self.partition.dims[j]), dtype=np.complex128)

    def with_coupling_scale(self, factor: float) -> "PartitionedHamiltonian":
        """New Hamiltonian with every coupling block multiplied by ``factor``."""
        scaled = {k: factor * b for k, b in self.coupling.items()}
        return PartitionedHamiltonian(self.partition, self.diagonal, scaled, self.pattern)


def assemble(ph: PartitionedHamiltonian) -> np.ndarray:
    """Dense matrix with blocks ``H_ii``, ``sign_ij * B_ij`` and ``B_ij†``."""
    p = ph.partition
    out = np.zeros((p.total, p.total), dtype=np.complex128)
    for i in range(p.n_partitions):
        out[p.block_slice(i), p.block_slice(i)] = ph.diagonal[i]
    for (i, j), b in ph.coupling.items():
        out[p.block_slice(i), p.block_slice(j)] = ph.pattern.sign(i, j) * b
        out[p.block_slice(j), p.block_slice(i)] = b.conj().T
    return out


def _check_square(m: np.ndarray, q: GradingMetric, name: str) -> np.ndarray:
    m = as_complex_matrix(m, name=name)
    if m.shape[0] != m.shape[1]:
        raise StructuralError(f"{name}: expected square matrix, got {m.shape}")
    if m.shape[0] != q.dim:
        raise StructuralError(f"{name}: size {m.shape[0]} does not match metric size {q.dim}")
    return m


def ddagger(m: np.ndarray, q: GradingMetric) -> np.ndarray:
    """Metric-twisted conjugate transpose ``Q M† Q``.

    An involution; with the identity metric it reduces to ``M†``.
    """
    m = _check_square(m, q, "ddagger")
    d = q.diagonal()
    return d[:, None] * m.conj().T * d[None, :]


def pseudo_hermiticity_residual(m: np.ndarray, q: GradingMetric) -> float:
    """``max_abs(Q M† Q - M)``; zero exactly for assembled consistent models."""
    m = _check_square(m, q, "pseudo_hermiticity_residual")
    return max_abs(ddagger(m, q) - m)


def qform(u, v, q: GradingMetric, mode: str = "sesquilinear") -> complex:
    """Indefinite inner product ``sum_k conj(u_k) q_k v_k`` (sesquilinear)
    or ``sum_k u_k q_k v_k`` (bilinear)."""
    u = np.asarray(u, dtype=np.complex128).reshape(-1)
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if u.shape[0] != q.dim or v.shape[0] != q.dim:
        raise StructuralError(
            f"qform: vector lengths {u.shape[0]}, {v.shape[0]} do not match metric size {q.dim}"
        )
    if mode == "sesquilinear":
        left = np.conj(u)
    elif mode == "bilinear":
        left = u
    else:
        raise StructuralError(f"qform: unknown mode {mode!r}")
    return complex(np.sum(left * q.diagonal() * v))


def pt_structure_residual(h: np.ndarray, p: SymmetryOperator) -> tuple[float, float]:
    """Residuals of the split ``H = S + iA`` with ``P S P = S``, ``P A P = -A``.

    ``P`` must be an involutive plain permutation.  Returns
    ``(max_abs(P S P - S), max_abs(P A P + A))``.
    """
    h = as_complex_matrix(h, name="pt_structure_residual")
    if h.shape[0] != h.shape[1]:
        raise StructuralError(f"expected square matrix, got {h.shape}")
    if p.conjugates:
        raise StructuralError("parity operator must be a plain permutation")
    if p.dim != h.shape[0]:
        raise StructuralError(f"permutation size {p.dim} does not match matrix size {h.shape[0]}")
    if not p.is_involution():
        raise StructuralError("parity operator must be an involution")
    idx = list(p.permutation)
    s, a = h.real, h.imag
    return (max_abs(s[np.ix_(idx, idx)] - s), max_abs(a[np.ix_(idx, idx)] + a))
