"""Matrix-free sweep Hamiltonian H(s) = (1-s) H_0 + s H_P and its low-lying
spectrum along the sweep.

H_0 is the transverse-field driver -h0 * sum_i sigma_x^i, whose action is a
sum over single-bit-flip neighbours; H_P is the compiled diagonal.  The full
2^n x 2^n matrix is only materialized for small dimensions (dense eigensolver
path) or in tests.

For Hamming-encoded problems the sweep Hamiltonian commutes with qubit
permutations inside each qudit column, and the initial state (uniform
superposition) lies in the fully symmetric sector.  ``sector_gap_scan``
therefore computes gap profiles in that sector, where each qudit reduces to
an (m+1)-level ladder; this is the gap that controls the sweep dynamics and
stays open at s=1 even though the full-space ground level is degenerate
there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .encoding import IsingModel, QuditEncoding, compile_ising, problem_diagonal_ints
from .lattice import GramMatrix


class SpectrumError(RuntimeError):
    pass


DENSE_CUTOFF = 1 << 10
_EIGSH_SEED = 987654321


@dataclass(frozen=True)
class DriverSpec:
    h0: float = 1.0

    def __post_init__(self):
        if not self.h0 > 0:
            raise ValueError("transverse field strength must be positive")


@dataclass(frozen=True)
class ProblemDiagonal:
    """Eigenvalues of the problem Hamiltonian per computational basis state
    (exact integers for integer lattices)."""

    values: np.ndarray  # int64, length 2^n

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "values", v)
        n = v.size.bit_length() - 1
        if v.size != 1 << n:
            raise ValueError("diagonal length must be a power of two")
        if v.min() < 0:
            raise ValueError("problem energies must be non-negative")

    @property
    def n_qubits(self) -> int:
        return self.values.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.values.size

    def as_float(self) -> np.ndarray:
        return self.values.astype(np.float64)

    def levels(self) -> np.ndarray:
        """Distinct energies, ascending."""
        return np.unique(self.values)

    @classmethod
    def from_model(cls, model: IsingModel) -> "ProblemDiagonal":
        return cls(problem_diagonal_ints(model))


def apply_driver(psi: np.ndarray, n: int) -> np.ndarray:
    """Sum of psi over all single-bit-flip neighbours (the -1/h0 part of
    H_0 psi), computed without materializing any matrix."""
    dim = psi.shape[0]
    out = np.zeros_like(psi)
    for b in range(n):
        out += psi.reshape(dim >> (b + 1), 2, 1 << b)[:, ::-1, :].reshape(dim)
    return out


def apply_hamiltonian(
    diag: ProblemDiagonal, driver: DriverSpec, s: float, psi: np.ndarray
) -> np.ndarray:
    """H(s) psi for the linear sweep Hamiltonian."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("normalized time must lie in [0, 1]")
    if psi.shape[0] != diag.dim:
        raise ValueError("state vector length mismatch")
    out = s * (diag.as_float() * psi)
    if s < 1.0:
        out -= driver.h0 * (1.0 - s) * apply_driver(psi, diag.n_qubits)
    return out


def dense_hamiltonian(diag: ProblemDiagonal, driver: DriverSpec, s: float) -> np.ndarray:
    """Explicit H(s); for tests and the dense eigensolver path only."""
    dim = diag.dim
    n = diag.n_qubits
    hmat = np.diag(s * diag.as_float())
    off = -driver.h0 * (1.0 - s)
    idx = np.arange(dim)
    for b in range(n):
        hmat[idx, idx ^ (1 << b)] += off
    return hmat


def _transverse_levels(n: int, h0: float, m: int) -> np.ndarray:
    """m lowest eigenvalues of the bare driver: -h0*(n-2w), multiplicity
    binomial(n, w)."""
    out: list[float] = []
    w = 0
    while len(out) < m and w <= n:
        out.extend([-h0 * (n - 2 * w)] * math.comb(n, w))
        w += 1
    return np.array(out[:m])


def low_spectrum(
    diag: ProblemDiagonal,
    driver: DriverSpec,
    s: float,
    m: int = 2,
    dense_cutoff: int = DENSE_CUTOFF,
    tol: float = 1e-10,
    maxiter: int | None = None,
    v0: np.ndarray | None = None,
) -> np.ndarray:
    """m smallest eigenvalues of H(s), ascending.

    Endpoints use closed forms (driver ladder at s=0, sorted diagonal at
    s=1; note the s=1 values are the raw, ungrouped spectrum, which is
    degenerate for redundant encodings).  Interior points use a dense
    solver up to ``dense_cutoff`` dimensions and a Krylov solver with a
    seeded deterministic start vector above.
    """
    if m < 1:
        raise ValueError("need at least one eigenvalue")
    dim = diag.dim
    if m > dim:
        raise ValueError("more eigenvalues requested than the dimension")
    if s == 0.0:
        return _transverse_levels(diag.n_qubits, driver.h0, m)
    if s == 1.0:
        return np.sort(diag.as_float())[:m]
    if dim <= dense_cutoff:
        return np.linalg.eigvalsh(dense_hamiltonian(diag, driver, s))[:m]
    dvals = diag.as_float()
    n = diag.n_qubits
    h0 = driver.h0

    def mv(psi):
        out = s * (dvals * psi)
        out -= h0 * (1.0 - s) * apply_driver(psi, n)
        return out

    op = LinearOperator((dim, dim), matvec=mv, dtype=np.float64)
    if v0 is None:
        v0 = np.random.default_rng(_EIGSH_SEED).standard_normal(dim)
    try:
        vals = eigsh(
            op, k=m, which="SA", v0=v0, tol=tol,
            maxiter=maxiter, return_eigenvectors=False,
        )
    except ArpackNoConvergence as exc:
        got = np.sort(exc.eigenvalues) if exc.eigenvalues is not None else []
        raise SpectrumError(
            f"eigensolver did not converge at s={s}: "
            f"{len(got)} of {m} eigenvalues converged"
        ) from exc
    return np.sort(vals)


@dataclass(frozen=True)
class GapProfile:
    s_grid: np.ndarray
    e0: np.ndarray
    e1: np.ndarray

    @property
    def gaps(self) -> np.ndarray:
        return self.e1 - self.e0

    @property
    def min_gap(self) -> tuple[float, float]:
        """(s*, gap*) at the grid minimum."""
        gaps = self.gaps
        i = int(np.argmin(gaps))
        return float(self.s_grid[i]), float(gaps[i])


def _grid(points) -> np.ndarray:
    if np.isscalar(points):
        if points < 3:
            raise ValueError("need at least 3 grid points")
        return np.linspace(0.0, 1.0, int(points))
    g = np.asarray(points, dtype=np.float64)
    if g.size < 3 or g[0] != 0.0 or g[-1] != 1.0 or np.any(np.diff(g) <= 0):
        raise ValueError("grid must ascend from 0 to 1 with >= 3 points")
    return g


def gap_scan(
    diag: ProblemDiagonal,
    driver: DriverSpec,
    grid: int | np.ndarray = 33,
    dense_cutoff: int = DENSE_CUTOFF,
    refine: int = 0,
) -> GapProfile:
    """E0 and E1 of H(s) over a uniform s grid including both endpoints.

    At s=1 the reported E1 is the first distinct level above the ground
    energy (degeneracy grouping applies at the diagonal endpoint); interior
    points report the raw sorted spectrum.  ``refine`` adds that many
    rounds of local bisection around the grid minimum.
    """
    sgrid = _grid(grid)

    def pair(s: float, v0=None) -> tuple[float, float]:
        if s == 1.0:
            lv = np.unique(diag.values)
            return float(lv[0]), float(lv[1] if lv.size > 1 else lv[0])
        e = low_spectrum(diag, driver, s, m=2, dense_cutoff=dense_cutoff, v0=v0)
        return float(e[0]), float(e[1])

    try:
        pairs = [pair(float(s)) for s in sgrid]
    except SpectrumError:
        raise
    e0 = np.array([p[0] for p in pairs])
    e1 = np.array([p[1] for p in pairs])

    if refine:
        s_lo, s_hi, s_mid = _bracket(sgrid, e1 - e0)
        svals = list(sgrid)
        for _ in range(refine):
            for s_new in ((s_lo + s_mid) / 2, (s_mid + s_hi) / 2):
                if 0.0 < s_new < 1.0 and s_new not in svals:
                    svals.append(s_new)
                    pairs.append(pair(s_new))
            order = np.argsort(svals)
            svals = [svals[i] for i in order]
            pairs = [pairs[i] for i in order]
            gnew = np.array([p[1] - p[0] for p in pairs])
            s_lo, s_hi, s_mid = _bracket(np.array(svals), gnew)
        sgrid = np.array(svals)
        e0 = np.array([p[0] for p in pairs])
        e1 = np.array([p[1] for p in pairs])
    return GapProfile(s_grid=sgrid, e0=e0, e1=e1)


def _bracket(sgrid, gaps):
    i = int(np.argmin(gaps))
    lo = sgrid[max(i - 1, 0)]
    hi = sgrid[min(i + 1, len(sgrid) - 1)]
    return float(lo), float(hi), float(sgrid[i])


def sector_hamiltonian_parts(
    gram: GramMatrix, encoding: QuditEncoding, driver: DriverSpec
) -> tuple[np.ndarray, np.ndarray]:
    """(driver matrix, problem diagonal) of the sweep Hamiltonian restricted
    to the dynamically relevant sector.

    Hamming: the fully symmetric sector; each qudit becomes an (m+1)-level
    ladder |v>, v = -m/2..m/2, with the collective transverse field acting
    as twice the spin-m/2 ladder operator Sx.  Binary: the encoding is
    bijective, so the sector is the full space and the driver couples
    single bit flips.
    """
    n_dim = gram.dim
    g = gram.as_array().astype(np.float64)
    if encoding.family == "hamming":
        m = encoding.qubits_per_qudit
        spin = m / 2.0
        vals = np.arange(-m // 2, m // 2 + 1, dtype=np.float64)
        d = m + 1
        ladder = np.zeros((d, d))
        for i, v in enumerate(vals[:-1]):
            amp = math.sqrt(spin * (spin + 1) - v * (v + 1))
            ladder[i + 1, i] = amp
            ladder[i, i + 1] = amp
        dim = d ** n_dim
        drv = np.zeros((dim, dim))
        eye = np.eye(d)
        for j in range(n_dim):
            op = np.ones((1, 1))
            # qudit 0 on the last kron factor = least significant digit
            for jj in range(n_dim - 1, -1, -1):
                op = np.kron(op, ladder if jj == j else eye)
            drv -= driver.h0 * op
        diag = np.zeros([d] * n_dim)
        for i in range(n_dim):
            xi = vals.reshape([d if ax == n_dim - 1 - i else 1 for ax in range(n_dim)])
            for j in range(n_dim):
                xj = vals.reshape(
                    [d if ax == n_dim - 1 - j else 1 for ax in range(n_dim)]
                )
                diag = diag + g[i, j] * xi * xj
        return drv, diag.reshape(-1)
    # binary: full space
    pd = ProblemDiagonal.from_model(compile_ising(gram, encoding))
    n = pd.n_qubits
    dim = pd.dim
    drv = np.zeros((dim, dim))
    idx = np.arange(dim)
    for b in range(n):
        drv[idx, idx ^ (1 << b)] = -driver.h0
    return drv, pd.as_float()


def sector_gap_scan(
    gram: GramMatrix,
    encoding: QuditEncoding,
    driver: DriverSpec,
    grid: int | np.ndarray = 33,
) -> GapProfile:
    """Gap profile E1(s) - E0(s) in the dynamically relevant sector (dense
    diagonalization; sector dimensions are small)."""
    drv, dg = sector_hamiltonian_parts(gram, encoding, driver)
    sgrid = _grid(grid)
    e0 = np.empty(sgrid.size)
    e1 = np.empty(sgrid.size)
    dmat = np.diag(dg)
    for i, s in enumerate(sgrid):
        vals = np.linalg.eigvalsh((1.0 - s) * drv + s * dmat)
        e0[i], e1[i] = vals[0], vals[1]
    return GapProfile(s_grid=sgrid, e0=e0, e1=e1)
