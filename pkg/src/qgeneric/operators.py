"""Dense complex-matrix foundation: observables, density matrices, brackets.

Operators are plain complex square `np.ndarray`s validated at the typed
boundaries (`DensityMatrix`, model builders, system specs).  All bracket
operations are pure functions; `DensityMatrix` caches its spectral
decomposition, which downstream kernels (matrix logarithm, mollified
product) share instead of re-diagonalizing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_RTOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_ATOL = 1e-12


class DimensionMismatchError(ValueError):
    """Operands do not share one matrix dimension."""


class HermiticityError(ValueError):
    """A matrix required to be Hermitian is not, within tolerance."""


class PositivityError(ValueError):
    """A density matrix violates positivity where positivity is required."""


@dataclass(frozen=True)
class Constants:
    """Physical constants threaded through all formulas.

    Defaults are natural units (hbar = k_B = 1); pass SI values for
    dimensional runs.
    """

    hbar: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.k_B > 0):
            raise ValueError("hbar and k_B must be strictly positive")


NATURAL = Constants()

SI = Constants(hbar=1.054571817e-34, k_B=1.380649e-23)


def max_abs(matrix) -> float:
    """Max-absolute-entry norm, the norm used by all residual contracts."""
    matrix = np.asarray(matrix)
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def _as_square(matrix, name="operator") -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError(f"{name} contains non-finite entries")
    return m


def _check_same_dim(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")


def is_hermitian(matrix, rtol: float = HERMITICITY_RTOL) -> bool:
    m = np.asarray(matrix)
    scale = max_abs(m)
    return max_abs(m - m.conj().T) <= rtol * scale if scale else True


def require_hermitian(matrix, rtol: float = HERMITICITY_RTOL, name: str = "operator") -> np.ndarray:
    """Validate Hermiticity and return the matrix as a complex array.

    Inputs failing the check are rejected, never symmetrized: silent repair
    would mask model-assembly bugs.
    """
    m = _as_square(matrix, name)
    if not is_hermitian(m, rtol):
        resid = max_abs(m - m.conj().T) / max(max_abs(m), 1e-300)
        raise HermiticityError(f"{name} is not Hermitian (relative residual {resid:.3e})")
    return m


def commutator(a, b) -> np.ndarray:
    """[A, B] = AB - BA.  Antisymmetric and traceless."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    """{A, B}_+ = AB + BA."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _check_same_dim(a, b)
    return a @ b + b @ a


def quantum_poisson(a, b, constants: Constants = NATURAL) -> np.ndarray:
    """Quantum Poisson bracket [A, B]/(i hbar).

    Hermitian whenever A and B are Hermitian, and antisymmetric in (A, B);
    this is the generator of all reversible evolution.
    """
    return commutator(a, b) / (1j * constants.hbar)


def average(a, rho, imag_rtol: float = 1e-12) -> float:
    """Quantum average <A> = tr(A rho), returned as a real scalar.

    The imaginary residue is checked against ``imag_rtol`` times the natural
    trace scale; a residue above tolerance signals a non-Hermitian input and
    raises :class:`HermiticityError`.
    """
    a = np.asarray(a, dtype=complex)
    r = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    _check_same_dim(a, r)
    tr = np.trace(a @ r)
    scale = max(1.0, a.shape[0] * max_abs(a) * max_abs(r))
    if abs(tr.imag) > imag_rtol * scale:
        raise HermiticityError(
            f"average has imaginary residue {tr.imag:.3e} beyond tolerance; non-Hermitian input?"
        )
    return float(tr.real)


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition M = U diag(w) U^dagger with ascending eigenvalues.

    Eigenvector phases follow a deterministic convention (first significant
    component made positive real) so test outputs are reproducible.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant component is positive real."""
    fixed = np.array(vectors)
    for k in range(fixed.shape[1]):
        col = fixed[:, k]
        mags = np.abs(col)
        idx = np.argmax(mags > 1e-8 * mags.max()) if mags.max() > 0 else 0
        pivot = col[idx]
        if abs(pivot) > 0:
            fixed[:, k] = col * (pivot.conjugate() / abs(pivot))
    return fixed


def eigh_sorted(matrix, rtol: float = HERMITICITY_RTOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with deterministic phases."""
    m = require_hermitian(matrix, rtol=rtol)
    w, u = np.linalg.eigh(m)
    return EigenDecomposition(eigenvalues=w, eigenvectors=_fix_phases(u))


class DensityMatrix:
    """Hermitian, unit-trace, positive matrix with a cached spectral decomposition.

    Hermiticity and normalization are checked eagerly; positivity is checked
    when the spectrum is first computed.  Instances are immutable values: the
    decomposition is computed once and shared by every kernel that needs it.
    """

    __slots__ = ("_matrix", "_spectrum")

    def __init__(self, matrix, *, rtol: float = HERMITICITY_RTOL):
        m = require_hermitian(matrix, rtol=rtol, name="density matrix")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace {tr:.17g} deviates from 1 beyond {TRACE_ATOL}")
        m = m.copy()
        m.flags.writeable = False
        self._matrix = m
        self._spectrum = None

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def spectrum(self) -> EigenDecomposition:
        if self._spectrum is None:
            dec = eigh_sorted(self._matrix)
            if dec.eigenvalues[0] < -EIGENVALUE_ATOL:
                raise PositivityError(
                    f"density matrix has eigenvalue {dec.eigenvalues[0]:.3e} below -{EIGENVALUE_ATOL}"
                )
            object.__setattr__  # noqa: B018  (slots: plain attribute assignment below)
            self._spectrum = dec
        return self._spectrum

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum.eigenvectors

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @classmethod
    def from_spectrum(cls, eigenvalues, eigenvectors) -> "DensityMatrix":
        """Assemble from a known decomposition, pre-populating the cache."""
        w = np.asarray(eigenvalues, dtype=float)
        u = np.asarray(eigenvectors, dtype=complex)
        m = (u * w) @ u.conj().T
        m = 0.5 * (m + m.conj().T)
        out = cls(m)
        order = np.argsort(w, kind="stable")
        out._spectrum = EigenDecomposition(eigenvalues=w[order], eigenvectors=u[:, order])
        return out

    @classmethod
    def from_populations(cls, populations) -> "DensityMatrix":
        p = np.asarray(populations, dtype=float)
        return cls(np.diag(p).astype(complex))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def as_density_matrix(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def matrix_log(rho: DensityMatrix) -> np.ndarray:
    """ln(rho) through the cached spectrum; requires strictly positive eigenvalues."""
    dm = as_density_matrix(rho)
    p = dm.eigenvalues
    if p[0] <= 0.0:
        raise PositivityError(f"matrix logarithm undefined: smallest eigenvalue {p[0]:.3e} <= 0")
    u = dm.eigenvectors
    out = (u * np.log(p)) @ u.conj().T
    return 0.5 * (out + out.conj().T)


def entropy_operator(rho, constants: Constants = NATURAL) -> np.ndarray:
    """Entropy observable -k_B ln(rho).

    Defined only when every occupation is strictly positive; its average
    against rho is the von Neumann entropy.
    """
    return -constants.k_B * matrix_log(as_density_matrix(rho))


def von_neumann_entropy(rho, constants: Constants = NATURAL) -> float:
    """-k_B sum_n p_n ln p_n from the cached spectrum."""
    p = as_density_matrix(rho).eigenvalues
    if p[0] <= 0.0:
        raise PositivityError(f"entropy undefined: smallest eigenvalue {p[0]:.3e} <= 0")
    return float(-constants.k_B * np.sum(p * np.log(p)))


def trace_distance(a, b) -> float:
    """T(a, b) = (1/2) sum |eig(a - b)| for Hermitian a, b."""
    ma = a.matrix if isinstance(a, DensityMatrix) else np.asarray(a, dtype=complex)
    mb = b.matrix if isinstance(b, DensityMatrix) else np.asarray(b, dtype=complex)
    _check_same_dim(ma, mb)
    diff = ma - mb
    w = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.sum(np.abs(w)))
