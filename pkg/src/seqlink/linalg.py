"""Dense Hermitian kernel: Hadamard products, entrywise modulus,
positive-definite inversion, block partitioning, Schur-complement block
inverse and dominant eigenvalues.

Everything here operates on plain numpy arrays and is pure: no function
mutates its inputs, so values can be shared freely between pixel workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NonConvergence, NotPositiveDefinite

# Relative diagonal jitter used when a factorization needs rescuing.
DEFAULT_JITTER = 1e-9


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise (Schur) product of two equally shaped matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch for hadamard product: {a.shape} vs {b.shape}")
    return a * b


def abs_entrywise(sigma: np.ndarray) -> np.ndarray:
    """Entrywise modulus |Σ|, the real core / coherence part of a covariance."""
    return np.abs(np.asarray(sigma))


def hermitize(a: np.ndarray) -> np.ndarray:
    """Nearest Hermitian matrix (a + aᴴ)/2; makes conjugate symmetry exact."""
    a = np.asarray(a)
    return (a + a.conj().T) / 2


def pd_inverse(a: np.ndarray, jitter: float = DEFAULT_JITTER) -> np.ndarray:
    """Invert a symmetric/Hermitian positive-definite matrix via Cholesky.

    If the factorization fails and jitter > 0, retries once after adding
    jitter*(trace/dim) to the diagonal; raises NotPositiveDefinite if that
    also fails.
    """
    a = np.asarray(a)
    dim = a.shape[0]
    eye = np.eye(dim, dtype=a.dtype)
    try:
        c, low = scipy.linalg.cho_factor(a, lower=True)
        return scipy.linalg.cho_solve((c, low), eye)
    except np.linalg.LinAlgError:
        pass
    if jitter > 0:
        bump = jitter * (np.trace(a).real / dim)
        try:
            c, low = scipy.linalg.cho_factor(a + bump * eye, lower=True)
            return scipy.linalg.cho_solve((c, low), eye)
        except np.linalg.LinAlgError:
            pass
    raise NotPositiveDefinite(
        f"{dim}x{dim} matrix is not positive definite (jitter={jitter})"
    )


@dataclass
class BlockCov:
    """Past/cross/new partition of an l x l matrix.

    past is p x p, cross is k x p (new rows against past columns) and new is
    k x k, so the source matrix is [[past, crossᴴ], [cross, new]].
    """

    past: np.ndarray
    cross: np.ndarray
    new: np.ndarray

    @property
    def p(self) -> int:
        return self.past.shape[0]

    @property
    def k(self) -> int:
        return self.new.shape[0]


def partition(m: np.ndarray, p: int) -> BlockCov:
    """Split an l x l matrix into past (p x p), cross (k x p), new (k x k)."""
    m = np.asarray(m)
    l = m.shape[0]
    if not 1 <= p < l:
        raise ValueError(f"past length p={p} must satisfy 1 <= p < l={l}")
    return BlockCov(past=m[:p, :p], cross=m[p:, :p], new=m[p:, p:])


def reassemble(blocks: BlockCov) -> np.ndarray:
    """Inverse of partition: rebuild the full matrix from its blocks."""
    top = np.hstack([blocks.past, blocks.cross.conj().T])
    bottom = np.hstack([blocks.cross, blocks.new])
    return np.vstack([top, bottom])


@dataclass
class SchurFactors:
    """Blockwise inverse data of a real coherence matrix split at p.

    With psi = [[P, Qᵀ], [Q, N]] (P = past coherence, Q = cross, N = new),
    D = N - Q P⁻¹ Qᵀ and the full inverse assembles as [[F⁻¹, Aᵀ], [A, D⁻¹]]
    where A = -D⁻¹ Q P⁻¹ and F⁻¹ = P⁻¹ + P⁻¹ Qᵀ D⁻¹ Q P⁻¹.

    F⁻¹ only feeds the constant term of the block objective, so it is built
    lazily on first use and cached. m_mat (D⁻¹ entrywise-times the complex
    new-block covariance) is attached when that block is supplied.
    """

    psi_p_inv: np.ndarray
    d_inv: np.ndarray
    a_mat: np.ndarray
    m_mat: np.ndarray | None = None
    _cross: np.ndarray | None = None
    _f_inv: np.ndarray | None = field(default=None, repr=False)

    def f_inv(self) -> np.ndarray:
        if self._f_inv is None:
            if self._cross is None:
                raise ValueError("factors were built without the cross block")
            qp = self._cross @ self.psi_p_inv  # k x p
            self._f_inv = self.psi_p_inv + qp.T @ self.d_inv @ qp
        return self._f_inv


def schur_factors(
    psi: np.ndarray,
    p: int,
    jitter: float = DEFAULT_JITTER,
    sigma_new: np.ndarray | None = None,
) -> SchurFactors:
    """Blockwise inverse of a real SPD coherence matrix split at column p.

    sigma_new, when given, is the complex covariance of the new block; it is
    combined with D⁻¹ into the m_mat field used by the block objective.
    """
    psi = np.asarray(psi)
    blocks = partition(psi, p)
    psi_p_inv = pd_inverse(blocks.past, jitter)
    d = blocks.new - blocks.cross @ psi_p_inv @ blocks.cross.T
    d = (d + d.T) / 2
    d_inv = pd_inverse(d, jitter)
    a_mat = -d_inv @ blocks.cross @ psi_p_inv
    m_mat = None
    if sigma_new is not None:
        m_mat = hadamard(d_inv, np.asarray(sigma_new))
    return SchurFactors(
        psi_p_inv=psi_p_inv,
        d_inv=d_inv,
        a_mat=a_mat,
        m_mat=m_mat,
        _cross=blocks.cross,
    )


def assemble_block_inverse(factors: SchurFactors) -> np.ndarray:
    """Full inverse [[F⁻¹, Aᵀ], [A, D⁻¹]] reconstructed from the factors."""
    top = np.hstack([factors.f_inv(), factors.a_mat.T])
    bottom = np.hstack([factors.a_mat, factors.d_inv])
    return np.vstack([top, bottom])


def _power_iteration(h: np.ndarray, v: np.ndarray, shift: float, tol: float,
                     max_iters: int):
    """Dominant Rayleigh quotient of h from start v; returns (value, converged).

    Stops on the eigenpair residual ||hv - λv|| <= tol/2 * |λ - shift|, which
    for Hermitian h bounds the eigenvalue error of the *unshifted* problem by
    the same quantity (Weyl), so the requested tolerance is honored.
    """
    v = v / np.linalg.norm(v)
    rayleigh = 0.0
    for _ in range(max_iters):
        hv = h @ v
        # The explicit v'v denominator cancels the rounding left by the
        # previous normalization; for scaled-identity matrices both dot
        # products round identically and the quotient is exact, which keeps
        # downstream MM updates at literal zero on exact fixed points.
        rayleigh = float(np.real(v.conj() @ hv) / np.real(v.conj() @ v))
        residual = float(np.linalg.norm(hv - rayleigh * v))
        target = 0.5 * tol * max(abs(rayleigh - shift), 1e-12 * max(shift, 1e-300))
        if residual <= target:
            return rayleigh, True
        norm = np.linalg.norm(hv)
        if norm == 0.0:
            return 0.0, True
        v = hv / norm
    return rayleigh, False


def largest_eigenvalue(
    h: np.ndarray, tol: float = 1e-8, max_iters: int = 10_000
) -> float:
    """Largest (algebraic) eigenvalue of a Hermitian matrix.

    Power iteration on h + shift*I with shift = max absolute row sum, so the
    dominant-modulus eigenvalue is the algebraic maximum even for indefinite
    input. Runs from the all-ones start and once more from a fixed ramp start
    (an all-ones vector can be exactly orthogonal to the dominant eigenspace
    of structured matrices); keeps the larger estimate. Falls back to a dense
    eigendecomposition for dim <= 64 if unconverged, else raises
    NonConvergence.
    """
    h = np.asarray(h)
    dim = h.shape[0]
    if dim == 0:
        raise ValueError("empty matrix")
    shift = float(np.max(np.sum(np.abs(h), axis=1)))
    if shift == 0.0:
        return 0.0
    shifted = h + shift * np.eye(dim, dtype=h.dtype)
    ones = np.ones(dim, dtype=h.dtype)
    ramp = ones + np.linspace(0.0, 1.0, dim).astype(h.dtype)
    best = None
    converged_any = False
    for start in (ones, ramp):
        value, converged = _power_iteration(shifted, start, shift, tol, max_iters)
        converged_any = converged_any or converged
        if best is None or value > best:
            best = value
    if not converged_any:
        if dim <= 64:
            return float(np.max(scipy.linalg.eigvalsh(h)))
        raise NonConvergence(
            f"power iteration did not converge in {max_iters} iterations (dim={dim})"
        )
    return best - shift
