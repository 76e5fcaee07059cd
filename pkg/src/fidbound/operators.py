"""Dense operator algebra on labeled tensor-product Hilbert spaces.

Pauli strings with sign-tracked composition, density matrices and their
Pauli decomposition, squared fidelity, partial trace, unitary time
evolution via Hermitian eigendecomposition, and thermal states.

Conventions: hbar = 1, every energy is an angular frequency in rad/s,
times are seconds.  sigma_z|0> = +|0>.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import hbar as HBAR, k as K_BOLTZMANN

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-9


class SpaceMismatchError(ValueError):
    """Two operators were combined across different Hilbert spaces."""


class HermiticityError(ValueError):
    """An operator required to be Hermitian is not."""


PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Single-qubit products sigma_a . sigma_b = coeff * sigma_c.
_PAULI_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


@dataclass(frozen=True)
class PauliString:
    """A signed tensor product of single-qubit Pauli factors.

    `factors` is one character per qubit over {I, X, Y, Z}; `phase` is +1
    or -1.  The dense matrix is Hermitian and squares to the identity.
    """

    factors: str
    phase: int = 1

    def __post_init__(self):
        if not self.factors or any(c not in "IXYZ" for c in self.factors):
            raise ValueError(f"invalid Pauli factors {self.factors!r}")
        if self.phase not in (1, -1):
            raise ValueError(f"phase must be +1 or -1, got {self.phase}")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels like 'XZI', '+XXX' or '-ZZ'."""
        label = label.strip()
        phase = 1
        if label[:1] in "+-":
            phase = 1 if label[0] == "+" else -1
            label = label[1:]
        return cls(label.upper(), phase)

    @property
    def n_qubits(self) -> int:
        return len(self.factors)

    @property
    def weight(self) -> int:
        """Number of non-identity sites."""
        return sum(c != "I" for c in self.factors)

    def label(self) -> str:
        return ("+" if self.phase == 1 else "-") + self.factors

    def __str__(self):
        return self.factors if self.phase == 1 else "-" + self.factors

    def dense(self) -> np.ndarray:
        mat = np.array([[complex(self.phase)]])
        for c in self.factors:
            mat = np.kron(mat, PAULI_MATS[c])
        return mat


def pauli_product(a: PauliString, b: PauliString):
    """Symbolic product a.b = coeff * c with coeff in {1,-1,i,-i}.

    Returns (coeff, c) where c carries phase +1.
    """
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch in Pauli product")
    coeff = complex(a.phase * b.phase)
    out = []
    for x, y in zip(a.factors, b.factors):
        ph, c = _PAULI_PRODUCT[(x, y)]
        coeff *= ph
        out.append(c)
    return coeff, PauliString("".join(out))


def paulis_commute(a: PauliString, b: PauliString) -> bool:
    """Two Pauli strings commute iff they anticommute on an even number of sites."""
    clashes = sum(
        1 for x, y in zip(a.factors, b.factors) if x != "I" and y != "I" and x != y
    )
    return clashes % 2 == 0


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered, uniquely labeled tensor factors (label, dim)."""

    factors: tuple

    def __post_init__(self):
        labels = [lab for lab, _ in self.factors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate factor labels in {labels}")
        if any(d < 1 for _, d in self.factors):
            raise ValueError("factor dimensions must be positive")

    @classmethod
    def qubits(cls, n: int) -> "HilbertSpace":
        return cls(tuple((f"q{i + 1}", 2) for i in range(n)))

    @property
    def labels(self):
        return tuple(lab for lab, _ in self.factors)

    @property
    def dims(self):
        return tuple(d for _, d in self.factors)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_qubits(self) -> int:
        if any(d != 2 for d in self.dims):
            raise ValueError("space has non-qubit factors")
        return len(self.factors)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no factor labeled {label!r}") from None


class DenseOperator:
    """A square complex matrix attached to a HilbertSpace."""

    def __init__(self, space: HilbertSpace, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (space.total_dim, space.total_dim):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match dim {space.total_dim}"
            )
        self.space = space
        self.matrix = matrix

    @classmethod
    def identity(cls, space: HilbertSpace) -> "DenseOperator":
        return cls(space, np.eye(space.total_dim))

    def same_space(self, other: "DenseOperator") -> bool:
        return self.space.factors == other.space.factors

    def _check_space(self, other: "DenseOperator"):
        if not self.same_space(other):
            raise SpaceMismatchError(
                f"space mismatch: {self.space.labels} vs {other.space.labels}"
            )

    def __add__(self, other):
        self._check_space(other)
        return DenseOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check_space(other)
        return DenseOperator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar):
        return DenseOperator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return DenseOperator(self.space, -self.matrix)

    def __matmul__(self, other):
        self._check_space(other)
        return DenseOperator(self.space, self.matrix @ other.matrix)

    def dagger(self) -> "DenseOperator":
        return DenseOperator(self.space, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        # tolerance scaled by magnitude so rad/s-sized Hamiltonians pass
        scale = max(1.0, float(np.max(np.abs(self.matrix))))
        return self.hermiticity_defect() <= tol * scale


def embed(space: HilbertSpace, parts: dict) -> DenseOperator:
    """Tensor-embed single-factor matrices, identity on unnamed factors."""
    unknown = set(parts) - set(space.labels)
    if unknown:
        raise KeyError(f"unknown factor labels {sorted(unknown)}")
    mat = np.array([[1.0 + 0j]])
    for lab, d in space.factors:
        block = np.asarray(parts[lab], dtype=complex) if lab in parts else np.eye(d)
        if block.shape != (d, d):
            raise ValueError(f"factor {lab!r} expects a {d}x{d} block")
        mat = np.kron(mat, block)
    return DenseOperator(space, mat)


class DensityMatrix(DenseOperator):
    """DenseOperator validated to be a physical state."""

    def __init__(self, space, matrix, validate: bool = True):
        super().__init__(space, matrix)
        if validate:
            if self.hermiticity_defect() > HERMITICITY_TOL:
                raise HermiticityError(
                    f"density matrix not Hermitian (defect {self.hermiticity_defect():.2e})"
                )
            tr = self.trace()
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace {tr} != 1")
            lo = float(np.linalg.eigvalsh(self.matrix)[0])
            if lo < -POSITIVITY_TOL:
                raise ValueError(f"density matrix has eigenvalue {lo:.2e} < 0")

    @classmethod
    def from_ket(cls, space: HilbertSpace, ket: np.ndarray) -> "DensityMatrix":
        ket = np.asarray(ket, dtype=complex).ravel()
        ket = ket / np.linalg.norm(ket)
        return cls(space, np.outer(ket, ket.conj()), validate=False)

    def purity(self) -> float:
        return float(np.real(np.einsum("ij,ji->", self.matrix, self.matrix)))

    def dominant_ket(self) -> np.ndarray:
        """Eigenvector of the largest eigenvalue (the state, when pure)."""
        w, v = np.linalg.eigh(self.matrix)
        return v[:, -1]


@dataclass
class PauliCoefficients:
    """Real coefficients of a density matrix over all 4^N Pauli strings."""

    n_qubits: int
    table: dict = field(default_factory=dict)

    def __getitem__(self, label: str) -> float:
        return self.table[label]


def pauli_matrix(p: PauliString, space: HilbertSpace | None = None) -> DenseOperator:
    """Dense matrix of a Pauli string on an all-qubit space."""
    if space is None:
        space = HilbertSpace.qubits(p.n_qubits)
    if space.total_dim != 2 ** p.n_qubits:
        raise ValueError("space dimension does not match Pauli string length")
    return DenseOperator(space, p.dense())


def _check_qubit_space(rho: DenseOperator):
    if any(d != 2 for d in rho.space.dims):
        raise ValueError("operation requires an all-qubit space")


def decompose_density(rho: DensityMatrix) -> PauliCoefficients:
    """Coefficients c_S = 2^-N tr(rho S) over every Pauli string S."""
    _check_qubit_space(rho)
    n = len(rho.space.factors)
    table = {}
    for combo in itertools.product("IXYZ", repeat=n):
        s = "".join(combo)
        val = np.einsum("ij,ji->", rho.matrix, PauliString(s).dense()) / 2 ** n
        if abs(val.imag) > HERMITICITY_TOL:
            raise ValueError(f"non-real Pauli coefficient for {s}: {val}")
        table[s] = float(val.real)
    return PauliCoefficients(n, table)


def reconstruct_density(coeffs: PauliCoefficients) -> DensityMatrix:
    """Rebuild sum_S c_S S from a coefficient table."""
    n = coeffs.n_qubits
    mat = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for s, c in coeffs.table.items():
        if c != 0.0:
            mat += c * PauliString(s).dense()
    return DensityMatrix(HilbertSpace.qubits(n), mat)


def fidelity_sq(rho_l: DenseOperator, rho_psi: DenseOperator) -> float:
    """tr(rho_l rho_psi); equals <psi|rho_l|psi> for a pure target."""
    rho_l._check_space(rho_psi)
    val = np.einsum("ij,ji->", rho_l.matrix, rho_psi.matrix)
    return float(val.real)


def fidelity_sq_from_coeffs(c_l: PauliCoefficients, c_psi: PauliCoefficients) -> float:
    """2^N sum_S c^l_S c^psi_S, the coefficient form of tr(rho_l rho_psi)."""
    if c_l.n_qubits != c_psi.n_qubits:
        raise ValueError("qubit count mismatch between coefficient tables")
    total = sum(c * c_psi.table[s] for s, c in c_l.table.items())
    return float(2 ** c_l.n_qubits * total)


def expectation(rho: DensityMatrix, obs: DenseOperator) -> float:
    """tr(rho obs) for a Hermitian observable."""
    rho._check_space(obs)
    if not obs.is_hermitian():
        raise HermiticityError("observable is not Hermitian")
    val = np.einsum("ij,ji->", rho.matrix, obs.matrix)
    return float(val.real)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every factor not named in `keep` (preserves factor order)."""
    keep = set(keep)
    if not keep:
        raise ValueError("keep set must be nonempty")
    labels = rho.space.labels
    unknown = keep - set(labels)
    if unknown:
        raise KeyError(f"unknown factor labels {sorted(unknown)}")
    dims = rho.space.dims
    k = len(dims)
    tensor = rho.matrix.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if 2 * k > len(letters):
        raise ValueError("too many tensor factors")
    row = list(letters[:k])
    col = list(letters[k:2 * k])
    out = []
    for i, lab in enumerate(labels):
        if lab in keep:
            out.append(i)
        else:
            col[i] = row[i]  # trace this factor
    spec = "".join(row) + "".join(col) + "->" + \
        "".join(row[i] for i in out) + "".join(letters[k + i] for i in out)
    reduced = np.einsum(spec, tensor)
    d = int(np.prod([dims[i] for i in out]))
    new_space = HilbertSpace(tuple(rho.space.factors[i] for i in out))
    return DensityMatrix(new_space, reduced.reshape(d, d), validate=False)


class Propagator:
    """exp(-iHt) via one Hermitian eigendecomposition, reused across a time grid."""

    def __init__(self, hamiltonian: DenseOperator):
        if not hamiltonian.is_hermitian():
            raise HermiticityError("Hamiltonian is not Hermitian")
        self.space = hamiltonian.space
        self.evals, self.evecs = np.linalg.eigh(hamiltonian.matrix)

    def unitary(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.evals * t)
        return (self.evecs * phases) @ self.evecs.conj().T

    def apply_ket(self, ket: np.ndarray, t: float) -> np.ndarray:
        w = self.evecs.conj().T @ ket
        return self.evecs @ (np.exp(-1j * self.evals * t) * w)

    def evolve_density(self, rho: DensityMatrix, t: float) -> DensityMatrix:
        u = self.unitary(t)
        return DensityMatrix(rho.space, u @ rho.matrix @ u.conj().T, validate=False)


def evolve(state: DensityMatrix, hamiltonian: DenseOperator, t: float) -> DensityMatrix:
    """U rho U^dagger with U = exp(-i H t)."""
    state._check_space(hamiltonian)
    return Propagator(hamiltonian).evolve_density(state, t)


def thermal_state(hamiltonian: DenseOperator, temperature: float) -> DensityMatrix:
    """exp(-H/kT)/Z at temperature kelvin; ground-state projector at T=0.

    H is in rad/s (hbar=1), so the Boltzmann factor is exp(-hbar w / k_B T).
    """
    if temperature < 0:
        raise ValueError(f"negative temperature {temperature}")
    if not hamiltonian.is_hermitian():
        raise HermiticityError("Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(hamiltonian.matrix)
    w = w - w[0]
    if temperature == 0:
        atol = 1e-9 * max(1.0, float(np.max(np.abs(w))))
        weights = (w < atol).astype(float)
    elif math.isinf(temperature):
        weights = np.ones_like(w)
    else:
        weights = np.exp(-w * HBAR / (K_BOLTZMANN * temperature))
    weights = weights / weights.sum()
    mat = (v * weights) @ v.conj().T
    return DensityMatrix(hamiltonian.space, mat, validate=False)


def temperature_for_nbar(omega: float, nbar: float) -> float:
    """Kelvin temperature putting a mode of frequency omega (rad/s) at mean occupation nbar."""
    if nbar < 0:
        raise ValueError("mean occupation must be nonnegative")
    if nbar == 0:
        return 0.0
    return HBAR * omega / (K_BOLTZMANN * math.log(1.0 + 1.0 / nbar))


def depolarize(rho: DensityMatrix, p: float) -> DensityMatrix:
    """(1-p) rho + p I/d."""
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing strength {p} outside [0, 1]")
    d = rho.space.total_dim
    mat = (1 - p) * rho.matrix + p * np.eye(d) / d
    return DensityMatrix(rho.space, mat, validate=False)


class PauliSum:
    """A real-linear combination of Pauli strings with symbolic products.

    Coefficients are complex internally (site products introduce factors of
    i that cancel in Hermitian combinations); `terms()` enforces reality.
    """

    def __init__(self, n_qubits: int, table: dict | None = None):
        self.n_qubits = n_qubits
        self.table = dict(table) if table else {}

    @classmethod
    def identity(cls, n_qubits: int, coeff=1.0) -> "PauliSum":
        return cls(n_qubits, {"I" * n_qubits: complex(coeff)})

    @classmethod
    def from_pauli(cls, p: PauliString, coeff=1.0) -> "PauliSum":
        return cls(p.n_qubits, {p.factors: complex(coeff) * p.phase})

    def _add_entry(self, factors: str, coeff: complex):
        new = self.table.get(factors, 0j) + coeff
        if new == 0:
            self.table.pop(factors, None)
        else:
            self.table[factors] = new

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n_qubits != other.n_qubits:
            raise ValueError("qubit count mismatch")
        out = PauliSum(self.n_qubits, self.table)
        for s, c in other.table.items():
            out._add_entry(s, c)
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, PauliSum):
            if self.n_qubits != other.n_qubits:
                raise ValueError("qubit count mismatch")
            out = PauliSum(self.n_qubits)
            for sa, ca in self.table.items():
                pa = PauliString(sa)
                for sb, cb in other.table.items():
                    ph, pc = pauli_product(pa, PauliString(sb))
                    out._add_entry(pc.factors, ca * cb * ph)
            return out
        out = PauliSum(self.n_qubits, self.table)
        for s in out.table:
            out.table[s] = out.table[s] * other
        return out

    __rmul__ = __mul__

    def shift(self, scalar) -> "PauliSum":
        """Add scalar times the identity."""
        out = PauliSum(self.n_qubits, self.table)
        out._add_entry("I" * self.n_qubits, complex(scalar))
        return out

    def ensure_strings(self, labels) -> "PauliSum":
        """Force the given strings to appear, with zero coefficient if absent."""
        out = PauliSum(self.n_qubits, self.table)
        for lab in labels:
            out.table.setdefault(lab, 0j)
        return out

    def to_dense(self, space: HilbertSpace | None = None) -> DenseOperator:
        if space is None:
            space = HilbertSpace.qubits(self.n_qubits)
        mat = np.zeros((2 ** self.n_qubits,) * 2, dtype=complex)
        for s, c in self.table.items():
            mat += c * PauliString(s).dense()
        return DenseOperator(space, mat)

    def terms(self, tol: float = 1e-12):
        """(offset, [(PauliString, coeff)]) with the identity split out.

        Raises if any coefficient has an imaginary part above tol; sorted
        by factor string for deterministic output.
        """
        ident = "I" * self.n_qubits
        offset = 0.0
        out = []
        for s in sorted(self.table):
            c = self.table[s]
            if abs(c.imag) > tol:
                raise ValueError(f"non-Hermitian Pauli sum: coefficient of {s} is {c}")
            if s == ident:
                offset = c.real
            else:
                out.append((PauliString(s), c.real))
        return offset, out
