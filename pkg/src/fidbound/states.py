"""Constructors for the pure target states the bounds certify.

GHZ/cat, W, Bell, symmetric Dicke states |j=N, j_z>, computational-basis
states, and stabilizer states defined by generator lists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .operators import DensityMatrix, HilbertSpace

BELL_VARIANTS = ("plus", "minus", "psi_plus", "psi_minus")


@dataclass(frozen=True)
class TargetStateSpec:
    """Which target state to build.

    kind: one of ghz, w, bell, dicke, basis, stabilizer.
    bell takes `variant`; dicke takes `j_z`; basis takes `bitstring`;
    stabilizer takes `generators` (a StabilizerGenerators).
    """

    kind: str
    n_qubits: int
    variant: str | None = None
    j_z: int | None = None
    bitstring: str | None = None
    generators: object = None

    def __post_init__(self):
        n = self.n_qubits
        if n < 1:
            raise ValueError("n_qubits must be positive")
        if self.kind in ("ghz", "w") and n < 2:
            raise ValueError(f"{self.kind} needs at least 2 qubits")
        if self.kind == "bell":
            if n != 2:
                raise ValueError("bell states need exactly 2 qubits")
            if self.variant not in BELL_VARIANTS:
                raise ValueError(f"bell variant must be one of {BELL_VARIANTS}")
        if self.kind == "dicke":
            if self.j_z is None or (n - self.j_z) % 2 != 0 or abs(self.j_z) > n:
                raise ValueError(
                    f"dicke j_z must lie in {{-N, -N+2, ..., N}}, got {self.j_z}"
                )
        if self.kind == "basis":
            if self.bitstring is None or len(self.bitstring) != n or \
                    any(c not in "01" for c in self.bitstring):
                raise ValueError(f"basis bitstring must be {n} chars of 0/1")
        if self.kind == "stabilizer" and self.generators is None:
            raise ValueError("stabilizer spec needs generators")
        if self.kind not in ("ghz", "w", "bell", "dicke", "basis", "stabilizer"):
            raise ValueError(f"unknown state kind {self.kind!r}")


def basis_ket(bits: str) -> np.ndarray:
    ket = np.zeros(2 ** len(bits), dtype=complex)
    ket[int(bits, 2)] = 1.0
    return ket


def ghz_ket(n: int) -> np.ndarray:
    ket = np.zeros(2 ** n, dtype=complex)
    ket[0] = ket[-1] = 1 / np.sqrt(2)
    return ket


def dicke_ket(n: int, j_z: int) -> np.ndarray:
    """Symmetric state with k = (N - j_z)/2 excitations, amplitudes 1/sqrt(C(N,k))."""
    k = (n - j_z) // 2
    ket = np.zeros(2 ** n, dtype=complex)
    for positions in itertools.combinations(range(n), k):
        idx = sum(1 << (n - 1 - p) for p in positions)
        ket[idx] = 1.0
    return ket / np.linalg.norm(ket)


def w_ket(n: int) -> np.ndarray:
    return dicke_ket(n, n - 2)


def bell_ket(variant: str) -> np.ndarray:
    s = 1 / np.sqrt(2)
    return {
        "plus": np.array([s, 0, 0, s], dtype=complex),
        "minus": np.array([s, 0, 0, -s], dtype=complex),
        "psi_plus": np.array([0, s, s, 0], dtype=complex),
        "psi_minus": np.array([0, s, -s, 0], dtype=complex),
    }[variant]


def build_state(spec: TargetStateSpec) -> DensityMatrix:
    """Rank-1 density matrix for the requested target state."""
    n = spec.n_qubits
    space = HilbertSpace.qubits(n)
    if spec.kind == "ghz":
        ket = ghz_ket(n)
    elif spec.kind == "w":
        ket = w_ket(n)
    elif spec.kind == "bell":
        ket = bell_ket(spec.variant)
    elif spec.kind == "dicke":
        ket = dicke_ket(n, spec.j_z)
    elif spec.kind == "basis":
        ket = basis_ket(spec.bitstring)
    else:  # stabilizer
        from .symmetry import stab_density
        return stab_density(spec.generators)
    return DensityMatrix.from_ket(space, ket)


@dataclass
class QuantumNumberReport:
    """Residuals of (J^2 - j(j+2))|psi> and (J_z - j_z)|psi>."""

    j: int
    j_z: int
    jsq_eigenvalue: float
    jsq_residual: float
    jz_residual: float
    tol: float = 1e-9

    @property
    def ok(self) -> bool:
        return self.jsq_residual < self.tol and self.jz_residual < self.tol


def verify_quantum_numbers(state: DensityMatrix, j: int, j_z: int) -> QuantumNumberReport:
    """Check whether a pure state carries rotational quantum numbers (j, j_z).

    Pauli-operator convention: J^2 eigenvalues read j(j+2).
    """
    from .symmetry import collective_ops
    n = state.space.n_qubits
    ops = collective_ops(n)
    ket = state.dominant_ket()
    jsq_val = j * (j + 2)
    r_jsq = np.linalg.norm(ops.j_sq.matrix @ ket - jsq_val * ket)
    r_jz = np.linalg.norm(ops.j_z.matrix @ ket - j_z * ket)
    return QuantumNumberReport(j, j_z, float(jsq_val), float(r_jsq), float(r_jz))
