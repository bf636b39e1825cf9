"""
Pauli-sum generators A = L + iH for the benchmarks, and the product-formula error estimators.

Pauli strings are written highest qubit first ("IX" is X on q0); dense matrices use the
little-endian register order this implies.
"""

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .utils import ValidationError

logger = logging.getLogger(__name__)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
BOUNDARY_CONDITIONS = ("dirichlet", "neumann", "periodic")
MAX_QUBITS = 14
MAX_WORDS = 2_000_000
SIMPLIFY_TOL = 1e-14


def pauli_matrix(string: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for ch in string:
        out = np.kron(out, PAULI_MATRICES[ch])
    return out


def anticommute(a: str, b: str) -> bool:
    clashes = sum(1 for p, q in zip(a, b) if p != "I" and q != "I" and p != q)
    return clashes % 2 == 1


_PRODUCT = {
    ("X", "Y"): (1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"),
    ("Z", "Y"): (-1j, "X"),
    ("X", "Z"): (-1j, "Y"),
}


def pauli_product(a: str, b: str) -> Tuple[complex, str]:
    phase = 1 + 0j
    out = []
    for p, q in zip(a, b):
        if p == "I":
            out.append(q)
        elif q == "I":
            out.append(p)
        elif p == q:
            out.append("I")
        else:
            f, r = _PRODUCT[(p, q)]
            phase *= f
            out.append(r)
    return phase, "".join(out)


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    string: str

    def __post_init__(self):
        if not self.string or set(self.string) - set("IXYZ"):
            raise ValidationError(f"invalid Pauli string {self.string!r}")
        if not np.isfinite(self.coefficient):
            raise ValidationError(f"non-finite coefficient on {self.string}")

    @property
    def n_qubits(self) -> int:
        return len(self.string)

    def site(self, qubit: int) -> str:
        return self.string[self.n_qubits - 1 - qubit]

    @property
    def support(self) -> List[int]:
        """Qubit indices carrying a non-identity Pauli, ascending."""
        return [q for q in range(self.n_qubits) if self.site(q) != "I"]

    @property
    def weight(self) -> int:
        return len(self.support)

    def matrix(self) -> np.ndarray:
        return self.coefficient * pauli_matrix(self.string)


@dataclass
class PauliSum:
    n_qubits: int
    terms: List[PauliTerm] = field(default_factory=list)

    def __post_init__(self):
        for term in self.terms:
            if term.n_qubits != self.n_qubits:
                raise ValidationError(f"term {term.string} does not act on {self.n_qubits} qubits")

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def matrix(self) -> np.ndarray:
        out = np.zeros((2**self.n_qubits,) * 2, dtype=complex)
        for term in self.terms:
            out += term.matrix()
        return out

    def scaled(self, factor: float) -> "PauliSum":
        return PauliSum(self.n_qubits, [PauliTerm(factor * t.coefficient, t.string) for t in self.terms])

    def simplified(self, tol: float = SIMPLIFY_TOL) -> "PauliSum":
        """Merge repeated strings (first occurrence keeps its place) and drop negligible terms."""
        merged: Dict[str, float] = {}
        for term in self.terms:
            merged[term.string] = merged.get(term.string, 0.0) + term.coefficient
        return PauliSum(self.n_qubits, [PauliTerm(c, s) for s, c in merged.items() if abs(c) > tol])

    def embedded(self, offset: int, total: int) -> "PauliSum":
        high = total - offset - self.n_qubits
        if high < 0:
            raise ValidationError(f"cannot embed {self.n_qubits} qubits at offset {offset} in {total}")
        return PauliSum(total, [PauliTerm(t.coefficient, "I" * high + t.string + "I" * offset) for t in self.terms])

    def to_list(self):
        return [[t.coefficient, t.string] for t in self.terms]

    @classmethod
    def from_list(cls, items, n_qubits: Optional[int] = None):
        terms = [PauliTerm(float(c), str(s)) for c, s in items]
        if n_qubits is None:
            if not terms:
                raise ValidationError("cannot infer the register size of an empty Pauli list")
            n_qubits = terms[0].n_qubits
        return cls(n_qubits, terms)


@dataclass
class GeneratorSpec:
    """
    A = L + iH as Pauli sums. For heat problems ``grid`` holds alpha and the per-axis
    (bc, m, h); ``blocks`` keeps the per-axis L pieces (unmerged) for gate accounting.
    """

    L: PauliSum
    H: PauliSum
    label: str
    grid: Optional[Dict] = None
    blocks: List[PauliSum] = field(default_factory=list)

    def __post_init__(self):
        if self.L.n_qubits != self.H.n_qubits:
            raise ValidationError("L and H act on different registers")
        if not self.blocks:
            self.blocks = [self.L]

    @property
    def n_qubits(self) -> int:
        return self.L.n_qubits

    def matrix(self) -> np.ndarray:
        return self.L.matrix() + 1j * self.H.matrix()

    def to_dict(self):
        return {"label": self.label, "L": self.L.to_list(), "H": self.H.to_list(), "grid": self.grid, "n_qubits": self.n_qubits}

    def to_json(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)


def _r_block(c: int, m: int) -> List[PauliTerm]:
    """Strings of s_+^{(c)} prod_{j<c} s_-^{(j)} + h.c. on qubits 0..c of an m-qubit register."""
    terms = []
    for size in range(0, c + 2, 2):
        for ys in itertools.combinations(range(c + 1), size):
            a = 1 if c in ys else 0
            b = size - a
            coef = 0.5**c * (-1) ** ((b - a) // 2)
            sites = ["I"] * m
            for q in range(c + 1):
                sites[m - 1 - q] = "Y" if q in ys else "X"
            terms.append(PauliTerm(coef, "".join(sites)))
    return terms


def _neumann_correction(m: int) -> List[PauliTerm]:
    # |0..0><0..0| + |1..1><1..1| = 2^{1-m} sum_{|S| even} Z_S
    terms = []
    for size in range(0, m + 1, 2):
        for zs in itertools.combinations(range(m), size):
            sites = ["I"] * m
            for q in zs:
                sites[m - 1 - q] = "Z"
            terms.append(PauliTerm(-(2.0 ** (1 - m)), "".join(sites)))
    return terms


def _periodic_correction(m: int) -> List[PauliTerm]:
    # |0..0><1..1| + h.c. = 2^{1-m} sum_{|S| even} (-1)^{|S|/2} X_{not S} Y_S
    terms = []
    for size in range(0, m + 1, 2):
        for ys in itertools.combinations(range(m), size):
            sites = ["X"] * m
            for q in ys:
                sites[m - 1 - q] = "Y"
            terms.append(PauliTerm(-(2.0 ** (1 - m)) * (-1) ** (size // 2), "".join(sites)))
    return terms


def heat_pauli_sum(bc: str, m: int) -> PauliSum:
    """Unscaled T_m for the boundary condition, simplified."""
    if bc not in BOUNDARY_CONDITIONS:
        raise ValidationError(f"unknown boundary condition {bc!r}")
    if m < 2:
        raise ValidationError(f"need m >= 2 qubits per axis, got {m}")
    if m > MAX_QUBITS:
        raise ValidationError(f"m={m} exceeds the {MAX_QUBITS}-qubit limit")
    terms = [PauliTerm(2.0, "I" * m)]
    for c in range(m):
        terms += [PauliTerm(-t.coefficient, t.string) for t in _r_block(c, m)]
    if bc == "neumann":
        terms += _neumann_correction(m)
    elif bc == "periodic":
        terms += _periodic_correction(m)
    return PauliSum(m, terms).simplified()


def laplacian_matrix(bc: str, m: int) -> np.ndarray:
    """Dense reference: tridiagonal 2,-1 with the boundary rows of the chosen condition."""
    size = 2**m
    out = 2 * np.eye(size) - np.eye(size, k=1) - np.eye(size, k=-1)
    if bc == "neumann":
        out[0, 0] = out[-1, -1] = 1
    elif bc == "periodic":
        out[0, -1] = out[-1, 0] = -1
    elif bc != "dirichlet":
        raise ValidationError(f"unknown boundary condition {bc!r}")
    return out


def heat_generator(bc: str, m: int, alpha: float = 1.0, h: float = 1.0) -> GeneratorSpec:
    """(alpha/h^2) T_m as L, H = 0."""
    if h <= 0 or alpha <= 0:
        raise ValidationError(f"need alpha > 0 and h > 0, got alpha={alpha}, h={h}")
    L = heat_pauli_sum(bc, m).scaled(alpha / h**2)
    grid = {"alpha": alpha, "axes": [{"bc": bc, "m": m, "h": h}]}
    return GeneratorSpec(L=L, H=PauliSum(m), label=f"heat-{bc}", grid=grid)


def kron_sum_generator(axes: Sequence[Tuple[str, int, float]], alpha: float = 1.0) -> GeneratorSpec:
    """Kronecker sum of per-axis Laplacians; axis 0 sits on the lowest qubits."""
    if not axes:
        raise ValidationError("need at least one axis")
    total = sum(int(m) for _, m, _ in axes)
    if total > MAX_QUBITS:
        raise ValidationError(f"{total} qubits exceeds the {MAX_QUBITS}-qubit limit")
    blocks = []
    offset = 0
    for bc, m, h in axes:
        blocks.append(heat_generator(bc, int(m), alpha, h).L.embedded(offset, total))
        offset += int(m)
    L = PauliSum(total, [t for block in blocks for t in block.terms])
    bcs = {bc for bc, _, _ in axes}
    label = f"heat-{bcs.pop()}" if len(bcs) == 1 else "heat-mixed"
    grid = {"alpha": alpha, "axes": [{"bc": bc, "m": int(m), "h": h} for bc, m, h in axes]}
    return GeneratorSpec(L=L, H=PauliSum(total), label=label, grid=grid, blocks=blocks)


def damped_oscillator_generator(zeta: float, kappa: float) -> GeneratorSpec:
    """L = (zeta/2) I, H = -kappa Y on one qubit."""
    if kappa <= 0:
        raise ValidationError(f"kappa must be positive, got {kappa}")
    if zeta < 0:
        raise ValidationError(f"zeta must be non-negative, got {zeta}")
    L = PauliSum(1, [PauliTerm(zeta / 2, "I")]).simplified()
    H = PauliSum(1, [PauliTerm(-kappa, "Y")])
    return GeneratorSpec(L=L, H=H, label="damped-osc", grid=None)


def cartesian_decomposition(A: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """L = (A + A^dagger)/2, H = (A - A^dagger)/(2i)."""
    A = np.asarray(A, dtype=complex)
    return (A + A.conj().T) / 2, (A - A.conj().T) / 2j


def pauli_decompose(M: np.ndarray, tol: float = SIMPLIFY_TOL) -> PauliSum:
    """Pauli expansion of a Hermitian 2^n x 2^n matrix."""
    M = np.asarray(M, dtype=complex)
    n = int(round(np.log2(M.shape[0])))
    if M.shape != (2**n, 2**n):
        raise ValidationError(f"matrix shape {M.shape} is not a power of two")
    if not np.allclose(M, M.conj().T, atol=1e-12):
        raise ValidationError("pauli_decompose expects a Hermitian matrix")
    terms = []
    for chars in itertools.product("IXYZ", repeat=n):
        string = "".join(chars)
        coef = np.real(np.trace(pauli_matrix(string) @ M)) / 2**n
        if abs(coef) > tol:
            terms.append(PauliTerm(float(coef), string))
    return PauliSum(n, terms)


def generator_from_matrix(A: np.ndarray, label: str = "custom") -> GeneratorSpec:
    L, H = cartesian_decomposition(A)
    eigs = np.linalg.eigvalsh(L)
    if eigs.min() < -1e-12:
        logger.warning(f"{label}: dissipative part is not positive semidefinite (min eigenvalue {eigs.min():.3g})")
    return GeneratorSpec(L=pauli_decompose(L), H=pauli_decompose(H), label=label)


def load_generator(path: str) -> GeneratorSpec:
    """
    Read a custom generator file (JSON). Either Pauli lists
        {"L": [[coef, "XI"], ...], "H": [...], "n_qubits": 2}
    or a dense matrix given as rows of [re, im] pairs
        {"A": [[[re, im], ...], ...]}
    """
    with open(path) as f:
        d = json.load(f)
    label = d.get("label", "custom")
    if "A" in d:
        A = np.array([[complex(re, im) for re, im in row] for row in d["A"]])
        return generator_from_matrix(A, label)
    if "L" not in d and "H" not in d:
        raise ValidationError(f"{path}: generator file needs 'A' or Pauli lists 'L'/'H'")
    n_qubits = d.get("n_qubits")
    L = PauliSum.from_list(d.get("L", []), n_qubits or _infer_qubits(d))
    H = PauliSum.from_list(d.get("H", []), L.n_qubits)
    return GeneratorSpec(L=L, H=H, label=label, grid=d.get("grid"))


def _infer_qubits(d) -> int:
    for key in ("L", "H"):
        if d.get(key):
            return len(d[key][0][1])
    raise ValidationError("cannot infer the register size of an empty generator")


# product-formula estimators


def _nested_commutator_norm(word: Sequence[str]) -> float:
    """||[w_p, [..., [w_1, w_0]]]|| for Pauli strings: 0 or 2^p."""
    current = word[0]
    for nxt in word[1:]:
        if not anticommute(nxt, current):
            return 0.0
        _, current = pauli_product(nxt, current)
    return 2.0 ** (len(word) - 1)


def commutator_sums(spec: GeneratorSpec, p: int = 1) -> Dict[str, object]:
    """
    Gamma sums over ordered words of p+1 summands. L-summands carry the factor x (counted in
    ``a``), H-summands do not; |coefficient| products weight each nested commutator.

    Returns
        {"mixed": {a: Gamma_{p,a}}, "L": Gamma^(L), "H": Gamma^(H)}
    """
    if p not in (1, 2):
        raise ValidationError(f"only p in (1, 2) is supported, got {p}")
    summands = [(abs(t.coefficient), t.string, True) for t in spec.L] + [(abs(t.coefficient), t.string, False) for t in spec.H]
    if len(summands) ** (p + 1) > MAX_WORDS:
        raise ValidationError(f"{len(summands)} summands give too many commutator words for p={p}")
    mixed = {a: 0.0 for a in range(1, p + 1)}
    pure_l = 0.0
    pure_h = 0.0
    for word in itertools.product(summands, repeat=p + 1):
        norm = _nested_commutator_norm([s for _, s, _ in word])
        if norm == 0:
            continue
        weight = norm * np.prod([c for c, _, _ in word])
        a = sum(1 for _, _, is_l in word if is_l)
        if a == p + 1:
            pure_l += weight
        elif a == 0:
            pure_h += weight
        else:
            mixed[a] += weight
    return {"mixed": mixed, "L": pure_l, "H": pure_h}


def trotter_step_estimate(spec: GeneratorSpec, p: int, t: float, eps: float, x_norm_N: float) -> int:
    """
    n_t = ceil(t^{1+1/p} ((sum_a ||x||^a Gamma_{p,a} + ||x||^{p+1} Gamma^(L) + Gamma^(H)) / eps)^{1/p}),
    or 1 when every commutator vanishes.
    """
    if eps <= 0 or t < 0:
        raise ValidationError(f"need eps > 0 and t >= 0, got eps={eps}, t={t}")
    sums = commutator_sums(spec, p)
    numerator = sum(x_norm_N**a * g for a, g in sums["mixed"].items())
    numerator += x_norm_N ** (p + 1) * sums["L"] + sums["H"]
    if numerator == 0 or t == 0:
        return 1
    return max(1, int(np.ceil(t ** (1 + 1 / p) * (numerator / eps) ** (1 / p))))


def heat_error_estimate(spec: GeneratorSpec, t: float, n_t: int, x_norm_N: float) -> float:
    """
    Order estimate (t^2/n_t)(alpha^2/h^4) ||x||_N^2 (log2 M)^2 with unit constant, summed over axes
    for Kronecker sums.
    """
    if not spec.grid or "axes" not in spec.grid:
        raise ValidationError(f"{spec.label} is not a heat generator")
    if n_t < 1:
        raise ValidationError(f"n_t must be >= 1, got {n_t}")
    alpha = spec.grid["alpha"]
    return float(
        sum((t**2 / n_t) * (alpha**2 / ax["h"] ** 4) * x_norm_N**2 * ax["m"] ** 2 for ax in spec.grid["axes"])
    )


def exponentials_per_step(p: int) -> int:
    """m_1 = 1, m_{2k} = 3 * 5^{k-1}."""
    if p == 1:
        return 1
    if p % 2 or p < 1:
        raise ValidationError(f"no exponential count for order p={p}")
    return 3 * 5 ** (p // 2 - 1)


def theorem_gate_scaling(spec: GeneratorSpec, n_t: int, p: int = 1) -> Dict[str, int]:
    """N_CNOT = 2 n_t m_p sum max(w-1, 0) over all summands, N_hyb = n_t m_p N_L."""
    m_p = exponentials_per_step(p)
    ladder = sum(max(t.weight - 1, 0) for t in list(spec.L) + list(spec.H))
    return {"cnot": 2 * n_t * m_p * ladder, "hybrid": n_t * m_p * len(spec.L)}
