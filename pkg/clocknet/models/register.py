"""
Pure-state register over mixed-dimension sites.

Amplitudes are stored as a dense tensor with one axis per site, in site order
(site 0 is the most significant index of the flattened vector, C order).
Level ``k`` of a site is its k-th label: qubits are (g, a), qutrits (g, a, b).
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from clocknet.core.errors import ProtocolError

QUBIT_LABELS: Tuple[str, ...] = ("g", "a")
QUTRIT_LABELS: Tuple[str, ...] = ("g", "a", "b")

NORM_TOLERANCE = 1e-12
UNITARY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SiteSpec:
    labels: Tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ProtocolError(f"site labels must be unique, got {self.labels}")
        if len(self.labels) not in (2, 3):
            raise ProtocolError(f"sites are qubits or qutrits, got {len(self.labels)} levels")

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ProtocolError(f"level {label!r} not present on site {self.name or self.labels}")

    @classmethod
    def qubit(cls, name: str = "") -> "SiteSpec":
        return cls(QUBIT_LABELS, name)

    @classmethod
    def qutrit(cls, name: str = "") -> "SiteSpec":
        return cls(QUTRIT_LABELS, name)


@dataclass(frozen=True)
class SectorUnitary:
    """2x2 unitary on an ordered level pair, identity on the remaining level."""

    sector: Tuple[str, str]
    matrix: np.ndarray = field(compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ProtocolError(f"sector unitary must be 2x2, got {m.shape}")
        if self.sector[0] == self.sector[1]:
            raise ProtocolError(f"sector needs two distinct levels, got {self.sector}")
        if not np.allclose(m.conj().T @ m, np.eye(2), atol=UNITARY_TOLERANCE, rtol=0.0):
            raise ProtocolError(f"matrix on sector {self.sector} is not unitary")
        object.__setattr__(self, "matrix", m)

    def embed(self, site: SiteSpec) -> np.ndarray:
        """Full site-dimension matrix; raises if the site lacks a sector level."""
        i, j = site.index(self.sector[0]), site.index(self.sector[1])
        full = np.eye(site.dim, dtype=complex)
        full[np.ix_([i, j], [i, j])] = self.matrix
        return full

    def dagger(self) -> "SectorUnitary":
        return SectorUnitary(self.sector, self.matrix.conj().T)

    # Standard gates. The first sector level plays |0>, the second |1>.

    @classmethod
    def x(cls, sector: Tuple[str, str]) -> "SectorUnitary":
        return cls(sector, np.array([[0, 1], [1, 0]]))

    @classmethod
    def z(cls, sector: Tuple[str, str]) -> "SectorUnitary":
        return cls(sector, np.array([[1, 0], [0, -1]]))

    @classmethod
    def h(cls, sector: Tuple[str, str]) -> "SectorUnitary":
        return cls(sector, np.array([[1, 1], [1, -1]]) / np.sqrt(2.0))

    @classmethod
    def ry(cls, sector: Tuple[str, str], angle: float) -> "SectorUnitary":
        c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
        return cls(sector, np.array([[c, -s], [s, c]]))


class Register:
    """Pure state of an ordered list of sites."""

    def __init__(self, sites: Sequence[SiteSpec], amplitudes: np.ndarray):
        self.sites: List[SiteSpec] = list(sites)
        shape = tuple(s.dim for s in self.sites)
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.size != int(np.prod(shape)):
            raise ProtocolError(f"{amps.size} amplitudes do not fit site dimensions {shape}")
        self.amplitudes = amps.reshape(shape)

    @classmethod
    def ground(cls, sites: Sequence[SiteSpec]) -> "Register":
        """All sites in |g>."""
        return cls.basis_state(sites, ["g"] * len(sites))

    @classmethod
    def basis_state(cls, sites: Sequence[SiteSpec], labels: Sequence[str]) -> "Register":
        shape = tuple(s.dim for s in sites)
        amps = np.zeros(shape, dtype=complex)
        amps[tuple(s.index(label) for s, label in zip(sites, labels))] = 1.0
        return cls(sites, amps)

    @classmethod
    def from_terms(cls, sites: Sequence[SiteSpec], terms: Dict[Tuple[str, ...], complex]) -> "Register":
        """Register from {label tuple: amplitude}, normalised."""
        shape = tuple(s.dim for s in sites)
        amps = np.zeros(shape, dtype=complex)
        for labels, value in terms.items():
            amps[tuple(s.index(label) for s, label in zip(sites, labels))] += value
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ProtocolError("cannot build a register from zero amplitudes")
        return cls(sites, amps / norm)

    def copy(self) -> "Register":
        return Register(self.sites, self.amplitudes.copy())

    def with_amplitudes(self, amplitudes: np.ndarray) -> "Register":
        return Register(self.sites, amplitudes)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_norm(self, tolerance: float = NORM_TOLERANCE) -> None:
        if abs(self.norm() - 1.0) > tolerance:
            raise ProtocolError(f"register norm drifted to {self.norm():.15f}")

    def check_site(self, site: int) -> SiteSpec:
        if site < 0 or site >= self.n_sites:
            raise ProtocolError(f"site {site} out of range for {self.n_sites} sites")
        return self.sites[site]

    def level_slice(self, site: int, level: str) -> Tuple:
        spec = self.check_site(site)
        index = [slice(None)] * self.n_sites
        index[site] = spec.index(level)
        return tuple(index)

    def populations(self, site: int) -> Dict[str, float]:
        """Marginal level populations of one site."""
        spec = self.check_site(site)
        probs = np.abs(self.amplitudes) ** 2
        axes = tuple(k for k in range(self.n_sites) if k != site)
        marginal = probs.sum(axis=axes) if axes else probs
        return {label: float(marginal[i]) for i, label in enumerate(spec.labels)}

    def population(self, site: int, level: str) -> float:
        return self.populations(site)[level]

    def reduced_density(self, site: int) -> np.ndarray:
        spec = self.check_site(site)
        m = np.moveaxis(self.amplitudes, site, 0).reshape(spec.dim, -1)
        return m @ m.conj().T

    def definite_level(self, site: int, tolerance: float = NORM_TOLERANCE) -> Optional[str]:
        """Label of the level the site occupies with certainty, else None."""
        for label, p in self.populations(site).items():
            if abs(p - 1.0) <= tolerance:
                return label
        return None

    def overlap(self, other: "Register") -> complex:
        return complex(np.vdot(other.vector, self.vector))

    def fidelity(self, other: "Register") -> float:
        return abs(self.overlap(other)) ** 2

    def excitations(
        self, labels: Iterable[str] = ("a", "b"), sites: Optional[Sequence[int]] = None
    ) -> np.ndarray:
        """Number of sites (all, or only ``sites``) in one of ``labels`` for every basis index."""
        counts = np.zeros(self.amplitudes.shape, dtype=int)
        wanted = set(labels)
        for site, spec in enumerate(self.sites):
            if sites is not None and site not in sites:
                continue
            mask = np.array([label in wanted for label in spec.labels], dtype=int)
            shape = [1] * self.n_sites
            shape[site] = spec.dim
            counts = counts + mask.reshape(shape)
        return counts

    def __repr__(self) -> str:
        terms = []
        for index in zip(*np.nonzero(np.abs(self.amplitudes) > 1e-9)):
            labels = "".join(self.sites[k].labels[i] for k, i in enumerate(index))
            terms.append(f"{self.amplitudes[index]:.4f}|{labels}>")
        return " + ".join(terms) or "0"
