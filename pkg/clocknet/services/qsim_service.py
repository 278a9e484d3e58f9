import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from clocknet.core.errors import MeasurementError, ProtocolError
from clocknet.models.register import Register, SectorUnitary
from clocknet.schemas.qsim import MeasurementRecord

logger = logging.getLogger(__name__)

ORTHO_TOLERANCE = 1e-10
NULL_OUTCOME = "null"

Control = Tuple[int, Sequence[str]]


def _apply_site_matrix(amplitudes: np.ndarray, site: int, matrix: np.ndarray) -> np.ndarray:
    moved = np.tensordot(matrix, amplitudes, axes=([1], [site]))
    return np.moveaxis(moved, 0, site)


def _clamp(p: float) -> float:
    return min(max(float(p), 0.0), 1.0)


def _sample(probabilities: np.ndarray, rng: np.random.Generator) -> Tuple[int, float]:
    draw = float(rng.random())
    edges = np.cumsum(probabilities)
    index = int(np.searchsorted(edges, draw * edges[-1], side="right"))
    # skip zero-weight outcomes that a draw on a bin edge could select
    while probabilities[min(index, len(probabilities) - 1)] <= 0.0 and index > 0:
        index -= 1
    return min(index, len(probabilities) - 1), draw


class QSimService:
    """Gates and measurements on :class:`Register` values; inputs are never mutated."""

    @staticmethod
    def apply_sector_unitary(reg: Register, site: int, u: SectorUnitary) -> Register:
        spec = reg.check_site(site)
        return reg.with_amplitudes(_apply_site_matrix(reg.amplitudes, site, u.embed(spec)))

    @staticmethod
    def apply_controlled(
        reg: Register,
        control: Control,
        target: int,
        u: SectorUnitary,
        extra_controls: Sequence[Control] = (),
    ) -> Register:
        """Apply ``u`` to ``target`` where every control site occupies its level set."""
        controls = [control, *extra_controls]
        target_spec = reg.check_site(target)
        control_sites = [c[0] for c in controls]
        if target in control_sites:
            raise ProtocolError(f"control and target overlap on site {target}")
        if len(set(control_sites)) != len(control_sites):
            raise ProtocolError(f"control sites repeat: {control_sites}")

        mask = np.ones(reg.amplitudes.shape, dtype=bool)
        for site, levels in controls:
            spec = reg.check_site(site)
            if not levels:
                raise ProtocolError(f"empty control level set on site {site}")
            selected = np.zeros(spec.dim, dtype=bool)
            for level in levels:
                selected[spec.index(level)] = True
            shape = [1] * reg.n_sites
            shape[site] = spec.dim
            mask = mask & selected.reshape(shape)

        applied = _apply_site_matrix(reg.amplitudes, target, u.embed(target_spec))
        return reg.with_amplitudes(np.where(mask, applied, reg.amplitudes))

    @staticmethod
    def apply_site_unitary(reg: Register, site: int, matrix: np.ndarray) -> Register:
        """Full single-site unitary (e.g. the qutrit Fourier transform)."""
        spec = reg.check_site(site)
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (spec.dim, spec.dim):
            raise ProtocolError(f"site {site} needs a {spec.dim}x{spec.dim} matrix, got {m.shape}")
        if not np.allclose(m.conj().T @ m, np.eye(spec.dim), atol=1e-12):
            raise ProtocolError(f"matrix for site {site} is not unitary")
        return reg.with_amplitudes(_apply_site_matrix(reg.amplitudes, site, m))

    @staticmethod
    def apply_site_operator(reg: Register, site: int, matrix: np.ndarray) -> Register:
        """Apply a (possibly non-unitary) single-site operator without renormalising."""
        reg.check_site(site)
        return reg.with_amplitudes(_apply_site_matrix(reg.amplitudes, site, np.asarray(matrix, dtype=complex)))

    @staticmethod
    def apply_phase(reg: Register, site: int, level: str, phase: float) -> Register:
        """Multiply amplitudes with ``site`` in ``level`` by exp(-i*phase)."""
        out = reg.amplitudes.copy()
        out[reg.level_slice(site, level)] *= np.exp(-1j * phase)
        return reg.with_amplitudes(out)

    @staticmethod
    def apply_transition(reg: Register, site: int, from_level: str, to_level: str) -> Tuple[Register, float]:
        """Quantum jump |to><from| on one site, renormalised; returns the jump weight."""
        src, dst = reg.level_slice(site, from_level), reg.level_slice(site, to_level)
        out = np.zeros_like(reg.amplitudes)
        out[dst] = reg.amplitudes[src]
        weight = float(np.sum(np.abs(out) ** 2))
        if weight <= 0.0:
            raise ProtocolError(f"site {site} has no population in level {from_level!r} to transfer")
        return reg.with_amplitudes(out / np.sqrt(weight)), weight

    @staticmethod
    def reset(reg: Register, site: int) -> Register:
        """Return a site sitting in a definite level to |g> by a level swap."""
        level = reg.definite_level(site, tolerance=1e-9)
        if level is None:
            raise ProtocolError(f"site {site} is not in a definite level and cannot be reset")
        if level == "g":
            return reg
        return QSimService.apply_sector_unitary(reg, site, SectorUnitary.x(("g", level)))

    @staticmethod
    def measure(
        reg: Register,
        site: int,
        rng: Optional[np.random.Generator] = None,
        basis: Optional[Sequence[np.ndarray]] = None,
        labels: Optional[Sequence[str]] = None,
        force: Optional[str] = None,
    ) -> Tuple[MeasurementRecord, Register]:
        """Projective measurement of one site in its level basis or a given orthonormal basis."""
        spec = reg.check_site(site)
        if basis is None:
            vectors = np.eye(spec.dim, dtype=complex)
            names = list(spec.labels)
        else:
            vectors = np.asarray(basis, dtype=complex)
            if vectors.shape != (spec.dim, spec.dim):
                raise MeasurementError(f"basis for site {site} must hold {spec.dim} vectors of length {spec.dim}")
            if not np.allclose(vectors.conj() @ vectors.T, np.eye(spec.dim), atol=ORTHO_TOLERANCE):
                raise MeasurementError(f"basis for site {site} is not orthonormal")
            names = list(labels) if labels is not None else [str(k) for k in range(spec.dim)]

        # contracted[k] = <v_k| on the site, remaining sites untouched
        contracted = np.tensordot(vectors.conj(), reg.amplitudes, axes=([1], [site]))
        probabilities = np.array([np.sum(np.abs(contracted[k]) ** 2) for k in range(spec.dim)])

        index, draw = QSimService._choose(probabilities, names, rng, force)
        p = probabilities[index]
        collapsed = np.multiply.outer(vectors[index], contracted[index]) / np.sqrt(p)
        record = MeasurementRecord(
            target=str(site),
            outcome=names[index],
            outcome_index=index,
            probability=_clamp(p),
            draw=draw,
            forced=force is not None,
        )
        return record, reg.with_amplitudes(np.moveaxis(collapsed, 0, site))

    @staticmethod
    def measure_projectors(
        reg: Register,
        sites: Sequence[int],
        projectors: Sequence[np.ndarray],
        rng: Optional[np.random.Generator] = None,
        labels: Optional[Sequence[str]] = None,
        force: Optional[str] = None,
        name: str = "projectors",
    ) -> Tuple[MeasurementRecord, Register]:
        """Measure orthogonal projectors on ``sites`` plus their complement (``null``)."""
        sub_dim = int(np.prod([reg.check_site(s).dim for s in sites]))
        mats = [np.asarray(p, dtype=complex) for p in projectors]
        QSimService.validate_projectors(mats, sub_dim)

        complement = np.eye(sub_dim, dtype=complex) - sum(mats)
        all_mats = mats + [complement]
        names = (list(labels) if labels is not None else [str(k) for k in range(len(mats))]) + [NULL_OUTCOME]

        moved = np.moveaxis(reg.amplitudes, list(sites), list(range(len(sites))))
        flat = moved.reshape(sub_dim, -1)
        projected = [p @ flat for p in all_mats]
        probabilities = np.array([np.sum(np.abs(x) ** 2) for x in projected])
        probabilities[-1] = max(probabilities[-1], 0.0)

        index, draw = QSimService._choose(probabilities, names, rng, force)
        p = probabilities[index]
        collapsed = (projected[index] / np.sqrt(p)).reshape(moved.shape)
        record = MeasurementRecord(
            target=name,
            outcome=names[index],
            outcome_index=index,
            probability=_clamp(p),
            draw=draw,
            forced=force is not None,
        )
        restored = np.moveaxis(collapsed, list(range(len(sites))), list(sites))
        return record, reg.with_amplitudes(restored)

    @staticmethod
    def projector_probabilities(reg: Register, sites: Sequence[int], projectors: Sequence[np.ndarray]) -> np.ndarray:
        """Born weights of each projector and of the complement (last entry), without collapse."""
        sub_dim = int(np.prod([reg.check_site(s).dim for s in sites]))
        mats = [np.asarray(p, dtype=complex) for p in projectors]
        moved = np.moveaxis(reg.amplitudes, list(sites), list(range(len(sites))))
        flat = moved.reshape(sub_dim, -1)
        probs = [float(np.sum(np.abs(p @ flat) ** 2)) for p in mats]
        return np.array(probs + [max(1.0 - sum(probs), 0.0)])

    @staticmethod
    def validate_projectors(projectors: List[np.ndarray], dim: int) -> None:
        for k, p in enumerate(projectors):
            if p.shape != (dim, dim):
                raise MeasurementError(f"projector {k} has shape {p.shape}, expected {(dim, dim)}")
            if not np.allclose(p, p.conj().T, atol=ORTHO_TOLERANCE):
                raise MeasurementError(f"projector {k} is not Hermitian")
            if not np.allclose(p @ p, p, atol=ORTHO_TOLERANCE):
                raise MeasurementError(f"projector {k} is not idempotent")
        for i in range(len(projectors)):
            for j in range(i + 1, len(projectors)):
                if not np.allclose(projectors[i] @ projectors[j], 0.0, atol=ORTHO_TOLERANCE):
                    raise MeasurementError(f"projectors {i} and {j} are not orthogonal")

    @staticmethod
    def rank_one(vector: np.ndarray) -> np.ndarray:
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return np.outer(v, v.conj())

    @staticmethod
    def _choose(
        probabilities: np.ndarray,
        names: List[str],
        rng: Optional[np.random.Generator],
        force: Optional[str],
    ) -> Tuple[int, Optional[float]]:
        if force is not None:
            if force not in names:
                raise MeasurementError(f"forced outcome {force!r} not among {names}")
            index = names.index(force)
            if probabilities[index] <= 0.0:
                raise MeasurementError(f"forced outcome {force!r} has zero probability")
            return index, None
        if rng is None:
            raise MeasurementError("a random generator is required unless the outcome is forced")
        return _sample(probabilities, rng)
