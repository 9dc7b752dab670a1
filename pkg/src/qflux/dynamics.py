"""Joint system-battery models and energy-conserving, time-reversal-invariant dynamics.

The battery is a uniform ladder tensored with a two-level switch; the switch
selects which system Hamiltonian (initial or final frequency) is active, so a
single time-independent joint Hamiltonian realizes the frequency quench.
Energies are tracked as exact rationals: degeneracy is decided by Fraction
equality, never by floating-point comparison.

Basis layout (row-major): full index k = (n * L + w) * 2 + s for system level
n, battery ladder level w, switch sector s (0 = initial, 1 = final). The
battery's own basis index is b = 2 w + s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (DimensionError, DomainError, IncommensurateError,
                     UndefinedRatioError, WindowError)
from .fock import DensityState, HilbertSpace, OperatorMatrix, OscillatorMode, PureState

SECTOR_INITIAL = 0
SECTOR_FINAL = 1

DEFAULT_PROB_FLOOR = 1e-12

UNITARITY_TOL = 1e-12
SYMMETRY_TOL = 1e-12
COMMUTATOR_TOL = 1e-10

RationalLike = Union[int, float, str, Fraction]


def as_fraction(value: RationalLike) -> Fraction:
    """Exact rational conversion. Floats convert via their binary expansion,
    so only values that are honestly rational (1.5, 0.25, ...) stay small."""
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class SwitchedBattery:
    """Uniform energy ladder (spacing delta, levels 0..ladder_dim-1) tensored
    with a degenerate two-level switch. H_B acts on the ladder alone."""

    ladder_dim: int
    spacing: Fraction

    def __post_init__(self):
        object.__setattr__(self, "spacing", as_fraction(self.spacing))
        if self.ladder_dim < 2:
            raise DomainError("battery ladder needs at least 2 levels")
        if self.spacing <= 0:
            raise DomainError("battery spacing must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.ladder_dim

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.dim, "battery", (self.ladder_dim, 2))

    @property
    def ladder_space(self) -> HilbertSpace:
        return HilbertSpace(self.ladder_dim, "battery-ladder")

    def hamiltonian(self) -> OperatorMatrix:
        levels = float(self.spacing) * np.arange(self.ladder_dim, dtype=float)
        return OperatorMatrix(self.space, np.kron(np.diag(levels), np.eye(2)))

    def sector_projector(self, sector: int) -> OperatorMatrix:
        if sector not in (SECTOR_INITIAL, SECTOR_FINAL):
            raise DomainError(f"sector must be 0 or 1, got {sector}")
        sw = np.zeros((2, 2))
        sw[sector, sector] = 1.0
        return OperatorMatrix(self.space, np.kron(np.eye(self.ladder_dim), sw))

    def basis_index(self, level: int, sector: int) -> int:
        if not 0 <= level < self.ladder_dim:
            raise DimensionError(f"battery level {level} outside 0..{self.ladder_dim - 1}")
        if sector not in (SECTOR_INITIAL, SECTOR_FINAL):
            raise DomainError(f"sector must be 0 or 1, got {sector}")
        return 2 * level + sector

    def basis_state(self, level: int, sector: int) -> PureState:
        v = np.zeros(self.dim, dtype=complex)
        v[self.basis_index(level, sector)] = 1.0
        return PureState(self.space, v)

    def level_energy(self, level: int) -> Fraction:
        return self.spacing * level


def battery_spacing_for(omega_i: RationalLike, omega_f: RationalLike) -> Fraction:
    """Half the gcd of the two frequencies: the coarsest ladder spacing that
    makes cross-sector degeneracies dense."""
    a, b = as_fraction(omega_i), as_fraction(omega_f)
    g = Fraction(math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
                 a.denominator * b.denominator)
    return g / 2


@dataclass(frozen=True)
class JointModel:
    """System otimes battery with the switch-selected joint Hamiltonian."""

    omega_i: Fraction
    omega_f: Fraction
    system_cutoff: int
    battery: SwitchedBattery
    exact_energies: tuple[Fraction, ...] = field(repr=False)

    @property
    def dim(self) -> int:
        return self.system_cutoff * self.battery.dim

    @property
    def system_space(self) -> HilbertSpace:
        return HilbertSpace(self.system_cutoff, "system")

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.dim, "system*battery",
                            (self.system_cutoff, self.battery.ladder_dim, 2))

    def index(self, n: int, level: int, sector: int) -> int:
        return (n * self.battery.ladder_dim + level) * 2 + sector

    def decode(self, k: int) -> tuple[int, int, int]:
        n, rem = divmod(k, self.battery.dim)
        level, sector = divmod(rem, 2)
        return n, level, sector

    def system_mode(self, sector: int) -> OscillatorMode:
        omega = self.omega_i if sector == SECTOR_INITIAL else self.omega_f
        return OscillatorMode(omega, self.system_cutoff)

    def system_hamiltonian(self, sector: int) -> OperatorMatrix:
        omega = float(self.omega_i if sector == SECTOR_INITIAL else self.omega_f)
        n = np.arange(self.system_cutoff, dtype=float)
        return OperatorMatrix(self.system_space, np.diag(omega * (n + 0.5)))

    def hamiltonian(self) -> OperatorMatrix:
        return OperatorMatrix(self.space,
                              np.diag([float(e) for e in self.exact_energies]))

    def energy_vector(self) -> np.ndarray:
        return np.array([float(e) for e in self.exact_energies])


def build_joint_model(omega_i: RationalLike, omega_f: RationalLike,
                      system_cutoff: int, battery: SwitchedBattery, *,
                      min_cross_degeneracies: int = 1) -> JointModel:
    """Assemble the joint model and verify the spectrum supports dynamics.

    The diagonal reads omega_s (n + 1/2) + delta * w over (n, w, s). If fewer
    than ``min_cross_degeneracies`` pairs of equal-energy states straddle the
    two sectors, no population can ever cross and IncommensurateError is
    raised (the generic signature of irrational frequency ratios).
    """
    w_i, w_f = as_fraction(omega_i), as_fraction(omega_f)
    if w_i <= 0 or w_f <= 0:
        raise DomainError("frequencies must be positive")
    if system_cutoff < 2:
        raise DomainError("system cutoff must be >= 2")
    ladder = battery.ladder_dim
    energies: list[Fraction] = []
    for n in range(system_cutoff):
        half = Fraction(2 * n + 1, 2)
        e_i = w_i * half
        e_f = w_f * half
        for w in range(ladder):
            shift = battery.spacing * w
            energies.append(e_i + shift)
            energies.append(e_f + shift)
    model = JointModel(w_i, w_f, system_cutoff, battery, tuple(energies))
    counts: dict[Fraction, list[int]] = {}
    for k, e in enumerate(energies):
        counts.setdefault(e, [0, 0])[k % 2] += 1
    crossings = sum(ci * cf for ci, cf in counts.values())
    if crossings < min_cross_degeneracies:
        raise IncommensurateError(
            f"only {crossings} cross-sector degeneracies (need "
            f">= {min_cross_degeneracies}); frequencies "
            f"{w_i}/{w_f} are effectively incommensurate at these cutoffs"
        )
    return model


@dataclass(frozen=True)
class EnergyBlock:
    """Indices of one degenerate eigenspace of the joint Hamiltonian."""

    energy: Fraction
    indices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.indices)


def spectral_blocks(model: JointModel,
                    degeneracy_tol: float = 0.0) -> list[EnergyBlock]:
    """Partition the basis into degenerate blocks, ascending in energy.

    Energies are exact rationals, so ``degeneracy_tol`` never influences the
    grouping; it is accepted for interface completeness and must not exceed
    half the smallest exact gap (checked when nonzero).
    """
    groups: dict[Fraction, list[int]] = {}
    for k, e in enumerate(model.exact_energies):
        groups.setdefault(e, []).append(k)
    blocks = [EnergyBlock(e, tuple(sorted(idx)))
              for e, idx in sorted(groups.items())]
    if degeneracy_tol > 0 and len(blocks) > 1:
        gap = min(float(b2.energy - b1.energy)
                  for b1, b2 in zip(blocks, blocks[1:]))
        if degeneracy_tol > gap / 2:
            raise DomainError(
                f"degeneracy_tol {degeneracy_tol} exceeds half the smallest "
                f"exact spectral gap {gap}"
            )
    return blocks


@dataclass(frozen=True)
class ConservingUnitary:
    """Block-diagonal symmetric unitary commuting with the joint Hamiltonian.

    ``window`` is set by the translation-invariant sampler: the inclusive
    battery-level range over which transition probabilities depend only on
    level differences.
    """

    matrix: np.ndarray
    seed: int
    window: Optional[tuple[int, int]] = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def assert_valid(self, model: JointModel) -> None:
        u = self.matrix
        if u.shape != (model.dim, model.dim):
            raise DimensionError("unitary dimension does not match model")
        eye = np.eye(self.dim)
        if np.abs(u.conj().T @ u - eye).max() > UNITARITY_TOL:
            raise ValueError("matrix is not unitary within 1e-12")
        if np.abs(u - u.T).max() > SYMMETRY_TOL:
            raise ValueError("matrix is not symmetric within 1e-12")
        e = model.energy_vector()
        if np.abs(u * (e[None, :] - e[:, None])).max() > COMMUTATOR_TOL:
            raise ValueError("matrix does not commute with the joint Hamiltonian")


def _symmetric_block_unitary(rng: np.random.Generator, size: int) -> np.ndarray:
    """exp(i K) for K a symmetrized Gaussian real matrix: unitary and symmetric."""
    a = rng.standard_normal((size, size))
    k = (a + a.T) / 2.0
    lam, vec = np.linalg.eigh(k)
    return (vec * np.exp(1j * lam)) @ vec.T


def sample_conserving_unitary(blocks: Sequence[EnergyBlock],
                              seed: int) -> ConservingUnitary:
    """Draw an independent random symmetric unitary on every degenerate block;
    singleton blocks receive a random phase. Deterministic in (blocks, seed)."""
    rng = np.random.default_rng(seed)
    dim = sum(b.size for b in blocks)
    u = np.zeros((dim, dim), dtype=complex)
    for block in blocks:
        if block.size == 1:
            u[block.indices[0], block.indices[0]] = np.exp(2j * np.pi * rng.random())
        else:
            sub = _symmetric_block_unitary(rng, block.size)
            u[np.ix_(block.indices, block.indices)] = sub
    return ConservingUnitary(u, seed)


def _block_signature(model: JointModel, block: EnergyBlock) -> tuple:
    """Battery-translation-invariant fingerprint: member list as
    (system level, sector, ladder level offset from the block minimum)."""
    decoded = [model.decode(k) for k in block.indices]
    w_min = min(w for _, w, _ in decoded)
    return tuple((n, s, w - w_min) for n, w, s in decoded)


def translation_reach(model: JointModel) -> int:
    """Largest battery-level change any single interaction can produce:
    ceil(system spectral spread / ladder spacing), computed exactly."""
    tops = []
    bottoms = []
    for omega in (model.omega_i, model.omega_f):
        bottoms.append(omega * Fraction(1, 2))
        tops.append(omega * Fraction(2 * model.system_cutoff - 1, 2))
    spread = max(tops) - min(bottoms)
    return int(math.ceil(spread / model.battery.spacing))


def sample_translation_invariant_unitary(model: JointModel,
                                         blocks: Sequence[EnergyBlock],
                                         window: tuple[int, int],
                                         seed: int) -> ConservingUnitary:
    """Like sample_conserving_unitary, but blocks that are battery translates
    of one another share a generator, so interior dynamics depend only on
    battery level differences.

    ``window`` is the inclusive battery-level range the caller needs the
    shift identity on; it must stay ``translation_reach(model)`` levels away
    from both ladder edges (WindowError otherwise).
    """
    lo, hi = window
    reach = translation_reach(model)
    top = model.battery.ladder_dim - 1
    if lo > hi:
        raise WindowError(f"empty window {window}")
    if lo < reach or hi > top - reach:
        raise WindowError(
            f"window {window} must lie within the interior "
            f"[{reach}, {top - reach}] (reach {reach} on a {top + 1}-level ladder)"
        )
    rng = np.random.default_rng(seed)
    dim = sum(b.size for b in blocks)
    u = np.zeros((dim, dim), dtype=complex)
    phases: dict[tuple, complex] = {}
    generators: dict[tuple, np.ndarray] = {}
    for block in blocks:
        sig = _block_signature(model, block)
        if block.size == 1:
            if sig not in phases:
                phases[sig] = np.exp(2j * np.pi * rng.random())
            u[block.indices[0], block.indices[0]] = phases[sig]
        else:
            if sig not in generators:
                generators[sig] = _symmetric_block_unitary(rng, block.size)
            u[np.ix_(block.indices, block.indices)] = generators[sig]
    return ConservingUnitary(u, seed, window=(lo, hi))


# ---------------------------------------------------------------------------
# measured quantities
# ---------------------------------------------------------------------------

def q_quantity(x, rho, u: ConservingUnitary) -> float:
    """Tr[X U rho U^dag], clamped to zero when within -1e-14 of it."""
    xm = x.matrix if hasattr(x, "matrix") else np.asarray(x, dtype=complex)
    rm = rho.matrix if hasattr(rho, "matrix") else np.asarray(rho, dtype=complex)
    um = u.matrix
    if xm.shape != um.shape or rm.shape != um.shape:
        raise DimensionError(
            f"shape mismatch: X {xm.shape}, rho {rm.shape}, U {um.shape}"
        )
    val = np.einsum('ab,ba->', xm @ um, rm @ um.conj().T).real
    if -1e-14 <= val < 0.0:
        return 0.0
    return float(val)


def _system_density(system_state) -> np.ndarray:
    if isinstance(system_state, PureState):
        return system_state.density().matrix
    if isinstance(system_state, DensityState):
        return system_state.matrix
    return np.asarray(system_state, dtype=complex)


def _u_submatrix(u: ConservingUnitary, model: JointModel,
                 b_out: int, b_in: int) -> np.ndarray:
    """U restricted to battery-out rows and battery-in columns (system x system)."""
    ladder2 = model.battery.dim
    rows = np.arange(model.system_cutoff) * ladder2 + b_out
    cols = np.arange(model.system_cutoff) * ladder2 + b_in
    return u.matrix[np.ix_(rows, cols)]


def transition_probability(e_f_index: int, system_state, e_i_index: int,
                           u: ConservingUnitary, model: JointModel) -> float:
    """Probability to find the battery in eigenstate ``e_f_index`` after
    preparing (system_state) tensor |e_i_index><e_i_index| and applying U.

    Battery eigenstate indices are the flat (level, sector) indices
    ``2*level + sector``.
    """
    if not 0 <= e_i_index < model.battery.dim or not 0 <= e_f_index < model.battery.dim:
        raise DimensionError("battery eigenstate index out of range")
    rho = _system_density(system_state)
    if rho.shape[0] != model.system_cutoff:
        raise DimensionError("system state does not match the model cutoff")
    sub = _u_submatrix(u, model, e_f_index, e_i_index)
    val = np.einsum('an,nm,am->', sub.conj(), rho, sub).real
    return max(float(val), 0.0)


def conditional_photon_number(e_f_index: int, system_state, e_i_index: int,
                              u: ConservingUnitary, model: JointModel,
                              which: str = "N",
                              prob_floor: float = DEFAULT_PROB_FLOOR
                              ) -> tuple[float, float]:
    """Factor Q(X_S otimes |E_f><E_f| | rho otimes |E_i><E_i|) into
    (conditional mean, transition probability).

    ``which`` selects the measured system operator: "N" for the photon-added
    protocol, "N+1" for photon-subtracted; the returned mean is the
    conditional expectation of that operator.
    """
    if which not in ("N", "N+1"):
        raise DomainError(f'which must be "N" or "N+1", got {which!r}')
    rho = _system_density(system_state)
    sub = _u_submatrix(u, model, e_f_index, e_i_index)
    prob = float(np.einsum('an,nm,am->', sub.conj(), rho, sub).real)
    if prob <= prob_floor:
        raise UndefinedRatioError(
            f"transition probability {prob:.3e} at or below floor {prob_floor:.1e}"
        )
    weights = np.arange(model.system_cutoff, dtype=float)
    if which == "N+1":
        weights = weights + 1.0
    q_val = float(np.einsum('a,an,nm,am->', weights, sub.conj(), rho, sub).real)
    return q_val / prob, prob


def work_distribution(direction: str, system_state, reference_level: int,
                      u: ConservingUnitary, model: JointModel
                      ) -> dict[Fraction, float]:
    """Distribution of W = E_0 - E_measured over the discrete work lattice.

    The battery starts in the pure ladder level ``reference_level`` (sector
    ``initial`` for direction "F", ``final`` for "R"); the measured battery
    energy aggregates both switch sectors of each ladder level, so the
    returned probabilities sum to one by completeness.
    """
    if direction not in ("F", "R"):
        raise DomainError(f'direction must be "F" or "R", got {direction!r}')
    sector = SECTOR_INITIAL if direction == "F" else SECTOR_FINAL
    ladder = model.battery.ladder_dim
    if not 0 <= reference_level < ladder:
        raise WindowError(f"reference level {reference_level} outside the ladder")
    if u.window is not None:
        lo, hi = u.window
        if not lo <= reference_level <= hi:
            raise WindowError(
                f"reference level {reference_level} outside the guaranteed "
                f"window [{lo}, {hi}]"
            )
    rho = _system_density(system_state)
    b_in = model.battery.basis_index(reference_level, sector)
    cols = np.arange(model.system_cutoff) * model.battery.dim + b_in
    amp = u.matrix[:, cols]
    per_row = np.einsum('rn,nm,rm->r', amp.conj(), rho, amp).real
    per_row = per_row.reshape(model.system_cutoff, ladder, 2)
    per_level = per_row.sum(axis=(0, 2))
    spacing = model.battery.spacing
    return {spacing * (reference_level - w): float(per_level[w])
            for w in range(ladder)}
