"""Configuration-driven scenario runner: verification suites, figure-data
regeneration, parameter sweeps, machine-readable reports.

Reports are deterministic functions of (config, seed): no timestamps, cases
sorted by key, floats serialized with full round-trip precision. Every CSV row
can be recomputed from its recorded inputs with library calls alone, and the
figure runners do exactly that as a self-check before reporting success.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import closedform as cf
from . import dynamics as dyn
from . import fock
from . import gibbs
from .errors import BudgetExceededError, ConfigError, UndefinedRatioError

TOOL_VERSION = "0.1.0"

SCENARIO_KINDS = (
    "global-ft", "crooks-added", "crooks-subtracted", "crooks-binomial-align",
    "crooks-binomial-size", "jarzynski", "figure2", "figure3", "figure4",
    "harmonic-limit", "sweep",
)

#: default verification tolerance per scenario kind
DEFAULT_TOLERANCES = {
    "global-ft": 1e-8,
    "crooks-added": 1e-6,
    "crooks-subtracted": 1e-6,
    "crooks-binomial-align": 1e-6,
    "crooks-binomial-size": 1e-6,
    "jarzynski": 1e-6,
    "figure2": 1e-12,
    "figure3": 1e-12,
    "figure4": 1e-12,
    "harmonic-limit": 1e-3,
    "sweep": 1e-12,
}

MAX_DENOMINATOR = 64
ENV_MAX_DIM = "QFLUX_MAX_DIM"


def _max_dim_cap() -> int:
    raw = os.environ.get(ENV_MAX_DIM)
    if raw is None:
        return 4096
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_MAX_DIM} must be an integer, got {raw!r}") from exc
    if cap < 2:
        raise ConfigError(f"{ENV_MAX_DIM} must be >= 2, got {cap}")
    return cap


def _parse_rational(value) -> Fraction:
    try:
        frac = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"not a rational: {value!r}") from exc
    if frac <= 0:
        raise ConfigError(f"frequencies must be positive, got {frac}")
    if frac.denominator > MAX_DENOMINATOR:
        raise ConfigError(
            f"rational {frac} has denominator {frac.denominator} > {MAX_DENOMINATOR}"
        )
    return frac


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully specified experiment."""

    kind: str
    seed: int = 2024
    omega_i: Fraction = Fraction(1)
    omega_f: Fraction = Fraction(3, 2)
    chi_grid: tuple[float, ...] = ()
    p_grid: tuple[float, ...] = ()
    n_grid: tuple[int, ...] = ()
    w_values: tuple[float, ...] = ()
    cases: int = 200
    system_cutoff: int = 8
    ladder_dim: int = 24
    tail_tol: float = 1e-10
    tolerance: Optional[float] = None
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; "
                              f"expected one of {SCENARIO_KINDS}")
        object.__setattr__(self, "omega_i", _parse_rational(self.omega_i))
        object.__setattr__(self, "omega_f", _parse_rational(self.omega_f))
        for name in ("chi_grid", "p_grid", "w_values"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        object.__setattr__(self, "n_grid", tuple(int(v) for v in self.n_grid))
        if self.cases < 1:
            raise ConfigError("cases must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        cap = _max_dim_cap()
        if self.system_cutoff > cap or self.ladder_dim > cap:
            raise ConfigError(
                f"cutoffs ({self.system_cutoff}, {self.ladder_dim}) exceed "
                f"{ENV_MAX_DIM}={cap}"
            )
        if self.system_cutoff < 2 or self.ladder_dim < 2:
            raise ConfigError("cutoffs must be >= 2")
        if not 0 < self.tail_tol < 1:
            raise ConfigError("tail_tol must lie in (0, 1)")
        if any(c <= 0 for c in self.chi_grid):
            raise ConfigError("chi grid entries must be positive")
        if any(not 0 <= p <= 1 for p in self.p_grid):
            raise ConfigError("p grid entries must lie in [0, 1]")

    @classmethod
    def from_mapping(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        if "kind" not in data:
            raise ConfigError("config is missing required field 'kind'")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_mapping(data)

    def effective_tolerance(self) -> float:
        return self.tolerance if self.tolerance is not None else DEFAULT_TOLERANCES[self.kind]

    def provenance(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "omega_i": str(self.omega_i),
            "omega_f": str(self.omega_f),
            "system_cutoff": self.system_cutoff,
            "ladder_dim": self.ladder_dim,
            "tail_tol": self.tail_tol,
            "tolerance": self.effective_tolerance(),
            "tool_version": TOOL_VERSION,
        }


@dataclass
class CaseRecord:
    key: str
    inputs: dict
    simulated: float
    closed_form: float
    abs_dev: float
    rel_dev: float
    passed: bool


@dataclass
class VerificationReport:
    kind: str
    tolerance: float
    cases: list[CaseRecord]
    provenance: dict
    summary: dict = field(default_factory=dict)

    def finalize(self) -> "VerificationReport":
        self.cases.sort(key=lambda c: c.key)
        devs = [c.abs_dev for c in self.cases]
        rels = [c.rel_dev for c in self.cases]
        self.summary = {
            "cases": len(self.cases),
            "passed": sum(c.passed for c in self.cases),
            "failed": sum(not c.passed for c in self.cases),
            "max_abs_dev": max(devs) if devs else 0.0,
            "max_rel_dev": max(rels) if rels else 0.0,
            "all_passed": all(c.passed for c in self.cases),
        }
        return self

    @property
    def all_passed(self) -> bool:
        return bool(self.summary.get("all_passed", False))

    def failing_cases(self) -> list[CaseRecord]:
        return [c for c in self.cases if not c.passed]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "tolerance": self.tolerance,
            "provenance": self.provenance,
            "summary": self.summary,
            "cases": [asdict(c) for c in self.cases],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n")
        return path


def _record(report: VerificationReport, key: str, inputs: dict,
            simulated: float, closed_form: float,
            tolerance: Optional[float] = None, relative: bool = True) -> CaseRecord:
    tol = report.tolerance if tolerance is None else tolerance
    abs_dev = abs(simulated - closed_form)
    scale = abs(closed_form)
    rel_dev = abs_dev / scale if scale > 0 else abs_dev
    passed = (rel_dev if relative else abs_dev) <= tol
    case = CaseRecord(key, inputs, float(simulated), float(closed_form),
                      float(abs_dev), float(rel_dev), bool(passed))
    report.cases.append(case)
    return case


# ---------------------------------------------------------------------------
# CSV helpers
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else _fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> tuple[list[str], list[list[Optional[float]]]]:
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [[None if cell == "" else float(cell) for cell in line.split(",")]
            for line in lines[1:]]
    return header, rows


def _write_gnuplot(path, csv_name: str, title: str, columns: Sequence[str]) -> Path:
    path = Path(path)
    using = "\n".join(
        f'    "{csv_name}" using 1:{i + 2} with lines title "{c}", \\'
        for i, c in enumerate(columns)
    ).rstrip(", \\")
    path.write_text(
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set logscale x\n"
        f"set title '{title}'\n"
        f"plot \\\n{using}\n"
    )
    return path


# ---------------------------------------------------------------------------
# scenario runners
# ---------------------------------------------------------------------------

_FT_FREQUENCIES = (Fraction(1), Fraction(1, 2), Fraction(3, 2), Fraction(2),
                   Fraction(5, 2), Fraction(3))


def _random_system_operator(rng: np.random.Generator, dim: int, family: int) -> np.ndarray:
    """One member of the measurement-operator zoo on a dim-level system."""
    if family == 0:
        return np.eye(dim, dtype=complex)
    if family == 1:
        return np.diag(np.arange(dim, dtype=complex))                  # N
    if family == 2:
        return np.diag(np.arange(1, dim + 1, dtype=complex))           # N + 1
    if family == 3:
        proj = np.zeros((dim, dim), dtype=complex)
        k = int(rng.integers(dim))
        proj[k, k] = 1.0
        return proj
    if family == 4:
        return np.diag(rng.uniform(0.05, 1.0, size=dim).astype(complex))
    if family == 5:
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        m = g @ g.conj().T
        return m / np.linalg.eigvalsh(m).max()
    # binomial projector: coherent content in the number basis
    n = int(rng.integers(1, dim))
    p = float(rng.uniform(0.1, 0.9))
    st = fock.binomial_state(n, p, fock.HilbertSpace(dim, "sys"))
    return st.projector().matrix


def _random_ladder_operator(rng: np.random.Generator, ladder: int, family: int,
                            beta: float, spacing: float) -> np.ndarray:
    """Measurement operator on the bare battery ladder."""
    space = fock.HilbertSpace(ladder, "ladder")
    if family == 0:
        proj = np.zeros((ladder, ladder), dtype=complex)
        w = int(rng.integers(ladder))
        proj[w, w] = 1.0
        return proj
    if family == 1:
        n = int(rng.integers(1, min(ladder, 10)))
        p = float(rng.uniform(0.1, 0.9))
        return fock.binomial_state(n, p, space).projector().matrix
    if family == 2:
        alpha = float(rng.uniform(0.3, 1.2))
        st = fock.coherent_state(alpha, space, tail_tol=0.5)
        return st.projector().matrix
    return np.diag(rng.uniform(0.05, 1.0, size=ladder).astype(complex))


def run_global_ft(config: ScenarioConfig) -> VerificationReport:
    """Random-scenario verification of the global forward/reverse equality:
    ln Q_F - ln Q_R = beta (dW_tilde - dF_tilde), with effective potentials
    evaluated on the same truncated spaces as the dynamics."""
    tol = config.effective_tolerance()
    report = VerificationReport("global-ft", tol, [], config.provenance())
    evaluated = 0
    attempt = 0
    while evaluated < config.cases:
        rng = np.random.default_rng([config.seed, attempt])
        attempt += 1
        omega_i = _FT_FREQUENCIES[int(rng.integers(len(_FT_FREQUENCIES)))]
        omega_f = _FT_FREQUENCIES[int(rng.integers(len(_FT_FREQUENCIES)))]
        ds = int(rng.integers(4, config.system_cutoff + 1))
        ladder = int(rng.integers(8, config.ladder_dim + 1))
        beta = float(np.exp(rng.uniform(np.log(0.05), np.log(4.0))))
        battery = dyn.SwitchedBattery(ladder, dyn.battery_spacing_for(omega_i, omega_f))
        model = dyn.build_joint_model(omega_i, omega_f, ds, battery)
        blocks = dyn.spectral_blocks(model)
        u = dyn.sample_conserving_unitary(blocks, int(rng.integers(2 ** 32)))

        h_i = model.system_hamiltonian(dyn.SECTOR_INITIAL).matrix
        h_f = model.system_hamiltonian(dyn.SECTOR_FINAL).matrix
        h_b = battery.hamiltonian().matrix
        x_s_i = _random_system_operator(rng, ds, int(rng.integers(7)))
        x_s_f = _random_system_operator(rng, ds, int(rng.integers(7)))
        lad_i = _random_ladder_operator(rng, ladder, int(rng.integers(4)), beta,
                                        float(battery.spacing))
        lad_f = _random_ladder_operator(rng, ladder, int(rng.integers(4)), beta,
                                        float(battery.spacing))
        x_b_i = np.kron(lad_i, np.diag([1.0, 0.0]).astype(complex))
        x_b_f = np.kron(lad_f, np.diag([0.0, 1.0]).astype(complex))

        rho_s_i = gibbs.gibbs_map(x_s_i, h_i, beta).matrix
        rho_s_f = gibbs.gibbs_map(x_s_f, h_f, beta).matrix
        rho_b_i = gibbs.gibbs_map(x_b_i, h_b, beta).matrix
        rho_b_f = gibbs.gibbs_map(x_b_f, h_b, beta).matrix

        q_f = dyn.q_quantity(np.kron(x_s_f, x_b_f), np.kron(rho_s_i, rho_b_i), u)
        q_r = dyn.q_quantity(np.kron(x_s_i, x_b_i), np.kron(rho_s_f, rho_b_f), u)
        if q_f <= 1e-12 or q_r <= 1e-12:
            continue
        d_f_tilde = gibbs.gen_free_energy_diff(beta, h_i, x_s_i, h_f, x_s_f)
        d_w_tilde = gibbs.gen_work_diff(beta, h_b, x_b_i, x_b_f)
        lhs = math.log(q_f) - math.log(q_r)
        rhs = beta * (d_w_tilde - d_f_tilde)
        _record(report, f"case-{evaluated:04d}",
                {"omega_i": str(omega_i), "omega_f": str(omega_f),
                 "system_cutoff": ds, "ladder_dim": ladder, "beta": beta,
                 "attempt": attempt - 1},
                lhs, rhs, relative=False)
        evaluated += 1
    report.provenance["attempts"] = attempt
    return report.finalize()


def _crooks_pair_scan(config: ScenarioConfig, sign: int) -> VerificationReport:
    """Measured forward/reverse battery transition ratios for photon
    added (+1) / subtracted (-1) system preparations, compared against the
    closed-form prediction prefactor_R * exp(beta (W -+ dE_vac - 2 dF))."""
    kind = "crooks-added" if sign == +1 else "crooks-subtracted"
    tol = config.effective_tolerance()
    report = VerificationReport(kind, tol, [], config.provenance())
    which = "N" if sign == +1 else "N+1"
    ratios = (Fraction(3, 2), Fraction(2), Fraction(5))
    chis = config.chi_grid or (0.1, 0.5, 1.0, 2.0)
    prob_floor = 1e-10
    for ratio in ratios:
        omega_i = Fraction(1)
        omega_f = ratio
        battery = dyn.SwitchedBattery(config.ladder_dim,
                                      dyn.battery_spacing_for(omega_i, omega_f))
        model = dyn.build_joint_model(omega_i, omega_f, config.system_cutoff, battery)
        blocks = dyn.spectral_blocks(model)
        for chi in chis:
            beta = 2.0 * chi / float(omega_i)
            params = cf.ScenarioParams(beta, float(omega_i), float(omega_f))
            u = dyn.sample_conserving_unitary(
                blocks, int(np.random.default_rng([config.seed, sign + 2,
                                                   ratio.numerator,
                                                   int(chi * 1000)]).integers(2 ** 32)))
            mode_i = model.system_mode(dyn.SECTOR_INITIAL)
            mode_f = model.system_mode(dyn.SECTOR_FINAL)
            maker = (fock.photon_added_state if sign == +1
                     else fock.photon_subtracted_state)
            gamma_i = maker(beta, mode_i, tail_tol=1.0)
            gamma_f = maker(beta, mode_f, tail_tol=1.0)
            w0 = config.ladder_dim // 2
            b_i = battery.basis_index(w0, dyn.SECTOR_INITIAL)
            for w_meas in range(config.ladder_dim):
                b_f = battery.basis_index(w_meas, dyn.SECTOR_FINAL)
                p_fwd = dyn.transition_probability(b_f, gamma_i, b_i, u, model)
                p_rev = dyn.transition_probability(b_i, gamma_f, b_f, u, model)
                if p_fwd <= prob_floor or p_rev <= prob_floor:
                    continue
                work = float(battery.spacing * (w0 - w_meas))
                try:
                    predicted = cf.crooks_rhs_pm(work, params, sign)
                except UndefinedRatioError:
                    continue
                _record(report, f"r{ratio}-chi{chi}-W{work:+.3f}",
                        {"omega_ratio": str(ratio), "chi": chi, "W": work,
                         "P_F": p_fwd, "P_R": p_rev, "which": which},
                        p_fwd / p_rev, predicted)
    return report.finalize()


def run_crooks_added(config: ScenarioConfig) -> VerificationReport:
    return _crooks_pair_scan(config, +1)


def run_crooks_subtracted(config: ScenarioConfig) -> VerificationReport:
    return _crooks_pair_scan(config, -1)


def _binomial_battery_projector(battery: dyn.SwitchedBattery, n: int, p: float,
                                sector: int) -> np.ndarray:
    state = fock.binomial_state(n, p, battery.ladder_space)
    sw = np.zeros((2, 2), dtype=complex)
    sw[sector, sector] = 1.0
    return np.kron(state.projector().matrix, sw)


def _run_crooks_binomial(config: ScenarioConfig, regime: str) -> VerificationReport:
    """Battery-coherence Crooks check: thermal system, binomial battery
    projectors, measured ratio against exp(beta (q(chi) W_q - dF))."""
    kind = f"crooks-binomial-{regime}"
    tol = config.effective_tolerance()
    report = VerificationReport(kind, tol, [], config.provenance())
    omega = Fraction(1)
    battery = dyn.SwitchedBattery(config.ladder_dim,
                                  dyn.battery_spacing_for(omega, omega))
    model = dyn.build_joint_model(omega, omega, config.system_cutoff, battery)
    blocks = dyn.spectral_blocks(model)
    spacing = float(battery.spacing)
    h_b = battery.hamiltonian().matrix
    chis = config.chi_grid or (0.1, 0.5, 1.0)
    p_grid = config.p_grid or (0.2, 0.5, 0.8)
    n_grid = config.n_grid or (2, 4, 6)
    for chi_b in chis:
        beta = 2.0 * chi_b / spacing
        gamma = fock.thermal_state(beta, model.system_mode(dyn.SECTOR_INITIAL),
                                   tail_tol=1.0)
        u = dyn.sample_conserving_unitary(
            blocks, int(np.random.default_rng([config.seed,
                                               int(chi_b * 1000)]).integers(2 ** 32)))
        if regime == "align":
            pairs = [(n, p_i, n, p_f) for n in n_grid
                     for p_i in p_grid for p_f in p_grid if p_i != p_f]
        else:
            pairs = [(n_i, p, n_f, p) for n_i in n_grid for n_f in n_grid
                     if n_i != n_f for p in p_grid]
        for n_i, p_i, n_f, p_f in pairs:
            x_b_i = _binomial_battery_projector(battery, n_i, p_i, dyn.SECTOR_INITIAL)
            x_b_f = _binomial_battery_projector(battery, n_f, p_f, dyn.SECTOR_FINAL)
            rho_b_i = gibbs.gibbs_map(x_b_i, h_b, beta).matrix
            rho_b_f = gibbs.gibbs_map(x_b_f, h_b, beta).matrix
            eye_s = np.eye(config.system_cutoff, dtype=complex)
            p_fwd = dyn.q_quantity(np.kron(eye_s, x_b_f),
                                   np.kron(gamma.matrix, rho_b_i), u)
            p_rev = dyn.q_quantity(np.kron(eye_s, x_b_i),
                                   np.kron(gamma.matrix, rho_b_f), u)
            if p_fwd <= 1e-12 or p_rev <= 1e-12:
                continue
            if regime == "align":
                q_factor = cf.q_align(p_i, p_f, chi_b)
                w_q = cf.w_q_align(n_i, p_i, p_f, beta, spacing)
            else:
                q_factor = cf.q_size(p_i, chi_b)
                w_q = cf.w_q_size(n_i, n_f, p_i, beta, spacing)
            predicted = math.exp(beta * q_factor * w_q)   # dF = 0: equal spectra
            _record(report, f"chi{chi_b}-n{n_i}-{n_f}-p{p_i}-{p_f}",
                    {"chi_battery": chi_b, "n_i": n_i, "n_f": n_f,
                     "p_i": p_i, "p_f": p_f, "P_F": p_fwd, "P_R": p_rev},
                    p_fwd / p_rev, predicted)
    return report.finalize()


def run_crooks_binomial_align(config: ScenarioConfig) -> VerificationReport:
    return _run_crooks_binomial(config, "align")


def run_crooks_binomial_size(config: ScenarioConfig) -> VerificationReport:
    return _run_crooks_binomial(config, "size")


def run_jarzynski(config: ScenarioConfig) -> VerificationReport:
    """Work-distribution route: translation-invariant dynamics, battery point
    mass at an interior level, averaged inverse-prefactor exponential against
    exp(-beta (2 dF +- dE_vac)); plus exact normalization of the reverse
    distribution."""
    tol = config.effective_tolerance()
    report = VerificationReport("jarzynski", tol, [], config.provenance())
    omega_i, omega_f = config.omega_i, config.omega_f
    battery = dyn.SwitchedBattery(config.ladder_dim,
                                  dyn.battery_spacing_for(omega_i, omega_f))
    model = dyn.build_joint_model(omega_i, omega_f, config.system_cutoff, battery)
    blocks = dyn.spectral_blocks(model)
    reach = dyn.translation_reach(model)
    top = battery.ladder_dim - 1
    if reach > top - reach:
        raise ConfigError(
            f"ladder_dim {battery.ladder_dim} leaves no interior window "
            f"(translation reach {reach})"
        )
    level = (reach + top - reach) // 2
    window = (level, level)
    chis = config.chi_grid or (0.25, 0.5)
    for chi in chis:
        beta = 2.0 * chi / float(omega_i)
        params = cf.ScenarioParams(beta, float(omega_i), float(omega_f))
        u = dyn.sample_translation_invariant_unitary(
            model, blocks, window,
            int(np.random.default_rng([config.seed, int(chi * 1000)]).integers(2 ** 32)))
        for sign, label in ((+1, "added"), (-1, "subtracted")):
            maker = (fock.photon_added_state if sign == +1
                     else fock.photon_subtracted_state)
            gamma_i = maker(beta, model.system_mode(dyn.SECTOR_INITIAL), tail_tol=1.0)
            gamma_f = maker(beta, model.system_mode(dyn.SECTOR_FINAL), tail_tol=1.0)
            fwd = dyn.work_distribution("F", gamma_i, level, u, model)
            rev = dyn.work_distribution("R", gamma_f, level, u, model)
            total = 0.0
            covered = 0.0
            for work, prob in fwd.items():
                if prob <= 0.0:
                    continue
                try:
                    r = cf.prefactor_R(float(work), params, sign)
                except UndefinedRatioError:
                    continue
                total += prob / r * math.exp(-beta * float(work))
                covered += prob
            _record(report, f"chi{chi}-{label}-average",
                    {"chi": chi, "sign": sign, "covered_probability": covered},
                    total, cf.jarzynski_rhs(params, sign))
            _record(report, f"chi{chi}-{label}-reverse-normalization",
                    {"chi": chi, "sign": sign},
                    sum(rev.values()), 1.0, tolerance=1e-10, relative=False)
    return report.finalize()


# ---------------------------------------------------------------------------
# figure data
# ---------------------------------------------------------------------------

def _default_chi_grid() -> tuple[float, ...]:
    return tuple(float(c) for c in np.logspace(np.log10(0.01), np.log10(4.0), 60))


def run_figure2(config: ScenarioConfig) -> VerificationReport:
    """Generalized free-energy curves (energies in units of k_B T) versus chi
    for the added/subtracted protocols at omega_f = 1.5 omega_i."""
    tol = config.effective_tolerance()
    report = VerificationReport("figure2", tol, [], config.provenance())
    chis = config.chi_grid or _default_chi_grid()
    omega_i = float(config.omega_i)
    omega_f = float(config.omega_f)
    header = ["chi", "dF", "twodF", "dEvac", "dFplus", "dFminus"]
    rows = []
    for chi in chis:
        beta = 2.0 * chi / omega_i
        params = cf.ScenarioParams(beta, omega_i, omega_f)
        rows.append([chi,
                     beta * cf.delta_F(params),
                     2.0 * beta * cf.delta_F(params),
                     beta * cf.delta_E_vac(params),
                     beta * cf.gen_free_energy_pm(params, +1),
                     beta * cf.gen_free_energy_pm(params, -1)])
    out = Path(config.out_dir or ".")
    csv_path = write_csv(out / "figure2.csv", header, rows)
    _write_gnuplot(out / "figure2.gp", "figure2.csv",
                   "generalized free energies vs chi", header[1:])
    _, parsed = read_csv(csv_path)
    for row in parsed:
        chi, df, twodf, devac, dfp, dfm = row
        beta = 2.0 * chi / omega_i
        params = cf.ScenarioParams(beta, omega_i, omega_f)
        _record(report, f"chi={_fmt(chi)}",
                {"chi": chi, "columns": "dFplus"},
                dfp, beta * (2.0 * cf.delta_F(params) + cf.delta_E_vac(params)),
                relative=False)
        _record(report, f"chi={_fmt(chi)}-consistency",
                {"chi": chi, "columns": "twodF+dEvac"},
                twodf + devac, dfp, relative=False)
        _record(report, f"chi={_fmt(chi)}-minus",
                {"chi": chi, "columns": "dFminus"},
                dfm, twodf - devac, relative=False)
    report.provenance["csv"] = csv_path.name
    return report.finalize()


def run_figure3(config: ScenarioConfig) -> VerificationReport:
    """Predicted forward/reverse ratio and prefactor versus chi for
    omega_f = 5 omega_i at the work values requested (defaults 0 and 2)."""
    tol = config.effective_tolerance()
    report = VerificationReport("figure3", tol, [], config.provenance())
    chis = config.chi_grid or _default_chi_grid()
    omega_i = float(config.omega_i)
    omega_f = float(config.omega_f)
    works = config.w_values or (0.0, 2.0 * omega_i)
    header = ["chi", "W", "R_plus", "R_minus", "rhs_plus", "rhs_minus", "classical"]
    rows = []
    for chi in chis:
        beta = 2.0 * chi / omega_i
        params = cf.ScenarioParams(beta, omega_i, omega_f)
        for work in works:
            values = {}
            for sign, tag in ((+1, "plus"), (-1, "minus")):
                try:
                    values[f"R_{tag}"] = cf.prefactor_R(work, params, sign)
                    values[f"rhs_{tag}"] = cf.crooks_rhs_pm(work, params, sign)
                except UndefinedRatioError:
                    values[f"R_{tag}"] = None
                    values[f"rhs_{tag}"] = None
            classical = math.exp(beta * (work - cf.delta_F(params)))
            rows.append([chi, work, values["R_plus"], values["R_minus"],
                         values["rhs_plus"], values["rhs_minus"], classical])
    out = Path(config.out_dir or ".")
    csv_path = write_csv(out / "figure3.csv", header, rows)
    _write_gnuplot(out / "figure3.gp", "figure3.csv",
                   "predicted ratio and prefactor vs chi", header[2:])
    _, parsed = read_csv(csv_path)
    for row in parsed:
        chi, work, r_p, r_m, rhs_p, rhs_m, classical = row
        beta = 2.0 * chi / omega_i
        params = cf.ScenarioParams(beta, omega_i, omega_f)
        if r_p is not None:
            _record(report, f"chi={_fmt(chi)}-W={_fmt(work)}-plus",
                    {"chi": chi, "W": work}, r_p,
                    cf.prefactor_R(work, params, +1), relative=True)
        if rhs_m is not None:
            _record(report, f"chi={_fmt(chi)}-W={_fmt(work)}-minus",
                    {"chi": chi, "W": work}, rhs_m,
                    cf.crooks_rhs_pm(work, params, -1), relative=True)
        _record(report, f"chi={_fmt(chi)}-W={_fmt(work)}-classical",
                {"chi": chi, "W": work}, classical,
                math.exp(beta * (work - cf.delta_F(params))), relative=True)
    report.provenance["csv"] = csv_path.name
    return report.finalize()


def run_figure4(config: ScenarioConfig) -> VerificationReport:
    """Distortion factors versus chi: q_align on the p_f = 0.8 slice and
    q_size, over the configured p grid."""
    tol = config.effective_tolerance()
    report = VerificationReport("figure4", tol, [], config.provenance())
    chis = config.chi_grid or _default_chi_grid()
    p_grid = config.p_grid or (0.2, 0.4, 0.6)
    p_f = 0.8
    header = ["chi", "p", "q_align_pf08", "q_size"]
    rows = []
    for chi in chis:
        for p in p_grid:
            q_a = cf.q_align(p, p_f, chi) if p != p_f else None
            rows.append([chi, p, q_a, cf.q_size(p, chi)])
    out = Path(config.out_dir or ".")
    csv_path = write_csv(out / "figure4.csv", header, rows)
    _write_gnuplot(out / "figure4.gp", "figure4.csv",
                   "quantum distortion factors vs chi", header[2:])
    _, parsed = read_csv(csv_path)
    for row in parsed:
        chi, p, q_a, q_s = row
        if q_a is not None:
            _record(report, f"chi={_fmt(chi)}-p={_fmt(p)}-align",
                    {"chi": chi, "p": p, "p_f": p_f},
                    q_a, cf.q_align(p, p_f, chi), relative=True)
        _record(report, f"chi={_fmt(chi)}-p={_fmt(p)}-size",
                {"chi": chi, "p": p}, q_s, cf.q_size(p, chi), relative=True)
    report.provenance["csv"] = csv_path.name
    return report.finalize()


def run_harmonic_limit(config: ScenarioConfig) -> VerificationReport:
    """Convergence of binomial batteries to the coherent limit: state overlap,
    characteristic-function gap, and the distortion factor against tanh(chi)/chi."""
    tol = config.effective_tolerance()
    report = VerificationReport("harmonic-limit", tol, [], config.provenance())
    lam = 1.0
    sizes = config.n_grid or (8, 32, 128)
    overlaps = []
    supgaps = []
    t_grid = np.linspace(0.0, 6.0, 121)
    for n in sizes:
        space = fock.HilbertSpace(n + 2, "ladder")
        target = fock.coherent_state(math.sqrt(lam), space, tail_tol=0.5)
        binom = fock.binomial_state(n, lam / n, space)
        overlaps.append(1.0 - fock.state_fidelity(target, binom))
        gap = max(abs(cf.char_fn_binomial(n, lam / n, 1.0, t)
                      - cf.char_fn_coherent(lam, 1.0, t)) for t in t_grid)
        supgaps.append(gap)
    for idx in range(1, len(sizes)):
        _record(report, f"overlap-decreasing-{sizes[idx]}",
                {"n": sizes[idx], "defect": overlaps[idx],
                 "previous": overlaps[idx - 1]},
                overlaps[idx], 0.0,
                tolerance=overlaps[idx - 1], relative=False)
        _record(report, f"charfn-decreasing-{sizes[idx]}",
                {"n": sizes[idx], "gap": supgaps[idx], "previous": supgaps[idx - 1]},
                supgaps[idx], 0.0, tolerance=supgaps[idx - 1], relative=False)
    _record(report, "overlap-final",
            {"n": sizes[-1]}, overlaps[-1], 0.0, tolerance=1e-2, relative=False)
    n_large = 10_000
    for chi in (config.chi_grid or (0.5, 1.0, 2.0)):
        q_val = cf.q_align(0.5 / n_large, 1.5 / n_large, chi)
        _record(report, f"distortion-chi{chi}",
                {"chi": chi, "n": n_large},
                q_val, cf.q_harmonic(chi), tolerance=1e-3, relative=False)
    return report.finalize()


def run_sweep(config: ScenarioConfig) -> VerificationReport:
    """Closed-form curve sweep over the chi grid, emitted as plot-ready CSV."""
    tol = config.effective_tolerance()
    report = VerificationReport("sweep", tol, [], config.provenance())
    chis = config.chi_grid or _default_chi_grid()
    omega_i = float(config.omega_i)
    omega_f = float(config.omega_f)
    header = ["chi", "dF", "dFplus", "dFminus", "jarzynski_plus",
              "jarzynski_minus", "q_harmonic"]
    rows = []
    for chi in chis:
        beta = 2.0 * chi / omega_i
        params = cf.ScenarioParams(beta, omega_i, omega_f)
        rows.append([chi, cf.delta_F(params),
                     cf.gen_free_energy_pm(params, +1),
                     cf.gen_free_energy_pm(params, -1),
                     cf.jarzynski_rhs(params, +1),
                     cf.jarzynski_rhs(params, -1),
                     cf.q_harmonic(chi)])
    out = Path(config.out_dir or ".")
    csv_path = write_csv(out / "sweep.csv", header, rows)
    _, parsed = read_csv(csv_path)
    for row in parsed:
        chi = row[0]
        beta = 2.0 * chi / omega_i
        params = cf.ScenarioParams(beta, omega_i, omega_f)
        _record(report, f"chi={_fmt(chi)}", {"chi": chi},
                row[1], cf.delta_F(params), relative=False)
    report.provenance["csv"] = csv_path.name
    return report.finalize()


#: kind-specific config defaults applied by default_config (and the CLI)
KIND_DEFAULTS: dict[str, dict] = {
    "global-ft": {"cases": 200, "system_cutoff": 12, "ladder_dim": 24},
    "figure2": {"omega_i": 1, "omega_f": Fraction(3, 2)},
    "figure3": {"omega_i": 1, "omega_f": 5},
    "figure4": {},
    "jarzynski": {"omega_i": 1, "omega_f": 2, "system_cutoff": 5,
                  "ladder_dim": 44},
    "crooks-added": {"system_cutoff": 8, "ladder_dim": 24},
    "crooks-subtracted": {"system_cutoff": 8, "ladder_dim": 24},
    "crooks-binomial-align": {"system_cutoff": 4, "ladder_dim": 12},
    "crooks-binomial-size": {"system_cutoff": 4, "ladder_dim": 12},
    "harmonic-limit": {},
    "sweep": {},
}


def default_config(kind: str, **overrides) -> ScenarioConfig:
    """Config for ``kind`` with its conventional parameters, plus overrides."""
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"unknown scenario kind {kind!r}")
    data = {"kind": kind}
    data.update(KIND_DEFAULTS.get(kind, {}))
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ScenarioConfig.from_mapping(data)


_RUNNERS: dict[str, Callable[[ScenarioConfig], VerificationReport]] = {
    "global-ft": run_global_ft,
    "crooks-added": run_crooks_added,
    "crooks-subtracted": run_crooks_subtracted,
    "crooks-binomial-align": run_crooks_binomial_align,
    "crooks-binomial-size": run_crooks_binomial_size,
    "jarzynski": run_jarzynski,
    "figure2": run_figure2,
    "figure3": run_figure3,
    "figure4": run_figure4,
    "harmonic-limit": run_harmonic_limit,
    "sweep": run_sweep,
}


def run_scenario(config: ScenarioConfig) -> VerificationReport:
    """Dispatch a scenario; writes `<kind>.json` (and CSV artifacts for the
    figure kinds) into config.out_dir when set."""
    report = _RUNNERS[config.kind](config)
    if config.out_dir is not None:
        report.write(Path(config.out_dir) / f"{config.kind}.json")
    return report


#: suites composing the default verification run, in execution order
VERIFY_SUITES = ("global-ft", "figure2", "figure3", "figure4", "sweep",
                 "harmonic-limit", "crooks-binomial-align",
                 "crooks-binomial-size", "crooks-added", "crooks-subtracted",
                 "jarzynski")


def verify_all(seed: int = 2024, budget_seconds: float = 600.0,
               out_dir: Optional[str] = None,
               tolerance: Optional[float] = None) -> dict:
    """Run every verification suite under a wall-clock budget; returns an
    aggregate mapping with per-suite summaries and an overall flag."""
    t0 = time.perf_counter()
    results: dict = {"seed": seed, "tool_version": TOOL_VERSION, "suites": {}}
    for kind in VERIFY_SUITES:
        elapsed = time.perf_counter() - t0
        if elapsed > budget_seconds:
            raise BudgetExceededError(
                f"verification exceeded budget: {elapsed:.1f}s > {budget_seconds}s "
                f"before suite {kind!r}"
            )
        config = default_config(kind, seed=seed, out_dir=out_dir,
                                tolerance=tolerance)
        report = run_scenario(config)
        results["suites"][kind] = report.to_dict()
    results["elapsed_seconds"] = round(time.perf_counter() - t0, 3)
    results["all_passed"] = all(s["summary"]["all_passed"]
                                for s in results["suites"].values())
    if out_dir is not None:
        path = Path(out_dir) / "verify.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = dict(results)
        payload.pop("elapsed_seconds")     # keep report bytes seed-deterministic
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return results
