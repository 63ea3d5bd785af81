"""Physical parameters, unit presets, and regime checks.

The model: N dipoles (N odd) of mass m_c on springs k_c with spacing a_c,
free ends, total length L = (N-1) a_c; a two-charge detector of total mass
M_d and reduced mass m_tilde_d held a perpendicular distance w above the
chain, with internal spring k_d, equilibrium separation a_d and internal
frequency omega_d (one or two internal transitions).  The dipole-dipole
coupling strength is the shorthand

    g = p_d * p_c * w / (4 pi eps0 * a_d * a_c)

with units energy * length^2.  All derived constants (c_s, rho_c, Upsilon_c)
come from the chain parameters; hbar is carried explicitly so the quantum
modules never assume hbar = 1.

"paper units" preset: c_s = L = rho_c = hbar = 1 with N and w free, the
configuration every figure-style run uses.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

from .errors import ValidationError

# factor such that "x much greater than y" means x/y >= MUCH_FACTOR
MUCH_FACTOR = 10.0


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value)):
            raise ValidationError(f"{name} must be a finite number, got {value!r}")
        if value <= 0:
            raise ValidationError(f"{name} must be strictly positive, got {value}")


@dataclass(frozen=True)
class ChainParams:
    """Dipole chain: N masses m_c, springs k_c, spacing a_c, free ends."""

    N: int
    m_c: float
    k_c: float
    a_c: float

    def __post_init__(self):
        if not isinstance(self.N, int):
            raise ValidationError(f"N must be an integer, got {self.N!r}")
        if self.N < 3:
            raise ValidationError(f"N must be >= 3, got {self.N}")
        if self.N % 2 == 0:
            raise ValidationError(f"N must be odd, got {self.N}")
        _require_positive(m_c=self.m_c, k_c=self.k_c, a_c=self.a_c)

    @property
    def L(self) -> float:
        return (self.N - 1) * self.a_c

    @property
    def rho_c(self) -> float:
        return self.m_c / self.a_c

    @property
    def upsilon_c(self) -> float:
        return self.k_c * self.a_c

    @property
    def c_s(self) -> float:
        return self.a_c * math.sqrt(self.k_c / self.m_c)


@dataclass(frozen=True)
class DetectorParams:
    """Detector: total/reduced masses, internal spring, dipole arm, height w.

    omega_d holds one internal frequency (single-level detector) or two
    (two-level detector, frequencies omega_d1 and omega_d2).
    """

    M_d: float
    m_tilde_d: float
    k_d: float
    a_d: float
    omega_d: tuple[float, ...]
    w: float

    def __post_init__(self):
        _require_positive(M_d=self.M_d, m_tilde_d=self.m_tilde_d, k_d=self.k_d,
                          a_d=self.a_d, w=self.w)
        if self.m_tilde_d >= self.M_d:
            raise ValidationError(
                f"reduced mass m_tilde_d={self.m_tilde_d} must be < total mass M_d={self.M_d}")
        freqs = tuple(float(om) for om in self.omega_d)
        if len(freqs) not in (1, 2):
            raise ValidationError(
                f"omega_d must hold one or two frequencies, got {len(freqs)}")
        for om in freqs:
            _require_positive(omega_d=om)
        object.__setattr__(self, "omega_d", freqs)

    @property
    def omega_d1(self) -> float:
        return self.omega_d[0]

    @property
    def omega_d2(self) -> float:
        if len(self.omega_d) < 2:
            raise ValidationError("detector has a single internal frequency; omega_d2 undefined")
        return self.omega_d[1]

    @property
    def two_level(self) -> bool:
        return len(self.omega_d) == 2


@dataclass(frozen=True)
class CouplingParams:
    """Dipole-dipole coupling g (energy*length^2) and the active hbar."""

    g: float
    hbar: float
    p_d: float | None = None
    p_c: float | None = None
    epsilon0: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.g):
            raise ValidationError(f"g must be finite, got {self.g}")
        _require_positive(hbar=self.hbar)

    @staticmethod
    def from_dipoles(p_d, p_c, epsilon0, w, a_d, a_c, hbar):
        """Derive g = p_d p_c w / (4 pi eps0 a_d a_c) from raw EM inputs."""
        _require_positive(epsilon0=epsilon0, w=w, a_d=a_d, a_c=a_c)
        g = p_d * p_c * w / (4.0 * math.pi * epsilon0 * a_d * a_c)
        return CouplingParams(g=g, hbar=hbar, p_d=p_d, p_c=p_c, epsilon0=epsilon0)


@dataclass(frozen=True)
class SystemParams:
    """Validated bundle of chain + detector + coupling parameters."""

    chain: ChainParams
    detector: DetectorParams
    coupling: CouplingParams
    units: str = "custom"

    @property
    def g(self) -> float:
        return self.coupling.g

    @property
    def hbar(self) -> float:
        return self.coupling.hbar

    def to_dict(self) -> dict:
        d = {"units": self.units,
             "chain": asdict(self.chain),
             "detector": asdict(self.detector),
             "coupling": asdict(self.coupling)}
        d["detector"]["omega_d"] = list(self.detector.omega_d)
        d["derived"] = {"L": self.chain.L, "rho_c": self.chain.rho_c,
                        "upsilon_c": self.chain.upsilon_c, "c_s": self.chain.c_s}
        return d


# -- construction -----------------------------------------------------------

_CHAIN_KEYS = {"N", "m_c", "k_c", "a_c"}
_DETECTOR_KEYS = {"M_d", "m_tilde_d", "k_d", "a_d", "omega_d", "w"}


def build_params(config: dict) -> SystemParams:
    """Build validated SystemParams from a configuration mapping.

    The config has sections "chain", "detector", "coupling" and optionally
    "units".  Two unit modes:

      units: {"preset": "paper"}   nondimensional c_s = L = rho_c = hbar = 1:
                                   requires chain.N and detector.w only; the
                                   chain scales are derived (a_c = 1/(N-1),
                                   m_c = a_c, k_c = 1/a_c) and detector /
                                   coupling fields get documented defaults
                                   (m_tilde_d=1, M_d=4, a_d=1, omega_d=10*pi,
                                   k_d=m_tilde_d*omega_d1^2, g=1), each
                                   overridable.
      units: {"hbar": <value>}     fully explicit: every chain/detector field
                                   required, g (or raw dipole inputs) required.

    Coupling accepts either g directly or raw inputs p_d, p_c, epsilon0 from
    which g is derived.  Supplying both cross-checks them.
    """
    if not isinstance(config, dict):
        raise ValidationError("config must be a mapping")
    for section in ("units", "chain", "detector", "coupling"):
        value = config.get(section)
        if value is not None and not isinstance(value, dict):
            raise ValidationError(
                f"config section {section!r} must be a mapping, got {type(value).__name__}")
    units_cfg = config.get("units", {}) or {}
    preset = units_cfg.get("preset")
    chain_cfg = dict(config.get("chain", {}) or {})
    det_cfg = dict(config.get("detector", {}) or {})
    coup_cfg = dict(config.get("coupling", {}) or {})

    if preset not in (None, "paper"):
        raise ValidationError(f"unknown units preset {preset!r} (only 'paper' exists)")

    if preset == "paper":
        if "N" not in chain_cfg:
            raise ValidationError("paper-units preset requires chain.N")
        if "w" not in det_cfg:
            raise ValidationError("paper-units preset requires detector.w")
        N = chain_cfg["N"]
        if not isinstance(N, int):
            raise ValidationError(f"N must be an integer, got {N!r}")
        if N < 3:
            raise ValidationError(f"N must be >= 3, got {N}")
        a_c = 1.0 / (N - 1)          # L = 1
        chain_cfg.setdefault("a_c", a_c)
        chain_cfg.setdefault("m_c", chain_cfg["a_c"])       # rho_c = 1
        chain_cfg.setdefault("k_c", 1.0 / chain_cfg["a_c"])  # c_s = 1
        det_cfg.setdefault("m_tilde_d", 1.0)
        det_cfg.setdefault("M_d", 4.0 * det_cfg["m_tilde_d"])
        det_cfg.setdefault("a_d", 1.0)
        det_cfg.setdefault("omega_d", 10.0 * math.pi)
        om = det_cfg["omega_d"]
        om1 = om[0] if isinstance(om, (list, tuple)) else om
        det_cfg.setdefault("k_d", det_cfg["m_tilde_d"] * om1 ** 2)
        coup_cfg.setdefault("g", 1.0)
        hbar = units_cfg.get("hbar", 1.0)
        units_label = "paper"
    else:
        missing = _CHAIN_KEYS - set(chain_cfg)
        if missing:
            raise ValidationError(f"missing chain keys: {sorted(missing)}")
        missing = _DETECTOR_KEYS - set(det_cfg)
        if missing:
            raise ValidationError(f"missing detector keys: {sorted(missing)}")
        if "hbar" not in units_cfg:
            raise ValidationError("units.hbar required (or use the 'paper' preset)")
        hbar = units_cfg["hbar"]
        units_label = "custom"

    om = det_cfg["omega_d"]
    omega_d = tuple(om) if isinstance(om, (list, tuple)) else (om,)
    chain = ChainParams(N=chain_cfg["N"], m_c=chain_cfg["m_c"],
                        k_c=chain_cfg["k_c"], a_c=chain_cfg["a_c"])
    detector = DetectorParams(M_d=det_cfg["M_d"], m_tilde_d=det_cfg["m_tilde_d"],
                              k_d=det_cfg["k_d"], a_d=det_cfg["a_d"],
                              omega_d=omega_d, w=det_cfg["w"])

    raw = {k: coup_cfg.get(k) for k in ("p_d", "p_c", "epsilon0")}
    have_raw = all(v is not None for v in raw.values())
    if have_raw:
        coupling = CouplingParams.from_dipoles(
            raw["p_d"], raw["p_c"], raw["epsilon0"],
            w=detector.w, a_d=detector.a_d, a_c=chain.a_c, hbar=hbar)
        if "g" in coup_cfg and coup_cfg["g"] is not None:
            g_given = coup_cfg["g"]
            if abs(g_given - coupling.g) > 1e-12 * max(abs(coupling.g), 1.0):
                raise ValidationError(
                    f"coupling.g={g_given} inconsistent with dipole inputs (derived {coupling.g})")
    elif "g" in coup_cfg and coup_cfg["g"] is not None:
        coupling = CouplingParams(g=coup_cfg["g"], hbar=hbar)
    else:
        raise ValidationError("coupling requires g or all of p_d, p_c, epsilon0")

    return SystemParams(chain=chain, detector=detector, coupling=coupling,
                        units=units_label)


def load_params(path) -> SystemParams:
    """Read a JSON config file and build SystemParams from it."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {path}: invalid JSON ({exc})") from exc
    return build_params(config)


# -- regime checks ----------------------------------------------------------

@dataclass(frozen=True)
class RegimeCheck:
    name: str
    ratio: float
    threshold: float
    # "ge": pass when ratio >= threshold; "le": pass when ratio <= threshold
    direction: str
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class RegimeReport:
    """Measured ratios for every approximation the closed forms lean on.

    Reporting only: building a report never mutates params and never raises
    on a failed flag.
    """

    checks: tuple[RegimeCheck, ...] = field(default_factory=tuple)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> RegimeCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"all_pass": self.all_pass,
                "checks": [asdict(c) for c in self.checks]}


def regime_check(params: SystemParams, window, trajectories,
                 factor: float = MUCH_FACTOR, y_max: float = 10.0,
                 weak_coupling_max: float = 0.1) -> RegimeReport:
    """Evaluate the regime flags for a run window and a set of trajectories.

    window: (t_start, t_end) in the active units; trajectories: iterable of
    (x0, v) pairs.  Flags (defaults: "much greater" = factor 10):

      w_over_ac        w >> a_c
      L_over_w         L >> w
      edge_distance    detector stays far from the chain edges: the minimum
                       distance (L/2 - |x_d|) over the window, measured in
                       units of w, must be >= factor
      mode_wavelength  lambda_alpha >= w for the modes that actually couple
                       (cutoff f >= 1/2); the shorter retained modes carry
                       negligible weight by construction
      weak_coupling    max_alpha |g_alpha| * t_end / hbar <= weak_coupling_max
    """
    # local import: modes imports params for types
    from .modes import mode_spectrum, coupling_strengths

    if not trajectories:
        raise ValidationError("regime_check requires at least one trajectory")
    t0, t1 = float(window[0]), float(window[1])
    if not (math.isfinite(t0) and math.isfinite(t1) and t1 >= t0):
        raise ValidationError(f"window must be a finite interval, got {window}")

    chain, det = params.chain, params.detector
    L, w, c_s = chain.L, det.w, chain.c_s

    checks = []
    r = w / chain.a_c
    checks.append(RegimeCheck("w_over_ac", r, factor, "ge", r >= factor))
    r = L / w
    checks.append(RegimeCheck("L_over_w", r, factor, "ge", r >= factor))

    max_excursion = 0.0
    for x0, v in trajectories:
        for t in (t0, t1):
            max_excursion = max(max_excursion, abs(x0 + v * t))
    r = (L / 2.0 - max_excursion) / w
    checks.append(RegimeCheck("edge_distance", r, factor, "ge", r >= factor,
                              note=f"max |x_d| = {max_excursion:.6g}"))

    spec = mode_spectrum(params, y_max=y_max)
    y = spec.omega * w / c_s
    from .specfun import cutoff_f
    f_vals = cutoff_f(y[spec.retained])
    significant = spec.omega[spec.retained][f_vals >= 0.5]
    if significant.size:
        lam_min = float((2.0 * math.pi * c_s / significant).min())
        r = lam_min / w
    else:
        r = math.inf
    checks.append(RegimeCheck("mode_wavelength", r, 1.0, "ge", r >= 1.0,
                              note="min lambda/w over modes with f >= 1/2"))

    g_abs = abs(coupling_strengths(params, det.omega_d1, y_max=y_max)[spec.retained])
    gt_max = float(g_abs.max()) * max(abs(t0), abs(t1)) / params.hbar if g_abs.size else 0.0
    checks.append(RegimeCheck("weak_coupling", gt_max, weak_coupling_max, "le",
                              gt_max <= weak_coupling_max,
                              note="max |g_alpha| t / hbar over retained modes"))

    return RegimeReport(checks=tuple(checks))
