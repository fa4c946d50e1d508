"""Run configuration: a TOML file with one table per pipeline stage.

Unknown keys and out-of-range values are rejected before any computation.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
import math
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib


class ConfigError(ValueError):
    """Invalid run configuration (exit code 3)."""


@dataclass
class BodyConfig:
    n: int = 3
    k: Optional[int] = None
    section_dim: Optional[int] = None
    # cap height parameter: the caps sit at height sqrt(2)/2 - lambda
    lam: float = 0.02
    blend_width: float = 0.05
    eps_strict: float = 1e-3


@dataclass
class ScanConfig:
    body: str = "M"
    ball_radius: float = 0.5
    angle_count: int = 9
    xtol: float = 1e-4
    ft_rtol: float = 1e-4


@dataclass
class BumpConfig:
    center: float = 0.0
    # half width as a fraction of the room left inside the negative interval
    half_width_fraction: float = 0.9
    half_width: Optional[float] = None
    amplitude: float = 1.0


@dataclass
class PerturbConfig:
    max_degree: int = 768
    eps_max: float = 0.1
    zhang_planes: int = 500
    zhang_tol: float = 1e-9
    tail_tol: float = 1e-8


@dataclass
class CertifyConfig:
    plane_count: int = 100
    seed: int = 7
    workers: int = 1
    convexity_samples: int = 4000


@dataclass
class QuadConfig:
    radial_nodes: int = 48
    sphere_nodes: int = 64


@dataclass
class OutputConfig:
    dir: str = "out"
    profile_points: int = 1001


@dataclass
class RunConfig:
    body: BodyConfig = field(default_factory=BodyConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    bump: BumpConfig = field(default_factory=BumpConfig)
    perturb: PerturbConfig = field(default_factory=PerturbConfig)
    certify: CertifyConfig = field(default_factory=CertifyConfig)
    quadrature: QuadConfig = field(default_factory=QuadConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def n(self) -> int:
        return self.body.n

    @property
    def k(self) -> int:
        return self.body.k

    def to_dict(self) -> dict:
        return asdict(self)


# TOML spelling of fields that are Python keywords
_ALIASES = {("body", "lambda"): "lam"}


def _set_table(obj, table: dict, name: str):
    known = {f.name: f for f in fields(obj)}
    for key, val in table.items():
        attr = _ALIASES.get((name, key), key)
        if attr not in known:
            raise ConfigError(f"unknown key '{key}' in [{name}]")
        setattr(obj, attr, val)


def from_dict(data: dict) -> RunConfig:
    cfg = RunConfig()
    tables = {f.name for f in fields(cfg)}
    for name, table in data.items():
        if name not in tables:
            raise ConfigError(f"unknown table [{name}]")
        if not isinstance(table, dict):
            raise ConfigError(f"[{name}] must be a table")
        _set_table(getattr(cfg, name), table, name)
    return validate(cfg)


def load(path: Optional[str]) -> RunConfig:
    if path is None:
        return validate(RunConfig())
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return from_dict(data)


def _check(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return (isinstance(x, (int, float)) and not isinstance(x, bool)) and math.isfinite(x)


def validate(cfg: RunConfig) -> RunConfig:
    b = cfg.body
    _check(_is_int(b.n) and b.n >= 3, f"n must be an integer >= 3 (got {b.n!r})")
    # k and section_dim are two spellings of the same thing: section_dim = n - k
    if b.section_dim is not None:
        _check(_is_int(b.section_dim), "section_dim must be an integer")
        if b.k is not None and b.k != b.n - b.section_dim:
            raise ConfigError(f"k={b.k} and section_dim={b.section_dim} disagree (need k = n - section_dim)")
        b.k = b.n - b.section_dim
    elif b.k is None:
        b.k = 1
    _check(_is_int(b.k), "k must be an integer")
    _check(1 <= b.k <= b.n - 2,
           f"k must satisfy 1 <= k <= n-2 = {b.n - 2} (section dimension between 2 and n-1); got k={b.k}")
    b.section_dim = b.n - b.k
    _check(_is_num(b.lam) and 0.0 < b.lam < math.sqrt(0.5), f"lambda must lie in (0, sqrt(2)/2) (got {b.lam!r})")
    _check(_is_num(b.blend_width) and 0.0 < b.blend_width < 0.5, "blend_width must lie in (0, 0.5)")
    _check(_is_num(b.eps_strict) and 0.0 <= b.eps_strict < 0.1, "eps_strict must lie in [0, 0.1)")

    s = cfg.scan
    _check(s.body in ("M", "ball"), "scan.body must be 'M' or 'ball'")
    _check(_is_num(s.ball_radius) and 0.0 < s.ball_radius < 1.0, "scan.ball_radius must lie in (0, 1)")
    _check(_is_int(s.angle_count) and s.angle_count >= 3, "scan.angle_count must be an integer >= 3")
    _check(_is_num(s.xtol) and 0.0 < s.xtol < 0.1, "scan.xtol must lie in (0, 0.1)")
    _check(_is_num(s.ft_rtol) and 0.0 < s.ft_rtol < 1.0, "scan.ft_rtol must lie in (0, 1)")

    u = cfg.bump
    _check(_is_num(u.center) and 0.0 <= u.center <= math.pi / 2, "bump.center must lie in [0, pi/2]")
    _check(_is_num(u.half_width_fraction) and 0.0 < u.half_width_fraction < 1.0,
           "bump.half_width_fraction must lie in (0, 1)")
    _check(u.half_width is None or (_is_num(u.half_width) and u.half_width > 0.0), "bump.half_width must be > 0")
    _check(_is_num(u.amplitude) and u.amplitude > 0.0, "bump.amplitude must be > 0")

    p = cfg.perturb
    _check(_is_int(p.max_degree) and p.max_degree >= 2 and p.max_degree % 2 == 0,
           "perturb.max_degree must be an even integer >= 2")
    _check(_is_num(p.eps_max) and p.eps_max > 0.0, "perturb.eps_max must be > 0")
    _check(_is_int(p.zhang_planes) and p.zhang_planes >= 1, "perturb.zhang_planes must be >= 1")
    _check(_is_num(p.zhang_tol) and p.zhang_tol > 0.0, "perturb.zhang_tol must be > 0")
    _check(_is_num(p.tail_tol) and 0.0 < p.tail_tol < 1.0, "perturb.tail_tol must lie in (0, 1)")

    c = cfg.certify
    _check(_is_int(c.plane_count) and c.plane_count >= 1, "certify.plane_count must be >= 1")
    _check(_is_int(c.seed) and c.seed >= 0, "certify.seed must be a nonnegative integer")
    _check(_is_int(c.workers) and c.workers >= 1, "certify.workers must be >= 1")
    _check(_is_int(c.convexity_samples) and c.convexity_samples >= 100, "certify.convexity_samples must be >= 100")

    q = cfg.quadrature
    _check(_is_int(q.radial_nodes) and q.radial_nodes >= 8, "quadrature.radial_nodes must be >= 8")
    _check(_is_int(q.sphere_nodes) and q.sphere_nodes >= 8, "quadrature.sphere_nodes must be >= 8")

    o = cfg.output
    _check(isinstance(o.dir, str) and o.dir != "", "output.dir must be a nonempty string")
    _check(_is_int(o.profile_points) and o.profile_points >= 2, "output.profile_points must be >= 2")
    return cfg
