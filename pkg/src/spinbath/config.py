"""Run configuration: defaults, the key = value file format, validation."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .bath import debye_frequencies
from .spins import ModelParams

__all__ = ["RunConfig", "ConfigError", "parse_config", "DEFAULTS"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of a run. The zero-input defaults reproduce the
    standard comparison setup (impurity at omega0 = 0.8288 under a 14-spin
    environment at kT = 0.02, step 0.1, 50-point lag grid)."""
    omega0: float = 0.8288
    beta: float = 0.01
    lambda0: float = 1.0
    lam: float = 2.0
    n_s: int = 14
    n_eig: int = 20
    kT: float = 0.02
    omega_d: float = 1.0
    freq_mode: str = "deterministic"   # or "seeded"
    seed: int = 0
    dt: float = 0.1
    t_max: float = 50.0
    dt_out: float | None = None
    grid_n: int = 50
    m_b: int | None = None             # kernel truncation, defaults to n_eig
    solver: str = "grid"               # or "quadrature"
    substeps: int | None = None        # None = automatic stability choice
    workers: int = 1
    eig_tol: float = 1e-10
    eig_max_matvecs: int | None = None
    out_dir: str = "."
    svg: bool = False

    def validate(self) -> "RunConfig":
        checks = [
            (self.n_s >= 1, "n_s must be at least 1"),
            (1 <= self.n_eig <= 2 ** self.n_s, "n_eig must lie in [1, 2**n_s]"),
            (self.kT > 0, "kT must be positive"),
            (self.omega_d > 0, "omega_d must be positive"),
            (self.dt > 0, "dt must be positive"),
            (self.t_max > 0, "t_max must be positive"),
            (self.grid_n >= 8, "grid_n must be at least 8"),
            (self.freq_mode in ("deterministic", "seeded"),
             "freq_mode must be 'deterministic' or 'seeded'"),
            (self.solver in ("grid", "quadrature"),
             "solver must be 'grid' or 'quadrature'"),
            (self.workers >= 1, "workers must be at least 1"),
            (self.substeps is None or self.substeps >= 1,
             "substeps must be at least 1"),
            (self.m_b is None or 1 <= self.m_b <= self.n_eig,
             "m_b must lie in [1, n_eig]"),
            (self.eig_tol > 0, "eig_tol must be positive"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def model_params(self) -> ModelParams:
        seed = self.seed if self.freq_mode == "seeded" else None
        omegas = tuple(debye_frequencies(self.n_s, self.omega_d, seed=seed))
        return ModelParams(omega0=self.omega0, beta=self.beta, lambda0=self.lambda0,
                           lam=self.lam, n_s=self.n_s, omegas=omegas,
                           kT=self.kT, n_eig=self.n_eig)

    def quick(self) -> "RunConfig":
        """CI-speed preset: smaller environment, shorter run."""
        return replace(self, n_s=10, n_eig=8, t_max=20.0)


DEFAULTS = RunConfig()

_BOOL_WORDS = {"true": True, "yes": True, "1": True,
               "false": False, "no": False, "0": False}

# config-file key -> dataclass field (the file spells the coupling "lambda")
_KEY_TO_FIELD = {f.name: f.name for f in fields(RunConfig)}
_KEY_TO_FIELD["lambda"] = "lam"
del _KEY_TO_FIELD["lam"]


def _convert(key: str, field_name: str, raw: str, lineno: int):
    target = RunConfig.__dataclass_fields__[field_name]
    text = raw.strip()
    try:
        if field_name in ("dt_out",):
            return None if text.lower() == "auto" else float(text)
        if field_name in ("substeps", "eig_max_matvecs", "m_b"):
            return None if text.lower() == "auto" else int(text)
        if target.type in ("float",):
            return float(text)
        if target.type in ("int",):
            return int(text)
        if target.type in ("bool",):
            return _BOOL_WORDS[text.lower()]
        return text
    except (ValueError, KeyError):
        raise ConfigError(f"line {lineno}: malformed value {raw!r} for key '{key}'") from None


def parse_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    """Read a line-oriented ``key = value`` file, apply overrides, validate.

    Blank lines and lines starting with '#' are ignored. Unknown keys and
    malformed values raise ConfigError naming the offending line. With
    path=None only the overrides are applied to the defaults.
    """
    values: dict = {}
    if path is not None:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, _, raw = stripped.partition("=")
            key = key.strip()
            if key not in _KEY_TO_FIELD:
                raise ConfigError(f"line {lineno}: unknown key '{key}'")
            field_name = _KEY_TO_FIELD[key]
            values[field_name] = _convert(key, field_name, raw, lineno)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = replace(DEFAULTS, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return config.validate()
