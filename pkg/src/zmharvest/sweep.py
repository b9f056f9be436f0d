"""Single-point evaluation, parameter sweeps and their CSV/JSON serialization.

All reported quantities use the detector frequency as the unit (Omega = 1
on the CLI); matrix elements and negativities are divided by lambda_tilde^2.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import math
from enum import Enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .assembly import assemble_elements, negativity_leading_order
from .config import (Coupling, DetectorKind, HarvestConfig, SeparationMode, symmetric_config,
                     validate)
from .errors import NUMERICAL_ERRORS, ConfigError, ZMHarvestError

COLUMNS = (
    "L_omega", "gamma", "T_omega", "sep_omega",
    "L_AA_zm", "L_AA_osc", "L_AA_total",
    "re_M_zm", "im_M_zm", "re_M_osc", "im_M_osc", "abs_M_total",
    "negativity_with_zm", "negativity_without_zm",
    "n_max_used", "error_flag",
)

FLAT_KEYS = ("omega", "lambda_tilde", "T", "L", "n_dim", "gamma", "separation_fraction",
             "separation_abs", "coupling", "detector", "include_zero_mode", "n_max",
             "quad_tol", "epsilon")

DEFAULTS = dict(omega=1.0, lambda_tilde=0.01, T=1.0, L=10.0, n_dim=1, gamma=1.0,
                coupling="amplitude", detector="qubit", include_zero_mode=True, n_max=None,
                quad_tol=1e-10, epsilon=1e-3)

AXES = {"L": "L", "gamma": "gamma", "T": "T", "separation": None}


# --------------------------------------------------------------------------
# flat configuration

def _parse_bool(s):
    v = str(s).strip().lower()
    if v in ("true", "1", "yes", "on"):
        return True
    if v in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_n_max(s):
    if s is None or str(s).strip().lower() in ("auto", "none", ""):
        return None
    f = float(s)
    if f != int(f):
        raise ValueError(f"n_max must be an integer, got {s!r}")
    return int(f)


_PARSERS = dict(omega=float, lambda_tilde=float, T=float, L=float, gamma=float,
                separation_fraction=float, separation_abs=float, quad_tol=float,
                epsilon=float, n_max=_parse_n_max, include_zero_mode=_parse_bool,
                coupling=lambda s: Coupling(str(s).strip().lower()),
                detector=lambda s: DetectorKind(str(s).strip().lower()),
                n_dim=lambda s: int(float(s)) if float(s).is_integer() else float(s))


def parse_flat(text: str) -> dict:
    """Read ``key = value`` lines (``#`` comments allowed) into raw strings."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError([("MalformedConfig", str(exc).splitlines()[0])]) from exc
    return dict(cp["config"])


def normalize_flat(raw: dict) -> dict:
    """Type-convert flat keys, filling defaults; raises ConfigError listing every problem."""
    issues, out = [], {}
    for key, value in raw.items():
        if key not in FLAT_KEYS:
            issues.append(("UnknownKey", f"unknown key {key!r}"))
            continue
        if value is None:
            continue
        try:
            # str-valued enums are already parsed
            raw_text = isinstance(value, str) and not isinstance(value, Enum)
            out[key] = _PARSERS[key](value) if raw_text else value
        except ValueError as exc:
            issues.append(("InvalidValue", f"{key}: {exc}"))
    if "separation_fraction" in out and "separation_abs" in out:
        issues.append(("InvalidSeparation", "give separation_fraction or separation_abs, not both"))
    if issues:
        raise ConfigError(issues)
    merged = dict(DEFAULTS)
    merged.update(out)
    if "separation_abs" not in merged:
        merged.setdefault("separation_fraction", 0.5)
    return merged


def config_from_flat(params: dict) -> HarvestConfig:
    p = normalize_flat(params)
    return symmetric_config(length=p["L"], gamma=p["gamma"], width=p["T"], omega=p["omega"],
                            lambda_tilde=p["lambda_tilde"],
                            separation_fraction=p.get("separation_fraction"),
                            separation_abs=p.get("separation_abs"), kind=p["detector"],
                            coupling=p["coupling"], include_zero_mode=p["include_zero_mode"],
                            n_dim=p["n_dim"], n_max=p["n_max"], epsilon=p["epsilon"],
                            quad_tol=p["quad_tol"])


def config_to_flat(cfg: HarvestConfig) -> dict:
    a, f = cfg.detector_a, cfg.field
    out = dict(omega=a.frequency, lambda_tilde=a.coupling, T=a.width, L=f.length, n_dim=f.n_dim,
               gamma=cfg.zero_mode.gamma, coupling=f.coupling.value, detector=a.kind.value,
               include_zero_mode=f.include_zero_mode,
               n_max="auto" if f.n_max is None else f.n_max, quad_tol=f.quad_tol,
               epsilon=f.epsilon)
    sep = cfg.separation
    if sep is not None and sep.mode is SeparationMode.FRACTION:
        out["separation_fraction"] = sep.value
    else:
        out["separation_abs"] = cfg.distance
    return out


# --------------------------------------------------------------------------
# evaluation

def _norm(value, lam2):
    return value / lam2 if lam2 else 0.0 * value


def run_point(config: HarvestConfig) -> dict:
    """Evaluate one configuration into a result row (keys ``COLUMNS``).

    Errors are recorded in ``error_flag`` with NaN numeric columns; the row
    is never dropped.
    """
    a, f = config.detector_a, config.field
    w = a.frequency
    row = dict.fromkeys(COLUMNS, math.nan)
    row.update(L_omega=f.length * w, gamma=config.zero_mode.gamma, T_omega=a.width * w,
               sep_omega=config.distance * w, n_max_used=0, error_flag="ok")
    try:
        cfg = validate(config)
        elems = assemble_elements(cfg)
        bare = elems.without_zero_mode()
        n_with = negativity_leading_order(elems)
        n_without = negativity_leading_order(bare)
    except ConfigError as exc:
        row["error_flag"] = ";".join(dict.fromkeys(exc.codes))
        return row
    except ZMHarvestError as exc:
        row["error_flag"] = exc.code
        return row
    lam2 = cfg.detector_a.coupling * cfg.detector_b.coupling
    laa, m = elems.L_AA, elems.M
    row.update(
        L_AA_zm=_norm(laa.zm.real, lam2), L_AA_osc=_norm(laa.osc.real, lam2),
        L_AA_total=_norm(laa.total.real, lam2),
        re_M_zm=_norm(m.zm.real, lam2), im_M_zm=_norm(m.zm.imag, lam2),
        re_M_osc=_norm(m.osc.real, lam2), im_M_osc=_norm(m.osc.imag, lam2),
        abs_M_total=_norm(abs(m.total), lam2),
        negativity_with_zm=_norm(n_with, lam2), negativity_without_zm=_norm(n_without, lam2),
        n_max_used=elems.n_max_used)
    return row


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep of ``axis`` in {"L", "gamma", "T", "separation"}.

    ``base`` holds flat configuration keys.  With ``separation_fraction`` in
    ``base`` the detector distance tracks L; with ``separation_abs`` it is
    fixed.  A separation sweep varies whichever of the two is set.
    """

    axis: str
    lo: float
    hi: float
    count: int
    spacing: str = "linear"
    base: dict = dc_field(default_factory=dict)

    def check(self):
        issues = []
        if self.axis not in AXES:
            issues.append(("InvalidAxis", f"axis must be one of {sorted(AXES)}"))
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            issues.append(("InvalidRange", f"need lo < hi, got {self.lo}, {self.hi}"))
        if int(self.count) != self.count or self.count < 2:
            issues.append(("InvalidRange", f"count must be an integer >= 2, got {self.count}"))
        if self.spacing not in ("linear", "log"):
            issues.append(("InvalidRange", f"spacing must be linear or log, got {self.spacing!r}"))
        elif self.spacing == "log" and self.lo <= 0:
            issues.append(("InvalidRange", "log spacing needs lo > 0"))
        return issues

    def values(self):
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, int(self.count))
        return np.linspace(self.lo, self.hi, int(self.count))

    def point_params(self):
        base = normalize_flat(self.base)
        key = AXES.get(self.axis)
        if key is None:
            key = "separation_abs" if "separation_abs" in base else "separation_fraction"
        out = []
        for v in self.values():
            p = dict(base)
            p[key] = float(v)
            out.append(p)
        return out


def _run_flat(params):
    return run_point(config_from_flat(params))


def run_sweep(spec: SweepSpec, workers: Optional[int] = 1) -> list:
    """Rows in axis order.  Points are independent, so ``workers > 1`` only changes speed."""
    issues = spec.check()
    if issues:
        raise ConfigError(issues)
    validate(config_from_flat(spec.base))
    params = spec.point_params()
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_flat, params))
    return [_run_flat(p) for p in params]


def has_numerical_failure(rows) -> bool:
    codes = {cls.__name__ for cls in NUMERICAL_ERRORS}
    return any(r["error_flag"] in codes for r in rows)


# --------------------------------------------------------------------------
# serialization (repr floats so identical inputs give identical bytes)

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in COLUMNS])
    return buf.getvalue()


def to_json(rows) -> str:
    def clean(v):
        return None if isinstance(v, float) and not math.isfinite(v) else v
    return json.dumps([{c: clean(r[c]) for c in COLUMNS} for r in rows], indent=2) + "\n"
