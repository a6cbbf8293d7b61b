"""Parameter records for two-sided tempered stable laws and the variance-gamma subfamily.

A TSD is described per side by an intensity ``alpha``, a stability index
``beta`` in [0, 1) and a tempering rate ``lambda``.  Either side may be absent
(one-sided laws).  Location is fixed at zero throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Union


class ParameterError(ValueError):
    """Raised when a parameter record violates its range constraints."""


@dataclass(frozen=True)
class Side:
    alpha: float
    beta: float
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "lam", float(self.lam))


@dataclass(frozen=True)
class TsdParams:
    """TSD(alpha+, beta+, lambda+; alpha-, beta-, lambda-).

    A side whose three fields are ``None`` is absent.  Construction does not
    validate; call :func:`validate` (the public constructors do).
    """

    alpha_plus: Optional[float] = None
    beta_plus: Optional[float] = None
    lambda_plus: Optional[float] = None
    alpha_minus: Optional[float] = None
    beta_minus: Optional[float] = None
    lambda_minus: Optional[float] = None

    @property
    def plus(self) -> Optional[Side]:
        if self.alpha_plus is None:
            return None
        return Side(self.alpha_plus, self.beta_plus, self.lambda_plus)

    @property
    def minus(self) -> Optional[Side]:
        if self.alpha_minus is None:
            return None
        return Side(self.alpha_minus, self.beta_minus, self.lambda_minus)

    def sides(self):
        """Yield ``(sign, Side)`` for each present side, sign = +1 / -1."""
        if self.plus is not None:
            yield 1, self.plus
        if self.minus is not None:
            yield -1, self.minus

    @property
    def all_beta_zero(self) -> bool:
        return all(side.beta == 0.0 for _, side in self.sides())

    def to_dict(self) -> dict:
        d = {"family": "tsd"}
        d.update({f.name: getattr(self, f.name) for f in fields(self)})
        return d

    def label(self) -> str:
        def fmt(side):
            if side is None:
                return "absent"
            return f"{side.alpha:g},{side.beta:g},{side.lam:g}"

        return f"TSD({fmt(self.plus)};{fmt(self.minus)})"


def tsd(alpha_plus, beta_plus, lambda_plus, alpha_minus=None, beta_minus=None,
        lambda_minus=None) -> TsdParams:
    """Build and validate a TSD record; pass ``None`` for an absent side."""
    return validate(TsdParams(alpha_plus, beta_plus, lambda_plus,
                              alpha_minus, beta_minus, lambda_minus))


def symmetric(alpha: float, beta: float, lam: float) -> TsdParams:
    return tsd(alpha, beta, lam, alpha, beta, lam)


def laplace(lam: float) -> TsdParams:
    """Laplace(0, 1/lam^2) = TSD(1, 0, lam; 1, 0, lam)."""
    return symmetric(1.0, 0.0, lam)


def gamma(alpha: float, lam: float) -> TsdParams:
    return tsd(alpha, 0.0, lam)


def _check_side(name: str, values) -> None:
    alpha, beta, lam = values
    present = [v is not None for v in values]
    if any(present) and not all(present):
        raise ParameterError(f"{name} side partially specified: {values}")
    if not any(present):
        return
    for label, v in zip(("alpha", "beta", "lambda"), values):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise ParameterError(f"{label}_{name} must be a finite number, got {v!r}")
    if alpha <= 0:
        raise ParameterError(f"alpha must be positive (alpha_{name}={alpha})")
    if not 0.0 <= beta < 1.0:
        raise ParameterError(f"beta out of [0,1) (beta_{name}={beta})")
    if lam <= 0:
        raise ParameterError(f"lambda must be positive (lambda_{name}={lam})")


def validate(params: TsdParams) -> TsdParams:
    """Return ``params`` unchanged if every range constraint holds."""
    _check_side("plus", (params.alpha_plus, params.beta_plus, params.lambda_plus))
    _check_side("minus", (params.alpha_minus, params.beta_minus, params.lambda_minus))
    if params.alpha_plus is None and params.alpha_minus is None:
        raise ParameterError("at least one side must be present")
    return params


# ---------------------------------------------------------------------------
# Variance-gamma parameterizations


@dataclass(frozen=True)
class VG0:
    """Levy-measure form: alpha e^{-lambda+ u}/u on u>0, alpha e^{-lambda- |u|}/|u| on u<0."""

    alpha: float
    lambda_plus: float
    lambda_minus: float


@dataclass(frozen=True)
class VG1:
    """cf (1 - iz(1/lambda+ - 1/lambda-) + z^2/(lambda+ lambda-))^(-alpha)."""

    alpha: float
    lambda_plus: float
    lambda_minus: float


@dataclass(frozen=True)
class VG2:
    """cf (1 - 2i theta z + sigma2 z^2)^(-r/2)."""

    sigma2: float
    r: float
    theta: float


VgParams = Union[VG0, VG1, VG2]


@dataclass(frozen=True)
class VgForms:
    """The same variance-gamma law in all three parameterizations."""

    vg0: VG0
    vg1: VG1
    vg2: VG2

    @property
    def skew_gap(self) -> float:
        """1/lambda+ - 1/lambda- (equal to 2 theta)."""
        return 1.0 / self.vg1.lambda_plus - 1.0 / self.vg1.lambda_minus

    def to_tsd(self) -> TsdParams:
        return tsd(self.vg0.alpha, 0.0, self.vg0.lambda_plus,
                   self.vg0.alpha, 0.0, self.vg0.lambda_minus)


def validate_vg(v: VgParams) -> VgParams:
    if isinstance(v, (VG0, VG1)):
        for name in ("alpha", "lambda_plus", "lambda_minus"):
            val = getattr(v, name)
            if not (math.isfinite(val) and val > 0):
                raise ParameterError(f"{name} must be positive, got {val!r}")
    elif isinstance(v, VG2):
        if not (math.isfinite(v.sigma2) and v.sigma2 > 0):
            raise ParameterError(f"sigma2 must be positive, got {v.sigma2!r}")
        if not (math.isfinite(v.r) and v.r > 0):
            raise ParameterError(f"r must be positive, got {v.r!r}")
        if not math.isfinite(v.theta):
            raise ParameterError(f"theta must be finite, got {v.theta!r}")
    else:
        raise TypeError(f"not a VG parameter record: {v!r}")
    return v


def vg_convert(v: VgParams) -> VgForms:
    """Populate all three VG parameterizations from any one of them.

    VG0 and VG1 share (alpha, lambda+, lambda-); the two cfs agree by
    Frullani's integral.  VG2 uses sigma2 = 1/(lambda+ lambda-),
    theta = (1/lambda+ - 1/lambda-)/2 and r = 2 alpha.
    """
    validate_vg(v)
    if isinstance(v, VG2):
        root = math.sqrt(v.theta * v.theta + v.sigma2)
        # 1/lambda+ = theta + root, 1/lambda- = root - theta; use the product
        # form for the smaller root to avoid cancellation.
        if v.theta >= 0:
            inv_p = v.theta + root
            inv_m = v.sigma2 / inv_p
        else:
            inv_m = root - v.theta
            inv_p = v.sigma2 / inv_m
        alpha, lp, lm = v.r / 2.0, 1.0 / inv_p, 1.0 / inv_m
        vg2 = v
    else:
        alpha, lp, lm = v.alpha, v.lambda_plus, v.lambda_minus
        vg2 = VG2(sigma2=1.0 / (lp * lm), r=2.0 * alpha,
                  theta=(1.0 / lp - 1.0 / lm) / 2.0)
    return VgForms(VG0(alpha, lp, lm), VG1(alpha, lp, lm), vg2)


# ---------------------------------------------------------------------------
# Special cases

SPECIAL_TAGS = ("gamma", "negated-gamma", "laplace", "symmetric-vg", "vg",
                "bilateral-gamma", "general")


def special_case_of(params: TsdParams) -> str:
    """Most specific named subfamily; comparisons are exact on stored values."""
    p, m = params.plus, params.minus
    if m is None:
        return "gamma" if p.beta == 0.0 else "general"
    if p is None:
        return "negated-gamma" if m.beta == 0.0 else "general"
    if p.beta != 0.0 or m.beta != 0.0:
        return "general"
    if p.alpha == m.alpha:
        if p.lam == m.lam:
            return "laplace" if p.alpha == 1.0 else "symmetric-vg"
        return "vg"
    return "bilateral-gamma"


# ---------------------------------------------------------------------------
# JSON schema shared by every CLI command

_TSD_KEYS = ("alpha_plus", "beta_plus", "lambda_plus",
             "alpha_minus", "beta_minus", "lambda_minus")


def params_from_dict(d: dict) -> TsdParams:
    """Parse ``{"family": "tsd"|"vg0"|"vg1"|"vg2", ...}`` into a validated TSD."""
    family = d.get("family", "tsd")
    try:
        if family == "tsd":
            unknown = set(d) - set(_TSD_KEYS) - {"family"}
            if unknown:
                raise ParameterError(f"unknown fields {sorted(unknown)}")
            return validate(TsdParams(**{k: d.get(k) for k in _TSD_KEYS}))
        if family in ("vg0", "vg1"):
            cls = VG0 if family == "vg0" else VG1
            v = cls(float(d["alpha"]), float(d["lambda_plus"]), float(d["lambda_minus"]))
        elif family == "vg2":
            v = VG2(float(d["sigma2"]), float(d["r"]), float(d["theta"]))
        else:
            raise ParameterError(f"unknown family {family!r}")
    except KeyError as exc:
        raise ParameterError(f"missing field {exc.args[0]!r} for family {family!r}") from None
    except TypeError as exc:
        raise ParameterError(str(exc)) from None
    return vg_convert(v).to_tsd()


def load_params(path: Union[str, Path]) -> TsdParams:
    with open(path) as fh:
        return params_from_dict(json.load(fh))
