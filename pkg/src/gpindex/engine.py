"""Generic weighted-gap poverty index and the built-in configurations.

A configuration evaluates

    delta( A / (n * B) * sum_{j <= Q} w(mu1*n + mu2*Q - mu3*j + mu4) * d(gap_j) )

where ``gap_j = (Z - Y_(j)) / Z`` over the ``Q`` poor incomes.  All pieces
come from small closed catalogues so a configuration round-trips through
JSON.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sample import IncomeSample, IndexId, PovertyContext, _as_index

__all__ = [
    "Transform",
    "GPIConfig",
    "WeightProfile",
    "A_KINDS",
    "B_KINDS",
    "evaluate_gpi",
    "evaluate_gpi_sorted",
    "builtin_config",
    "weight_profile",
]

# normalizers; alpha comes from the gap deformation, k from the weight
A_KINDS = ("count", "ray", "chu", "shorrocks", "thon")
B_KINDS = ("count", "power_sum", "shorrocks", "thon")
_TRANSFORM_KINDS = {
    "delta": ("identity", "power"),
    "w": ("constant", "power"),
    "d": ("identity", "power"),
}


@dataclass(frozen=True)
class Transform:
    """One of the scalar maps delta, w or d.

    ``param`` is the exponent: ``delta`` power means ``u ** (1/param)``,
    ``w`` power means ``u ** param`` and ``d`` power means ``u ** param``.
    """

    kind: str
    param: float | None = None


@dataclass(frozen=True)
class GPIConfig:
    delta: Transform = Transform("identity")
    w: Transform = Transform("constant")
    d: Transform = Transform("identity")
    A: str = "count"
    B: str = "count"
    mu: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        for slot, kinds in _TRANSFORM_KINDS.items():
            t = getattr(self, slot)
            if t.kind not in kinds:
                raise ValueError(f"{slot} kind must be one of {kinds}, got {t.kind!r}")
            if t.kind == "power":
                if t.param is None or not math.isfinite(t.param):
                    raise ValueError(f"{slot} power needs a finite exponent")
                if slot == "delta" and t.param <= 0:
                    raise ValueError("delta power exponent must be positive")
                if t.param < 0:
                    raise ValueError(f"{slot} power exponent must be non-negative")
        if self.A not in A_KINDS:
            raise ValueError(f"A must be one of {A_KINDS}, got {self.A!r}")
        if self.B not in B_KINDS:
            raise ValueError(f"B must be one of {B_KINDS}, got {self.B!r}")
        if self.A in ("ray", "chu") and self.d.kind != "power":
            raise ValueError(f"A={self.A} reads alpha from a power gap deformation")
        if self.B == "power_sum" and self.w.kind != "power":
            raise ValueError("B=power_sum reads k from a power weight")
        mu = tuple(float(m) for m in self.mu)
        if len(mu) != 4 or not all(math.isfinite(m) for m in mu):
            raise ValueError("mu must hold four finite reals")
        object.__setattr__(self, "mu", mu)

    @property
    def alpha(self) -> float:
        return 1.0 if self.d.kind == "identity" else self.d.param

    def to_dict(self) -> dict:
        return {
            "delta": {"kind": self.delta.kind, "alpha": self.delta.param},
            "w": {"kind": self.w.kind, "k": self.w.param},
            "d": {"kind": self.d.kind, "alpha": self.d.param},
            "A": {"kind": self.A},
            "B": {"kind": self.B},
            "mu": list(self.mu),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GPIConfig":
        return cls(
            delta=Transform(data["delta"]["kind"], data["delta"].get("alpha")),
            w=Transform(data["w"]["kind"], data["w"].get("k")),
            d=Transform(data["d"]["kind"], data["d"].get("alpha")),
            A=data["A"]["kind"],
            B=data["B"]["kind"],
            mu=tuple(data["mu"]),
        )


def _normalizer_A(cfg: GPIConfig, Q: int, n: int, g_over_Z: float | None) -> float:
    if cfg.A == "count":
        return float(Q)
    if cfg.A == "ray":
        if g_over_Z is None:
            raise ValueError("A=ray depends on the mean poverty gap, which was not supplied")
        return Q * g_over_Z ** (1.0 - cfg.alpha)
    if cfg.A == "chu":
        a = cfg.alpha
        return Q ** a / n ** (a - 1.0)
    if cfg.A == "shorrocks":
        return Q * (2.0 * n - Q) / n
    return Q * (n - Q + 1.0) / (n + 1.0)


def _normalizer_B(cfg: GPIConfig, Q: int, n: int) -> float:
    if cfg.B == "count":
        return float(Q)
    if cfg.B == "power_sum":
        return float(np.sum(np.arange(1, Q + 1, dtype=float) ** cfg.w.param))
    if cfg.B == "shorrocks":
        return Q * (2.0 * n - Q)
    return Q * (n - Q + 1.0) / 2.0


def _weights(cfg: GPIConfig, n: int, Q: int) -> np.ndarray:
    mu1, mu2, mu3, mu4 = cfg.mu
    j = np.arange(1, Q + 1, dtype=float)
    arg = mu1 * n + mu2 * Q - mu3 * j + mu4
    if np.any(arg < 0):
        raise ValueError(f"negative weight argument {arg.min():g} (config error)")
    if cfg.w.kind == "constant":
        return np.ones(Q)
    return arg ** cfg.w.param


def _coefficients(cfg: GPIConfig, n: int, Q: int, g_over_Z: float | None) -> np.ndarray:
    # c(n, Q, j) = A * w(.) / B
    B = _normalizer_B(cfg, Q, n)
    if not B > 0:
        raise ValueError(f"denominator B={B:g} must be positive when Q >= 1 (config error)")
    return _normalizer_A(cfg, Q, n, g_over_Z) * _weights(cfg, n, Q) / B


def _delta(cfg: GPIConfig, u: float) -> float:
    if cfg.delta.kind == "identity":
        return u
    return u ** (1.0 / cfg.delta.param)


def evaluate_gpi_sorted(cfg: GPIConfig, y: np.ndarray, Z: float) -> float:
    n = y.size
    Q = int(np.searchsorted(y, Z, side="left"))
    if Q == 0:
        return 0.0
    gaps = (Z - y[:Q]) / Z
    g_over_Z = float(np.mean(gaps)) if cfg.A == "ray" else None
    deformed = gaps if cfg.d.kind == "identity" else gaps ** cfg.d.param
    c = _coefficients(cfg, n, Q, g_over_Z)
    return _delta(cfg, float(np.sum(c * deformed)) / n)


def evaluate_gpi(cfg: GPIConfig, sample: IncomeSample, ctx: PovertyContext) -> float:
    """Evaluate a configuration on a sample; 0 when nobody is poor."""
    return evaluate_gpi_sorted(cfg, sample.incomes, ctx.Z)


def builtin_config(index) -> GPIConfig:
    """Configuration reproducing a named index.

    Watts and Chakravarty are reached by transforming incomes and using
    ``fgt(1)``; Takayama is not a weighted-gap index and raises.
    """
    index = _as_index(index)
    name = index.name
    if name == "fgt":
        return GPIConfig(d=Transform("power", index.alpha))
    if name == "ray":
        return GPIConfig(d=Transform("power", index.alpha), A="ray")
    if name == "chu":
        a = index.alpha
        return GPIConfig(delta=Transform("power", a), d=Transform("power", a), A="chu")
    if name in ("sen", "kakwani"):
        # weight (Q - j + 1)^k
        return GPIConfig(w=Transform("power", index.k), B="power_sum", mu=(0, 1, 1, 1))
    if name == "shorrocks":
        # weight 2n - 2j + 1
        return GPIConfig(w=Transform("power", 1.0), A="shorrocks", B="shorrocks", mu=(2, 0, 2, 1))
    if name == "thon":
        # weight n - j + 1
        return GPIConfig(w=Transform("power", 1.0), A="thon", B="thon", mu=(1, 0, 1, 1))
    if name == "takayama":
        raise ValueError("takayama is not in GPI family: it is not built on poverty gaps")
    raise ValueError(f"{index} has no direct GPI configuration; use an income transform with fgt(1)")


@dataclass(frozen=True)
class WeightProfile:
    """Step function equal to ``values[j-1]`` on ``((j-1)/n, j/n]`` and 0 past ``Q/n``."""

    n: int
    Q: int
    values: np.ndarray = field(repr=False)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        j = np.ceil(s * self.n).astype(int)
        inside = (j >= 1) & (j <= self.Q)
        out = np.zeros(s.shape)
        out[inside] = self.values[j[inside] - 1]
        return out if out.ndim else float(out)


def weight_profile(cfg: GPIConfig, n: int, Q: int, g_over_Z: float | None = None) -> WeightProfile:
    if not 1 <= Q <= n:
        raise ValueError(f"need 1 <= Q <= n, got Q={Q}, n={n}")
    return WeightProfile(n, Q, _coefficients(cfg, n, Q, g_over_Z))
