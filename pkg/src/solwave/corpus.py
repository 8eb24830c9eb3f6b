"""Builtin equations and the benchmark corpus."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .equation_model import PdeEquation, parse_equation

BURGERS = "param nu\ndt(u) + u*dx(u) - nu*dx(dx(u)) = 0"

# Written with time reversed so that xi = x - v t gives the reduced form
# (K - v) u' - (v^2 sigma/2) u'' = 0 with K the effective advection speed.
DRP = "param sigma, K\ndt(u) - (sigma/2)*dt(dt(u)) + K*dx(u) = 0"

# The forward-time transcription; its reduction carries +v u' instead.
DRP_FORWARD = "param sigma, K\n-dt(u) - (sigma/2)*dt(dt(u)) + K*dx(u) = 0"

CORPUS = {
    "burgers": BURGERS,
    "drp": DRP,
    "kdv": "param d\ndt(u) + u*dx(u) + d*dx(dx(dx(u))) = 0",
    "mkdv": "param d\ndt(u) + u^2*dx(u) + d*dx(dx(dx(u))) = 0",
    "burgers-kdv": "param nu, d\ndt(u) + u*dx(u) - nu*dx(dx(u)) + d*dx(dx(dx(u))) = 0",
    "advection-diffusion": "param a, nu\ndt(u) + a*dx(u) - nu*dx(dx(u)) = 0",
    "flat": "dx(dx(u)) = 0",
}

BUILTINS = ("burgers", "drp")

# Kink profile quoted for the DRP equation: v = K, V1 = 0,
# U1 = -C/(2 C1 v^2 sigma), V0 and C1 free.
DRP_CLAIMED_PROFILE = "V0 - C/(2*C1*v^2*sigma)*tanh(C1*xi)"


@dataclass(frozen=True)
class DrpConfig:
    """Scheme data behind the DRP advection speed ``K = 2 sigma/(mu re_h) * sum k gamma_k``."""

    m: int
    gamma: tuple
    sigma: Fraction
    mu: Fraction
    re_h: Fraction

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if len(self.gamma) != self.m:
            raise ValueError(f"expected {self.m} gamma coefficients, got {len(self.gamma)}")
        if self.mu == 0 or self.re_h == 0:
            raise ValueError("mu and re_h must be nonzero")
        object.__setattr__(self, "gamma", tuple(Fraction(g) for g in self.gamma))
        for name in ("sigma", "mu", "re_h"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @property
    def K(self) -> Fraction:
        s = sum(k * g for k, g in enumerate(self.gamma, start=1))
        return 2 * self.sigma / (self.mu * self.re_h) * s

    def expanded_source(self) -> str:
        gammas = [f"gamma{k}" for k in range(1, self.m + 1)]
        decl = [f"sigma = {self.sigma}", f"mu = {self.mu}", f"reh = {self.re_h}"]
        decl += [f"{n} = {g}" for n, g in zip(gammas, self.gamma)]
        total = " + ".join(f"{k}*{n}" for k, n in enumerate(gammas, start=1))
        return (f"param {', '.join(decl)}\n"
                f"dt(u) - (sigma/2)*dt(dt(u)) + (2*sigma/(mu*reh))*({total})*dx(u) = 0")

    def collapsed_source(self) -> str:
        return f"param sigma = {self.sigma}, K = {self.K}\n{DRP.splitlines()[1]}"


def load(name: str, drp: DrpConfig | None = None, expanded: bool = True) -> PdeEquation:
    """Parse a corpus equation; ``drp`` pins the DRP coefficients to numbers."""
    if name not in CORPUS:
        raise KeyError(f"unknown equation {name!r}; choose from {', '.join(CORPUS)}")
    if name == "drp" and drp is not None:
        return parse_equation(drp.expanded_source() if expanded else drp.collapsed_source())
    return parse_equation(CORPUS[name])


__all__ = ["BUILTINS", "BURGERS", "CORPUS", "DRP", "DRP_CLAIMED_PROFILE", "DRP_FORWARD", "DrpConfig", "load"]
