"""Country parameter presets (standard behavioral survey estimates)."""

from __future__ import annotations

from dataclasses import dataclass

from .cpt import CptParams


@dataclass(frozen=True)
class Preset:
    name: str
    params: CptParams
    default_n: int
    fixed_price: float | None = None


PRESETS = {
    "canada": Preset(
        name="canada",
        params=CptParams(alpha=0.42, beta=0.83, lam=1.62, gamma_plus=0.44, gamma_minus=0.60),
        default_n=10**9,
    ),
    "usa": Preset(
        name="usa",
        params=CptParams(alpha=0.42, beta=0.49, lam=1.36, gamma_plus=0.44, gamma_minus=0.71),
        default_n=10**8,
    ),
    "greece": Preset(
        name="greece",
        params=CptParams(alpha=0.50, beta=0.30, lam=1.29, gamma_plus=0.44, gamma_minus=0.82),
        default_n=10**9,
        fixed_price=2.0,
    ),
}
