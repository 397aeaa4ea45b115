"""Calibrated constants pinned after one-time calibration against normative routes."""

import json
from functools import lru_cache
from importlib import resources

__all__ = ["calibrated", "hecke_bochner_constant", "special_heat_constant"]


@lru_cache(maxsize=1)
def calibrated():
    text = resources.files("riesz_hermite").joinpath("calibrated_constants.json").read_text()
    return json.loads(text)


def special_heat_constant(d):
    """Constant c_d in the closed form c_d (sinh t)^{-d} exp(-|z|^2 coth(t) / 4)."""
    try:
        return calibrated()["special_heat_closed_form_constant"][str(int(d))]
    except KeyError:
        raise ValueError(f"unsupported-dimension: no calibrated special heat constant for d={d}") from None


def hecke_bochner_constant(d):
    try:
        return calibrated()["hecke_bochner_constant"][str(int(d))]
    except KeyError:
        raise ValueError(f"unsupported-dimension: no calibrated Hecke-Bochner constant for d={d}") from None
