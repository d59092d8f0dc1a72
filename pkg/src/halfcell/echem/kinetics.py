"""Pointwise physics closures: chemical potential slope, OCP, interface currents.

Sign conventions: the interface normal points from solid into electrolyte,
and a positive interface current is anodic (delithiation of graphite,
stripping of plated lithium). All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError
from .params import MaterialParams


def dmu_dc(c_el, p: MaterialParams):
    """Derivative of the electrolyte chemical potential: R T (1 + dlnf/dlnc) / c."""
    c_el = np.asarray(c_el, dtype=float)
    if np.any(c_el <= 0):
        raise DomainError("dmu_dc requires positive electrolyte concentration")
    out = (p.constants.R * p.temperature / c_el) * (1.0 + p.dlnf_dlnc)
    return out if out.ndim else float(out)


def ocp(c_gr, p: MaterialParams):
    """Open-circuit potential of graphite at concentration ``c_gr``.

    Piecewise-linear in state of charge, clamped at the table ends.
    """
    soc = np.asarray(c_gr, dtype=float) / p.c_gr_max
    out = np.interp(soc, p._ocp_soc, p._ocp_v)
    return out if out.ndim else float(out)


def ocp_slope(c_gr, p: MaterialParams):
    """d(OCP)/d(c_gr), piecewise constant; zero outside the table range."""
    soc = np.asarray(c_gr, dtype=float) / p.c_gr_max
    knots, vals = p._ocp_soc, p._ocp_v
    seg = np.clip(np.searchsorted(knots, soc, side="right") - 1, 0, len(knots) - 2)
    slope = (vals[seg + 1] - vals[seg]) / (knots[seg + 1] - knots[seg]) / p.c_gr_max
    slope = np.where((soc < knots[0]) | (soc > knots[-1]), 0.0, slope)
    return slope if slope.ndim else float(slope)


def bv_graphite(c_gr, c_el, phi_gr, phi_el, p: MaterialParams):
    """Intercalation current density at a graphite|electrolyte interface.

    i = 2 i00 sqrt(c_gr c_el) sinh(F eta / 2RT), eta = phi_gr - U0(c_gr) - phi_el.
    The common (c_max - c)^alpha prefactor is deliberately absent.
    """
    c_gr = np.asarray(c_gr, dtype=float)
    c_el = np.asarray(c_el, dtype=float)
    if np.any(c_gr <= 0) or np.any(c_el <= 0):
        raise DomainError("bv_graphite requires positive concentrations")
    eta = np.asarray(phi_gr) - ocp(c_gr, p) - np.asarray(phi_el)
    out = 2.0 * p.i00_grel * np.sqrt(c_gr * c_el) * np.sinh(eta / p.thermal_voltage_2)
    return out if out.ndim else float(out)


def exchange_counter(phi_ce, phi_el, p: MaterialParams):
    """Exchange current density at the lithium-foil counter electrode.

    i = 2 i00 sinh(F (phi_ce - phi_el) / 2RT); concentration independent by design
    so the counter electrode perturbs the working electrode as little as possible.
    """
    eta = np.asarray(phi_ce, dtype=float) - np.asarray(phi_el, dtype=float)
    out = 2.0 * p.i00_ceel * np.sinh(eta / p.thermal_voltage_2)
    return out if out.ndim else float(out)


def f_pre(n_li, n_const):
    """Regularization factor n^4 / (n_const^4 + n^4) in [0, 1).

    Suppresses the anodic (stripping) branch as the plated inventory vanishes.
    """
    n_li = np.asarray(n_li, dtype=float)
    n4 = n_li ** 4
    out = n4 / (n_const ** 4 + n4)
    return out if out.ndim else float(out)


def f_pre_deriv(n_li, n_const):
    """d f_pre / d n_li = 4 n^3 n_const^4 / (n_const^4 + n^4)^2."""
    n_li = np.asarray(n_li, dtype=float)
    denom = (n_const ** 4 + n_li ** 4) ** 2
    out = 4.0 * n_li ** 3 * n_const ** 4 / denom
    return out if out.ndim else float(out)


def stripping_current(c_el, phi_pl, phi_el, n_li, n_const, p: MaterialParams):
    """Plating/stripping current density at a plated-lithium|electrolyte interface.

    i = i00 sqrt(c_el) (f_pre(n) exp(F eta / 2RT) - exp(-F eta / 2RT)),
    eta = phi_pl - phi_el. Positive values strip, negative values plate;
    with n = 0 only the plating branch survives.
    """
    c_el = np.asarray(c_el, dtype=float)
    if np.any(c_el <= 0):
        raise DomainError("stripping_current requires positive electrolyte concentration")
    x = (np.asarray(phi_pl) - np.asarray(phi_el)) / p.thermal_voltage_2
    out = p.i00_plel * np.sqrt(c_el) * (f_pre(n_li, n_const) * np.exp(x) - np.exp(-x))
    return out if out.ndim else float(out)
