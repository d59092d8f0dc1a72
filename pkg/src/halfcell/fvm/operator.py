"""Cell-centered finite-volume space operator on the voxel grid.

The packed state is ``x = [c-block, phi-block]``; the operator value has the
same layout. Concentration rows carry the divergence of the ion flux in
mol/(m^3 s); potential rows carry the divergence of the current density
divided by the Faraday constant, which puts both blocks in the same units
and keeps the system reasonably scaled.

The operator decomposes exactly as

    A(x; mu) = b_const + mu * b_bnd + A_lin x + A_bv(x) + A_1c(x)

where ``A_bv`` collects every interface-current term (intercalation,
counter-electrode exchange, plating/stripping) and ``A_1c`` the
chemical-potential coupling on electrolyte-electrolyte faces. Both nonlinear
parts are face-local and expose restricted evaluation for empirical
interpolation. The chemical-potential flux integrates (1/c) grad c exactly
as grad(log c) across each face.

Interface sign convention: the face normal points from solid into
electrolyte and positive interface current is anodic, so a positive current
adds to the solid-side rows and drains the electrolyte-side rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..echem.interfaces import InterfaceKind, interface_kind
from ..echem.kinetics import f_pre, f_pre_deriv, ocp, ocp_slope
from ..echem.params import MaterialParams
from ..errors import ModelError, NumericsError
from ..microgen.phases import N_PHASES, Phase
from .dofmap import Dofmap

_KIND_CODE = {
    InterfaceKind.CONTINUOUS: 0,
    InterfaceKind.BV_GRAPHITE: 1,
    InterfaceKind.EXCHANGE_COUNTER: 2,
    InterfaceKind.STRIPPING: 3,
    InterfaceKind.BLOCKING: 4,
    InterfaceKind.CONDUCTOR_CONTACT: 5,
    InterfaceKind.FORBIDDEN: 6,
}

_KIND_TABLE = np.empty((N_PHASES, N_PHASES), dtype=np.int8)
for _a in Phase:
    for _b in Phase:
        _KIND_TABLE[_a, _b] = _KIND_CODE[interface_kind(_a, _b)]


@dataclass
class BoundaryDrive:
    """Applied current density (A/m^2) on the working-collector outer face.

    The counter-collector outer face is the phi = 0 reference by construction.
    Positive mu delithiates the working electrode.
    """

    mu: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise ModelError("applied current density must be finite")


def _phase_sigma(p: MaterialParams) -> np.ndarray:
    """Electric/ionic conductivity per phase label."""
    sig = np.empty(N_PHASES)
    sig[Phase.ELECTROLYTE] = p.kappa_el
    sig[Phase.GRAPHITE] = p.sigma_gr
    sig[Phase.PLATED_LI] = p.sigma_pl
    sig[Phase.LI_FOIL] = p.sigma_li
    sig[Phase.COLLECTOR_WORKING] = p.sigma_cc
    sig[Phase.COLLECTOR_COUNTER] = p.sigma_cc
    return sig


class _Coo:
    def __init__(self):
        self.rows, self.cols, self.vals = [], [], []

    def add(self, r, c, v):
        self.rows.append(np.asarray(r, dtype=np.int64))
        self.cols.append(np.asarray(c, dtype=np.int64))
        self.vals.append(np.asarray(v, dtype=float))

    def add_sym(self, i, j, g):
        # row_i += g*(x_i - x_j); row_j += g*(x_j - x_i)
        self.add(i, i, g)
        self.add(i, j, -g)
        self.add(j, j, g)
        self.add(j, i, -g)

    def matrix(self, n):
        if not self.rows:
            return sp.csr_matrix((n, n))
        return sp.csr_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(n, n))


class SystemOperator:
    """Assembled FV operator with exact affine/nonlinear decomposition."""

    def __init__(self, dofmap: Dofmap, params: MaterialParams):
        self.dof = dofmap
        self.p = params
        self.h = dofmap.grid.voxel_size * 1e-6      # m
        self.face_area = self.h ** 2
        self.voxel_volume = self.h ** 3
        self.n_const = params.n_const(self.face_area)
        self._scale = 1.0 / (params.constants.F * self.h)
        self._build()

    # --- assembly ---------------------------------------------------------

    def _build(self):
        dof, p, h = self.dof, self.p, self.h
        F = p.constants.F
        labels = dof.grid.labels
        flat = labels.ravel().astype(np.int64)
        nz, ny, nx = labels.shape
        n = dof.n_total

        plated_slot = np.full(flat.size, -1, dtype=np.int64)
        plated_slot[dof.plated_voxels] = np.arange(dof.n_plated)

        idx = np.arange(flat.size).reshape(labels.shape)
        lo_list, hi_list = [], []
        for axis in range(3):
            lo_list.append(idx.take(np.arange(labels.shape[axis] - 1), axis=axis).ravel())
            hi_list.append(idx.take(np.arange(1, labels.shape[axis]), axis=axis).ravel())
        lo = np.concatenate(lo_list)
        hi = np.concatenate(hi_list)

        pa, pb = flat[lo], flat[hi]
        kind = _KIND_TABLE[pa, pb]
        gnd_lo = dof.p_dof[lo] < 0
        gnd_hi = dof.p_dof[hi] < 0

        if np.any((kind == 6) & ~(gnd_lo & gnd_hi)):
            bad = np.flatnonzero((kind == 6) & ~(gnd_lo & gnd_hi))[0]
            raise ModelError(
                f"{Phase(pa[bad]).name} and {Phase(pb[bad]).name} voxels share a face; "
                "this adjacency is geometrically forbidden")

        sig = _phase_sigma(p)
        gF2 = 1.0 / (F * h * h)
        xci = dof.c_dof
        xpi = dof.n_c + dof.p_dof   # invalid where p_dof < 0

        lin = _Coo()

        interior = ~gnd_lo & ~gnd_hi
        one_gnd = gnd_lo ^ gnd_hi

        # faces with one grounded side: only conduction closures survive
        if np.any(one_gnd):
            sel = one_gnd & np.isin(kind, (0, 5))
            live = np.where(gnd_lo[sel], hi[sel], lo[sel])
            g = 2.0 * sig[pa[sel]] * sig[pb[sel]] / (sig[pa[sel]] + sig[pb[sel]]) * gF2
            lin.add(xpi[live], xpi[live], g)   # phi_ground = 0 leaves the diagonal
            if np.any(one_gnd & np.isin(kind, (1, 2, 3))):
                raise ModelError("interface kinetics on a grounded face are not supported")

        cont = interior & (kind == 0)
        gr_gr = cont & (pa == Phase.GRAPHITE)
        el_el = cont & (pa == Phase.ELECTROLYTE)
        other_solid = cont & ~gr_gr & ~el_el

        if np.any(gr_gr):
            lin.add_sym(xci[lo[gr_gr]], xci[hi[gr_gr]], np.full(gr_gr.sum(), p.d_gr / h ** 2))
            lin.add_sym(xpi[lo[gr_gr]], xpi[hi[gr_gr]], np.full(gr_gr.sum(), p.sigma_gr * gF2))
        if np.any(other_solid):
            lin.add_sym(xpi[lo[other_solid]], xpi[hi[other_solid]], sig[pa[other_solid]] * gF2)

        contact = interior & (kind == 5)
        if np.any(contact):
            g = 2.0 * sig[pa[contact]] * sig[pb[contact]] / (sig[pa[contact]] + sig[pb[contact]]) * gF2
            lin.add_sym(xpi[lo[contact]], xpi[hi[contact]], g)

        # electrolyte bulk: diffusion, conduction, migration and the 1/c faces
        e_lo, e_hi = lo[el_el], hi[el_el]
        self.elel_xc_i = xci[e_lo]
        self.elel_xc_j = xci[e_hi]
        self.elel_xp_i = xpi[e_lo]
        self.elel_xp_j = xpi[e_hi]
        if e_lo.size:
            ne = e_lo.size
            lin.add_sym(self.elel_xc_i, self.elel_xc_j, np.full(ne, p.d_el / h ** 2))
            lin.add_sym(self.elel_xp_i, self.elel_xp_j, np.full(ne, p.kappa_el * gF2))
            gM = np.full(ne, p.t_plus * p.kappa_el * gF2)
            ic, jc, ip, jp = self.elel_xc_i, self.elel_xc_j, self.elel_xp_i, self.elel_xp_j
            lin.add(ic, ip, gM)
            lin.add(ic, jp, -gM)
            lin.add(jc, jp, gM)
            lin.add(jc, ip, -gM)

        # interface faces, oriented solid first
        def orient(mask):
            a_is_el = pa[mask] == Phase.ELECTROLYTE
            so = np.where(a_is_el, hi[mask], lo[mask])
            el = np.where(a_is_el, lo[mask], hi[mask])
            return so, el

        so, el = orient(interior & (kind == 1))
        self.bv_xc_gr, self.bv_xc_el = xci[so], xci[el]
        self.bv_xp_gr, self.bv_xp_el = xpi[so], xpi[el]

        so, el = orient(interior & (kind == 2))
        self.ce_xp_fo, self.ce_xc_el, self.ce_xp_el = xpi[so], xci[el], xpi[el]

        so, el = orient(interior & (kind == 3))
        self.strip_xp_pl, self.strip_xc_el, self.strip_xp_el = xpi[so], xci[el], xpi[el]
        self.strip_slot = plated_slot[so]

        self.A_lin = lin.matrix(n)
        self.b_const = np.zeros(n)

        # chemical-potential face coefficient (t+ - 1 makes it negative)
        self.gX = (p.kappa_el * (p.t_plus - 1.0) * p.constants.R * p.temperature
                   * (1.0 + p.dlnf_dlnc)) / (F ** 2 * h ** 2)

        # applied-current rows: working-collector voxels on the z = 0 face
        bnd_vox = np.flatnonzero((flat == Phase.COLLECTOR_WORKING)
                                 & (np.arange(flat.size) < ny * nx))
        self.b_bnd = np.zeros(n)
        if bnd_vox.size:
            self.b_bnd[xpi[bnd_vox]] = -1.0 / (F * h)
        self.n_drive_faces = int(bnd_vox.size)
        self.drive_area = bnd_vox.size * self.face_area   # m^2

        # inverse map row -> voxel for error reporting
        self._voxel_of_row = np.full(n, -1, dtype=np.int64)
        cvox = np.flatnonzero(dof.c_dof >= 0)
        self._voxel_of_row[dof.c_dof[cvox]] = cvox
        pvox = np.flatnonzero(dof.p_dof >= 0)
        self._voxel_of_row[dof.n_c + dof.p_dof[pvox]] = pvox

    # --- per-face kinetics and partial derivatives --------------------------

    def _bv_values(self, c_gr, c_el, phi_gr, phi_el, want_jac=False):
        p = self.p
        vt = p.thermal_voltage_2
        eta = phi_gr - ocp(c_gr, p) - phi_el
        root = np.sqrt(c_gr * c_el)
        sh = np.sinh(eta / vt)
        i = 2.0 * p.i00_grel * root * sh
        if not want_jac:
            return i, None
        ch = np.cosh(eta / vt)
        di_dcg = 2.0 * p.i00_grel * (0.5 * np.sqrt(c_el / c_gr) * sh
                                     - root * ch * ocp_slope(c_gr, p) / vt)
        di_dce = p.i00_grel * np.sqrt(c_gr / c_el) * sh
        di_dpg = 2.0 * p.i00_grel * root * ch / vt
        return i, (di_dcg, di_dce, di_dpg)

    def _ce_values(self, phi_fo, phi_el, want_jac=False):
        p = self.p
        vt = p.thermal_voltage_2
        eta = phi_fo - phi_el
        i = 2.0 * p.i00_ceel * np.sinh(eta / vt)
        if not want_jac:
            return i, None
        return i, (2.0 * p.i00_ceel * np.cosh(eta / vt) / vt,)

    def _strip_values(self, c_el, phi_pl, phi_el, n_face, want_jac=False, beta=0.0):
        """Stripping current per face; optionally implicit in the inventory.

        With ``beta = dt * a / F > 0`` the regularization factor is evaluated
        at the end-of-step inventory ``n - beta * i``, which makes the
        current the root of a strictly monotone scalar equation. That keeps
        the explicit inventory update nonnegative for any step size; beta = 0
        recovers the frozen-inventory (fully explicit splitting) form.
        """
        p = self.p
        vt = p.thermal_voltage_2
        arg = (phi_pl - phi_el) / vt
        ex, emx = np.exp(arg), np.exp(-arg)
        root = np.sqrt(c_el)
        E = p.i00_plel * root
        if beta == 0.0:
            fp = f_pre(n_face, self.n_const)
            i = E * (fp * ex - emx)
            if not want_jac:
                return i, None
            di_dce = 0.5 * i / c_el
            di_dpp = E * (fp * ex + emx) / vt
            return i, (di_dce, di_dpp)

        # solve g(i) = i - E (f(n - beta i) e^x - e^-x) = 0; g is increasing
        lo = -E * emx
        hi = E * (ex - emx)
        fp0 = f_pre(n_face, self.n_const)
        i = np.clip(E * (fp0 * ex - emx), lo, hi)
        for _ in range(60):
            n_end = np.maximum(n_face - beta * i, 0.0)
            f = f_pre(n_end, self.n_const)
            fd = np.where(n_end > 0, f_pre_deriv(n_end, self.n_const), 0.0)
            g = i - E * (f * ex - emx)
            gi = 1.0 + E * ex * fd * beta
            i_new = np.clip(i - g / gi, lo, hi)
            if np.max(np.abs(i_new - i)) <= 1e-14 * (1.0 + np.max(np.abs(i_new))):
                i = i_new
                break
            i = i_new
        n_end = np.maximum(n_face - beta * i, 0.0)
        f = f_pre(n_end, self.n_const)
        fd = np.where(n_end > 0, f_pre_deriv(n_end, self.n_const), 0.0)
        gi = 1.0 + E * ex * fd * beta
        if not want_jac:
            return i, None
        # implicit-function derivatives with f held at its converged value
        di_dce = (0.5 / c_el) * E * (f * ex - emx) / gi
        di_dpp = E * (f * ex + emx) / vt / gi
        return i, (di_dce, di_dpp)

    def _elel_values(self, c_i, c_j, want_jac=False):
        with np.errstate(invalid="ignore", divide="ignore"):
            q = self.gX * (np.log(c_j) - np.log(c_i))
        if not want_jac:
            return q, None
        return q, (-self.gX / c_i, self.gX / c_j)

    # --- full evaluations ----------------------------------------------------

    def apply_bv(self, x: np.ndarray, n_pl: np.ndarray, beta: float = 0.0) -> np.ndarray:
        """All interface-current terms (intercalation, exchange, stripping)."""
        out = np.zeros(self.dof.n_total)
        sc = self._scale
        with np.errstate(invalid="ignore"):
            if self.bv_xc_gr.size:
                i, _ = self._bv_values(x[self.bv_xc_gr], x[self.bv_xc_el],
                                       x[self.bv_xp_gr], x[self.bv_xp_el])
                q = sc * i
                np.add.at(out, self.bv_xc_gr, q)
                np.add.at(out, self.bv_xp_gr, q)
                np.add.at(out, self.bv_xc_el, -q)
                np.add.at(out, self.bv_xp_el, -q)
            if self.ce_xp_fo.size:
                i, _ = self._ce_values(x[self.ce_xp_fo], x[self.ce_xp_el])
                q = sc * i
                np.add.at(out, self.ce_xp_fo, q)
                np.add.at(out, self.ce_xc_el, -q)
                np.add.at(out, self.ce_xp_el, -q)
            if self.strip_slot.size:
                i, _ = self._strip_values(x[self.strip_xc_el], x[self.strip_xp_pl],
                                          x[self.strip_xp_el], n_pl[self.strip_slot], beta=beta)
                q = sc * i
                np.add.at(out, self.strip_xp_pl, q)
                np.add.at(out, self.strip_xc_el, -q)
                np.add.at(out, self.strip_xp_el, -q)
        return out

    def apply_one_over_c(self, x: np.ndarray) -> np.ndarray:
        """Chemical-potential coupling on electrolyte-electrolyte faces."""
        out = np.zeros(self.dof.n_total)
        if self.elel_xc_i.size == 0:
            return out
        q, _ = self._elel_values(x[self.elel_xc_i], x[self.elel_xc_j])
        tp = self.p.t_plus
        np.add.at(out, self.elel_xp_i, -q)
        np.add.at(out, self.elel_xp_j, q)
        np.add.at(out, self.elel_xc_i, -tp * q)
        np.add.at(out, self.elel_xc_j, tp * q)
        return out

    def apply_lin(self, x: np.ndarray) -> np.ndarray:
        return self.A_lin @ x

    def apply_const(self, x: np.ndarray = None) -> np.ndarray:
        return self.b_const.copy()

    def apply_bnd(self, x: np.ndarray = None) -> np.ndarray:
        return self.b_bnd.copy()

    def apply(self, x: np.ndarray, n_pl: np.ndarray, mu: float, beta: float = 0.0) -> np.ndarray:
        """Full space operator A_mu(x)."""
        out = (self.b_const + mu * self.b_bnd + self.A_lin @ x
               + self.apply_bv(x, n_pl, beta=beta) + self.apply_one_over_c(x))
        if not np.all(np.isfinite(out)):
            bad = int(np.flatnonzero(~np.isfinite(out))[0])
            vox = self.dof.voxel_coords(self._voxel_of_row[bad])
            raise NumericsError(f"operator produced a non-finite value at voxel {vox}")
        return out

    def strip_face_currents(self, x: np.ndarray, n_pl: np.ndarray,
                            beta: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """(stripping current A/m^2, plated slot) for every stripping face."""
        if self.strip_slot.size == 0:
            return np.empty(0), self.strip_slot
        i, _ = self._strip_values(x[self.strip_xc_el], x[self.strip_xp_pl],
                                  x[self.strip_xp_el], n_pl[self.strip_slot], beta=beta)
        return i, self.strip_slot

    # --- Jacobian -------------------------------------------------------------

    def _jac_entries_bv(self, gather, sel=slice(None)):
        xc_gr, xc_el = self.bv_xc_gr[sel], self.bv_xc_el[sel]
        xp_gr, xp_el = self.bv_xp_gr[sel], self.bv_xp_el[sel]
        if xc_gr.size == 0:
            return []
        _, (di_dcg, di_dce, di_dpg) = self._bv_values(
            gather(xc_gr), gather(xc_el), gather(xp_gr), gather(xp_el), want_jac=True)
        sc = self._scale
        ent = []
        for rws, sign in ((xc_gr, 1.0), (xp_gr, 1.0), (xc_el, -1.0), (xp_el, -1.0)):
            ent.append((rws, xc_gr, sign * sc * di_dcg))
            ent.append((rws, xc_el, sign * sc * di_dce))
            ent.append((rws, xp_gr, sign * sc * di_dpg))
            ent.append((rws, xp_el, -sign * sc * di_dpg))
        return ent

    def _jac_entries_ce(self, gather, sel=slice(None)):
        xp_fo, xc_el, xp_el = self.ce_xp_fo[sel], self.ce_xc_el[sel], self.ce_xp_el[sel]
        if xp_fo.size == 0:
            return []
        _, (di_dpf,) = self._ce_values(gather(xp_fo), gather(xp_el), want_jac=True)
        sc = self._scale
        ent = []
        for rws, sign in ((xp_fo, 1.0), (xc_el, -1.0), (xp_el, -1.0)):
            ent.append((rws, xp_fo, sign * sc * di_dpf))
            ent.append((rws, xp_el, -sign * sc * di_dpf))
        return ent

    def _jac_entries_strip(self, gather, n_pl, sel=slice(None), beta=0.0):
        xc_el, xp_pl, xp_el = self.strip_xc_el[sel], self.strip_xp_pl[sel], self.strip_xp_el[sel]
        slot = self.strip_slot[sel]
        if slot.size == 0:
            return []
        _, (di_dce, di_dpp) = self._strip_values(
            gather(xc_el), gather(xp_pl), gather(xp_el), n_pl[slot], want_jac=True, beta=beta)
        sc = self._scale
        ent = []
        for rws, sign in ((xp_pl, 1.0), (xc_el, -1.0), (xp_el, -1.0)):
            ent.append((rws, xc_el, sign * sc * di_dce))
            ent.append((rws, xp_pl, sign * sc * di_dpp))
            ent.append((rws, xp_el, -sign * sc * di_dpp))
        return ent

    def _jac_entries_elel(self, gather, sel=slice(None)):
        xc_i, xc_j = self.elel_xc_i[sel], self.elel_xc_j[sel]
        xp_i, xp_j = self.elel_xp_i[sel], self.elel_xp_j[sel]
        if xc_i.size == 0:
            return []
        _, (dq_dci, dq_dcj) = self._elel_values(gather(xc_i), gather(xc_j), want_jac=True)
        tp = self.p.t_plus
        ent = []
        for rws, sign in ((xp_i, -1.0), (xp_j, 1.0), (xc_i, -tp), (xc_j, tp)):
            ent.append((rws, xc_i, sign * dq_dci))
            ent.append((rws, xc_j, sign * dq_dcj))
        return ent

    def jacobian(self, x: np.ndarray, n_pl: np.ndarray, mu: float,
                 beta: float = 0.0) -> sp.csr_matrix:
        """Analytic Jacobian of :meth:`apply` at the given state."""
        n = self.dof.n_total
        gather = lambda ids: x[ids]
        entries = (self._jac_entries_bv(gather) + self._jac_entries_ce(gather)
                   + self._jac_entries_strip(gather, n_pl, beta=beta) + self._jac_entries_elel(gather))
        if not entries:
            return self.A_lin.copy()
        rows = np.concatenate([e[0] for e in entries])
        cols = np.concatenate([e[1] for e in entries])
        vals = np.concatenate([np.broadcast_to(e[2], e[0].shape) for e in entries])
        J_nl = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        return (self.A_lin + J_nl).tocsr()

    # --- empirical-interpolation support ---------------------------------------

    def sub_operator(self, name: str) -> "SubOperatorView":
        if name not in ("bv", "one_over_c"):
            raise KeyError(name)
        return SubOperatorView(self, name)


class SubOperatorView:
    """Uniform full/restricted access to one nonlinear sub-operator."""

    def __init__(self, op: SystemOperator, which: str):
        self.op = op
        self.which = which

    @property
    def dim(self) -> int:
        return self.op.dof.n_total

    def apply(self, x: np.ndarray, n_pl: np.ndarray, beta: float = 0.0) -> np.ndarray:
        if self.which == "bv":
            return self.op.apply_bv(x, n_pl, beta=beta)
        return self.op.apply_one_over_c(x)

    def _families(self):
        """(name, row target arrays, input col arrays) per face family."""
        op = self.op
        if self.which == "bv":
            fams = []
            if op.bv_xc_gr.size:
                fams.append(("bv", (op.bv_xc_gr, op.bv_xp_gr, op.bv_xc_el, op.bv_xp_el),
                             (op.bv_xc_gr, op.bv_xc_el, op.bv_xp_gr, op.bv_xp_el)))
            if op.ce_xp_fo.size:
                fams.append(("ce", (op.ce_xp_fo, op.ce_xc_el, op.ce_xp_el),
                             (op.ce_xp_fo, op.ce_xp_el)))
            if op.strip_slot.size:
                fams.append(("strip", (op.strip_xp_pl, op.strip_xc_el, op.strip_xp_el),
                             (op.strip_xc_el, op.strip_xp_pl, op.strip_xp_el)))
            return fams
        if op.elel_xc_i.size == 0:
            return []
        return [("elel", (op.elel_xp_i, op.elel_xp_j, op.elel_xc_i, op.elel_xc_j),
                 (op.elel_xc_i, op.elel_xc_j))]

    def output_dofs(self) -> np.ndarray:
        rows = [r for _, rs, _ in self._families() for r in rs]
        if not rows:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(rows))

    def source_dofs(self, out_rows) -> np.ndarray:
        """Input DOFs needed to evaluate the sub-operator at ``out_rows``."""
        out_rows = np.unique(np.asarray(out_rows, dtype=np.int64))
        needed = []
        for _, row_arrays, col_arrays in self._families():
            touch = np.zeros(row_arrays[0].size, dtype=bool)
            for r in row_arrays:
                touch |= np.isin(r, out_rows)
            for c in col_arrays:
                needed.append(c[touch])
        if not needed:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(needed))

    def restricted(self, out_rows) -> "RestrictedSubOperator":
        return RestrictedSubOperator(self, np.unique(np.asarray(out_rows, dtype=np.int64)))


class RestrictedSubOperator:
    """Evaluates selected output rows of a sub-operator from a small stencil.

    ``stencil`` lists the state DOFs the selected rows depend on; its size is
    proportional to the number of rows and independent of the grid size. All
    gather/scatter index arrays are precomputed so that evaluation touches no
    full-order-length array.
    """

    def __init__(self, view: SubOperatorView, out_rows: np.ndarray):
        self.view = view
        self.op = view.op
        self.rows = out_rows
        self.stencil = view.source_dofs(out_rows)
        self._families = []
        for name, row_arrays, _ in view._families():
            touch = np.zeros(row_arrays[0].size, dtype=bool)
            for r in row_arrays:
                touch |= np.isin(r, out_rows)
            sel = np.flatnonzero(touch)
            if sel.size == 0:
                continue
            fam = {"name": name, "sel": sel}
            fam["rows_local"] = [self._local_rows(r[sel]) for r in row_arrays]
            self._families.append(fam)
        op = self.op
        # per-family gather positions into the stencil vector
        for fam in self._families:
            sel = fam["sel"]
            if fam["name"] == "bv":
                fam["gath"] = tuple(self._st(a[sel]) for a in
                                    (op.bv_xc_gr, op.bv_xc_el, op.bv_xp_gr, op.bv_xp_el))
            elif fam["name"] == "ce":
                fam["gath"] = tuple(self._st(a[sel]) for a in (op.ce_xp_fo, op.ce_xp_el))
            elif fam["name"] == "strip":
                fam["gath"] = tuple(self._st(a[sel]) for a in
                                    (op.strip_xc_el, op.strip_xp_pl, op.strip_xp_el))
                fam["slot"] = op.strip_slot[sel]
            else:
                fam["gath"] = tuple(self._st(a[sel]) for a in (op.elel_xc_i, op.elel_xc_j))

    def _st(self, ids):
        pos = np.searchsorted(self.stencil, ids)
        assert np.array_equal(self.stencil[pos], ids)
        return pos

    def _local_rows(self, ids):
        pos = np.searchsorted(self.rows, ids)
        pos_c = np.clip(pos, 0, self.rows.size - 1)
        valid = self.rows[pos_c] == ids
        return pos_c, valid

    def apply(self, x_st: np.ndarray, n_pl: np.ndarray, beta: float = 0.0) -> np.ndarray:
        """Selected-row values; ``x_st`` holds the stencil DOF values."""
        op = self.op
        out = np.zeros(self.rows.size)
        sc = op._scale
        for fam in self._families:
            name = fam["name"]
            if name == "bv":
                cg, ce_, pg, pe = (x_st[g] for g in fam["gath"])
                i, _ = op._bv_values(cg, ce_, pg, pe)
                contribs = (sc * i, sc * i, -sc * i, -sc * i)
            elif name == "ce":
                pf, pe = (x_st[g] for g in fam["gath"])
                i, _ = op._ce_values(pf, pe)
                contribs = (sc * i, -sc * i, -sc * i)
            elif name == "strip":
                ce_, pp, pe = (x_st[g] for g in fam["gath"])
                i, _ = op._strip_values(ce_, pp, pe, n_pl[fam["slot"]], beta=beta)
                contribs = (sc * i, -sc * i, -sc * i)
            else:
                ci, cj = (x_st[g] for g in fam["gath"])
                q, _ = op._elel_values(ci, cj)
                tp = op.p.t_plus
                contribs = (-q, q, -tp * q, tp * q)
            for (pos, valid), contr in zip(fam["rows_local"], contribs):
                np.add.at(out, pos[valid], contr[valid])
        return out

    def jacobian(self, x_st: np.ndarray, n_pl: np.ndarray, beta: float = 0.0) -> sp.csr_matrix:
        """Local Jacobian (selected rows x stencil DOFs)."""
        op = self.op
        rows, cols, vals = [], [], []
        gather = lambda ids: x_st[np.searchsorted(self.stencil, ids)]
        for fam in self._families:
            sel = fam["sel"]
            name = fam["name"]
            if name == "bv":
                entries = op._jac_entries_bv(gather, sel)
            elif name == "ce":
                entries = op._jac_entries_ce(gather, sel)
            elif name == "strip":
                entries = op._jac_entries_strip(gather, n_pl, sel, beta=beta)
            else:
                entries = op._jac_entries_elel(gather, sel)
            for r, c, v in entries:
                pos, valid = self._local_rows(r)
                rows.append(pos[valid])
                cols.append(np.searchsorted(self.stencil, c[valid]))
                vals.append(np.broadcast_to(v, r.shape)[valid])
        if not rows:
            return sp.csr_matrix((self.rows.size, self.stencil.size))
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.rows.size, self.stencil.size))
