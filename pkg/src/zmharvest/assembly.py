"""Two-detector density matrix at O(lambda^2) and its negativity."""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import oscillator, zeromode
from .config import SYMMETRY_RTOL, Coupling, DetectorKind, HarvestConfig, validate
from .errors import AsymmetricDetectors, EigenSolverFailure

# above this total excitation probability the truncated state is not trustworthy
PERTURBATIVE_LIMIT = 0.1


class PerturbativeWarning(UserWarning):
    pass


class BasisKind(str, Enum):
    QUBIT4 = "qubit4"
    OSCILLATOR6 = "oscillator6"


@dataclass(frozen=True)
class Part:
    """An element split into zero-mode and oscillator-mode contributions."""

    zm: complex = 0j
    osc: complex = 0j

    @property
    def total(self) -> complex:
        return self.zm + self.osc

    def without_zero_mode(self) -> "Part":
        return Part(0j, self.osc)


@dataclass(frozen=True)
class MatrixElements:
    L_AA: Part
    L_BB: Part
    L_AB: Part
    M: Part
    K_A: Part = Part()
    K_B: Part = Part()
    kind: DetectorKind = DetectorKind.QUBIT
    n_max_used: int = 0

    def without_zero_mode(self) -> "MatrixElements":
        fields = {f: getattr(self, f).without_zero_mode()
                  for f in ("L_AA", "L_BB", "L_AB", "M", "K_A", "K_B")}
        return dataclasses.replace(self, **fields)

    def scaled(self, factor) -> "MatrixElements":
        fields = {f: Part(getattr(self, f).zm * factor, getattr(self, f).osc * factor)
                  for f in ("L_AA", "L_BB", "L_AB", "M", "K_A", "K_B")}
        return dataclasses.replace(self, **fields)


@dataclass(frozen=True)
class JointState:
    basis: BasisKind
    matrix: np.ndarray
    order: str = "lambda^2"

    @property
    def dims(self):
        return (2, 2) if self.basis is BasisKind.QUBIT4 else (3, 3)


def assemble_elements(config: HarvestConfig) -> MatrixElements:
    """All density-matrix elements of a (validated or raw) configuration."""
    cfg = validate(config)
    a, b, fld, st = cfg.detector_a, cfg.detector_b, cfg.field, cfg.zero_mode
    deriv = fld.coupling is Coupling.DERIVATIVE
    osc_kind = a.kind is DetectorKind.OSCILLATOR
    if deriv:
        series = dict(L_AA=oscillator.l_osc_derivative(a, fld),
                      L_BB=oscillator.l_osc_derivative(b, fld),
                      L_AB=oscillator.l_osc_cross_derivative(a, b, fld),
                      M=oscillator.m_osc_derivative(a, b, fld))
        if osc_kind:
            series.update(K_A=oscillator.k_osc_derivative(a, fld),
                          K_B=oscillator.k_osc_derivative(b, fld))
    else:
        series = dict(L_AA=oscillator.l_osc(a, fld), L_BB=oscillator.l_osc(b, fld),
                      L_AB=oscillator.l_osc_cross(a, b, fld), M=oscillator.m_osc(a, b, fld))
        if osc_kind:
            series.update(K_A=oscillator.k_osc(a, fld), K_B=oscillator.k_osc(b, fld))

    zm = dict.fromkeys(series, 0j)
    if fld.include_zero_mode:
        if deriv:
            zm.update(L_AA=zeromode.l_zm_derivative(a, st, fld),
                      L_BB=zeromode.l_zm_derivative(b, st, fld),
                      L_AB=zeromode.l_zm_derivative(a, st, fld, partner=b),
                      M=zeromode.m_zm_derivative(a, b, st, fld))
        else:
            zm.update(L_AA=zeromode.l_zm(a, st, fld), L_BB=zeromode.l_zm(b, st, fld),
                      L_AB=zeromode.l_zm(a, st, fld, partner=b),
                      M=zeromode.m_zm(a, b, st, fld))
        if osc_kind:
            zm.update(K_A=zeromode.k_zm(a, st, fld, derivative=deriv),
                      K_B=zeromode.k_zm(b, st, fld, derivative=deriv))

    parts = {k: Part(complex(zm[k]), complex(series[k].value)) for k in series}
    # L_jj are real by construction; drop the 0j so comparisons stay exact
    for k in ("L_AA", "L_BB"):
        parts[k] = Part(complex(parts[k].zm.real), complex(parts[k].osc.real))
    n_used = max(s.n_max for s in series.values())
    return MatrixElements(kind=a.kind, n_max_used=int(n_used), **parts)


def _check_perturbative(laa, lbb):
    if laa + lbb > PERTURBATIVE_LIMIT:
        warnings.warn(f"L_AA + L_BB = {laa + lbb:.3g} > {PERTURBATIVE_LIMIT}: "
                      "O(lambda^2) state is outside its regime of validity",
                      PerturbativeWarning, stacklevel=3)


def assemble_qubit_state(elems: MatrixElements) -> JointState:
    """4x4 state in the basis |gg>, |ge>, |eg>, |ee> (A first)."""
    laa, lbb = elems.L_AA.total.real, elems.L_BB.total.real
    lab, m = elems.L_AB.total, elems.M.total
    _check_perturbative(laa, lbb)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0 - laa - lbb
    rho[0, 3] = np.conj(m)
    rho[3, 0] = m
    rho[1, 1] = lbb
    rho[2, 2] = laa
    rho[1, 2] = np.conj(lab)
    rho[2, 1] = lab
    return JointState(BasisKind.QUBIT4, rho)


OSC_BASIS = ((0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0))


def assemble_oscillator_state(elems: MatrixElements) -> JointState:
    """6x6 state in the basis |00>, |01>, |10>, |11>, |02>, |20> (occupations of A, B).

    The vacuum row and column carry M, K_B and K_A (two-quantum amplitudes);
    the one-quantum block is the qubit one.
    """
    q = assemble_qubit_state(elems).matrix
    rho = np.zeros((6, 6), dtype=complex)
    rho[:4, :4] = q
    kb, ka = elems.K_B.total, elems.K_A.total
    rho[0, 4], rho[4, 0] = np.conj(kb), kb
    rho[0, 5], rho[5, 0] = np.conj(ka), ka
    return JointState(BasisKind.OSCILLATOR6, rho)


def assemble_state(elems: MatrixElements) -> JointState:
    if elems.kind is DetectorKind.OSCILLATOR:
        return assemble_oscillator_state(elems)
    return assemble_qubit_state(elems)


def negativity_leading_order(elems: MatrixElements) -> float:
    """max(0, |M| - L_AA) for identical detectors."""
    laa, lbb = elems.L_AA.total.real, elems.L_BB.total.real
    if not math.isclose(laa, lbb, rel_tol=SYMMETRY_RTOL):
        raise AsymmetricDetectors(f"L_AA = {laa!r} differs from L_BB = {lbb!r}")
    return max(0.0, abs(elems.M.total) - laa)


def _full_matrix(state: JointState) -> np.ndarray:
    if state.basis is BasisKind.QUBIT4:
        return state.matrix
    full = np.zeros((9, 9), dtype=complex)
    idx = [3 * a + b for a, b in OSC_BASIS]
    full[np.ix_(idx, idx)] = state.matrix
    return full


def partial_transpose(state: JointState) -> np.ndarray:
    """Partial transpose over detector B on the product basis (index dB * a + b)."""
    da, db = state.dims
    rho = _full_matrix(state).reshape(da, db, da, db)
    return rho.transpose(0, 3, 2, 1).reshape(da * db, da * db)


def _blocks(mat, tol=0.0):
    """Connected components of the sparsity graph of a Hermitian matrix."""
    n = mat.shape[0]
    adj = np.abs(mat) > tol
    seen, blocks = set(), []
    for start in range(n):
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in np.flatnonzero(adj[i]):
                if j not in seen:
                    seen.add(int(j))
                    stack.append(int(j))
        blocks.append(sorted(comp))
    return blocks


def _eig2(p, q, off):
    """Eigenvalues of [[p, off*], [off, q]] without cancellation in the small one."""
    mean, half = 0.5 * (p + q), 0.5 * (p - q)
    rad = math.hypot(half, abs(off))
    hi, lo = mean + rad, mean - rad
    det = p * q - abs(off) ** 2
    if mean > 0 and hi != 0:
        lo = det / hi
    elif mean < 0 and lo != 0:
        hi = det / lo
    return lo, hi


def partial_transpose_eigenvalues(state: JointState) -> np.ndarray:
    pt = partial_transpose(state)
    vals = []
    for blk in _blocks(pt):
        sub = pt[np.ix_(blk, blk)]
        if len(blk) == 1:
            vals.append(sub[0, 0].real)
        elif len(blk) == 2:
            vals.extend(_eig2(sub[0, 0].real, sub[1, 1].real, sub[1, 0]))
        else:
            try:
                vals.extend(np.linalg.eigvalsh(sub))
            except np.linalg.LinAlgError as exc:
                raise EigenSolverFailure(str(exc)) from exc
    vals = np.asarray(vals, dtype=float)
    if not np.all(np.isfinite(vals)):
        raise EigenSolverFailure("non-finite eigenvalues of the partial transpose")
    return np.sort(vals)


def negativity_exact(state: JointState) -> float:
    """Sum of the negative eigenvalues (in magnitude) of the partial transpose."""
    vals = partial_transpose_eigenvalues(state)
    return float(-vals[vals < 0].sum())
