"""Proof constants and the invariant cone of odd kink candidates.

The cone consists of odd profiles that are uniformly bounded, satisfy a
one-third-power modulus of continuity, and dominate a scaled Gaussian ramp
on the positive half-line.  Every constant is computed numerically, in
dependency order, and the mutual inequalities the construction relies on
are re-checked after the fact; a violation is a hard error, not a warning.

Constant roles:

    b      sup over q in [0, 1] of integral |Kq|          (uniform bound)
    c0     sqrt(b), the sup-norm radius preserved by the cube-root map
    e      sup over q in [0, 1] of integral |Kq'|         (derivative bound)
    c_hat  modulus constant of the cube root: |a^(1/3) - b^(1/3)|
           <= c_hat |a - b|^(1/3); equals 2^(2/3), attained at b = -a
    c1     c_hat (c0 e)^(1/3), the cone's continuity constant
    c3     half the infimum over x > 0 of the smoothed-ramp ratio
           erf(x/sqrt5)/erf(x); the infimum sits at x -> 0+ where the
           ratio tends to 1/sqrt(5) (the ratio is monotone increasing)
    c4     smallest constant bounding the curvature image against the ramp
    ell    lower bound for ramp^(1/3) / ramp, equal to 2^(2/3)
    c2     ramp scale of the cone's lower barrier
    q0     admissible deformation bound, c4 q0^2 < c3 c2 with margin
    c5     contraction factors of the cube root near 1, tabulated over D
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .grid import GridSpec, Profile, odd_defect, sup_norm
from .kernels import (
    KernelFamily,
    NORM_WINDOW,
    eval_k1,
    golden_section_max,
    kernel_norms,
)
from .operators import OperatorConfig, apply_pq, psi, t0_psi_analytic

_SQRT_PI = math.sqrt(math.pi)

#: Tolerance credited to each inequality when judging cone membership, so
#: that exact boundary cases (e.g. the barrier profile itself) pass.
MEMBERSHIP_SLACK = 1e-10

#: Antisymmetry defect tolerated by the oddness check.
ODD_TOL = 1e-12

#: Node pairs closer than this are checked exhaustively by the modulus
#: condition; more distant pairs are sampled randomly.
NEAR_PAIR_RANGE = 2.0

#: Strict upper gap applied when clipping the cube-root contraction factors
#: below one.
_C5_CLIP = 1.0 - 1e-9

#: Relative shave applied to the barrier scale so the closing inequality
#: holds under floating-point rounding (it is an equality in exact
#: arithmetic when the cap is inactive).
_C2_SHAVE = 1e-12


class LedgerInvariantError(RuntimeError):
    """A computed constant violates the inequalities the cone relies on."""


@dataclass(frozen=True)
class ConstantsLedger:
    """Numerically computed constants, with the cube-root contraction table."""

    b: float
    c0: float
    e: float
    c_hat: float
    c1: float
    c3: float
    c4: float
    ell: float
    c2: float
    q0: float
    c5_grid: np.ndarray = field(repr=False)
    c5_values: np.ndarray = field(repr=False)

    def c5(self, d: float) -> float:
        """Contraction factor of the cube root on [d, inf), 0 < d < 1."""
        return c5_bound(d)

    def to_json_dict(self) -> dict:
        return {
            "b": self.b, "c0": self.c0, "e": self.e, "c_hat": self.c_hat,
            "c1": self.c1, "c3": self.c3, "c4": self.c4, "ell": self.ell,
            "c2": self.c2, "q0": self.q0,
            "c5": {"grid": self.c5_grid.tolist(), "values": self.c5_values.tolist()},
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ConstantsLedger":
        return cls(b=d["b"], c0=d["c0"], e=d["e"], c_hat=d["c_hat"], c1=d["c1"],
                   c3=d["c3"], c4=d["c4"], ell=d["ell"], c2=d["c2"], q0=d["q0"],
                   c5_grid=np.asarray(d["c5"]["grid"], dtype=float),
                   c5_values=np.asarray(d["c5"]["values"], dtype=float))


@dataclass(frozen=True)
class ConeReport:
    """Outcome of the four membership conditions, with measured margins."""

    is_bounded: bool
    sup_value: float
    is_holder: bool
    holder_ratio: float
    is_odd: bool
    odd_defect: float
    is_above_psi: bool
    psi_margin: float

    @property
    def member(self) -> bool:
        return self.is_bounded and self.is_holder and self.is_odd and self.is_above_psi


def c5_bound(d: float) -> float:
    """Derivative bound min((1/3) d^(-2/3), just below 1) for the cube root.

    For x >= d the mean-value estimate gives |x^(1/3) - 1| <= C |x - 1| with
    C = (1/3) d^(-2/3); where that exceeds one it is clipped just below one,
    which still dominates the true ratio sup 1/(d^(2/3) + d^(1/3) + 1) < 1.
    """
    if not 0.0 < d < 1.0:
        raise ValueError(f"contraction factor defined for 0 < d < 1, got {d}")
    return min((1.0 / 3.0) * d ** (-2.0 / 3.0), _C5_CLIP)


def cube_root_holder_constant(tol: float = 1e-12) -> float:
    """Best constant in |a^(1/3) - b^(1/3)| <= C |a - b|^(1/3).

    The ratio is scale-invariant, so it reduces to one variable t = b/a in
    [-1, 1] (swap so |b| <= |a|); both sign branches are searched by
    golden section.  The maximum 2^(2/3) sits at t = -1.
    """

    def same_sign(t: float) -> float:
        return (1.0 - np.cbrt(t)) / np.cbrt(1.0 - t) if t < 1.0 else 0.0

    def opposite_sign(s: float) -> float:
        return (1.0 + np.cbrt(s)) / np.cbrt(1.0 + s)

    _, peak_same = golden_section_max(same_sign, 0.0, 1.0 - 1e-9, tol)
    _, peak_opp = golden_section_max(opposite_sign, 0.0, 1.0, tol)
    return float(max(peak_same, peak_opp, opposite_sign(1.0)))


def smoothed_ramp_ratio_infimum(grid: GridSpec) -> float:
    """Infimum over x > 0 of the ratio of the smoothed ramp to the ramp.

    Evaluated on the positive grid nodes together with the two analytic
    limits: 1/sqrt(5) as x -> 0+ (ratio of derivatives) and 1 as x -> inf.
    The ratio increases monotonically, so the infimum sits at the origin
    limit; the grid evaluation guards that claim numerically.
    """
    xp = grid.x[grid.center_index + 1:]
    ratio = t0_psi_analytic(xp) / psi(xp)
    return min(float(np.min(ratio)), 1.0 / math.sqrt(5.0), 1.0)


def _abs_mass_of(f, roots: list[float], window: float = NORM_WINDOW) -> float:
    """2 * integral_0^window |f| for an even f, split at its positive roots."""
    edges = [0.0, *sorted(roots), window]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = quad(lambda u: abs(f(u)), lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200)
        total += val
    return 2.0 * total


def compute_constants(grid: GridSpec, cfg: OperatorConfig = OperatorConfig(),
                      q_range_max: float = 1.0, n_q_samples: int = 101) -> ConstantsLedger:
    """Compute every cone constant in dependency order and validate them.

    Raises LedgerInvariantError when any of the mutual inequalities fails;
    the inequalities close the invariance argument, so a violation means a
    kernel-norm or operator bug rather than a tolerable inaccuracy.
    """
    norms = kernel_norms(q_range_max, n_q_samples)
    b = norms.b_sup
    e = norms.e_sup
    c0 = math.sqrt(b)

    c_hat = cube_root_holder_constant()
    c1 = c_hat * (c0 * e) ** (1.0 / 3.0)
    c3 = 0.5 * smoothed_ramp_ratio_infimum(grid)

    # Curvature-image bound: the image of an odd bounded profile vanishes at
    # the origin with bounded slope, so it is dominated by the ramp once the
    # ramp's slope infimum on [0, 1] and level infimum on [1, inf) are paid.
    ramp_slope_inf = math.exp(-1.0) / _SQRT_PI      # attained at x = 1
    ramp_level_inf = psi(1.0)                        # attained at x = 1
    k1_abs = _abs_mass_of(eval_k1, [math.sqrt(2.0)])
    k1_deriv_abs = _abs_mass_of(
        lambda u: -0.5 * u * (1.5 - 0.25 * u * u) * math.exp(-0.25 * u * u) / (2 * _SQRT_PI),
        [math.sqrt(6.0)],
    )
    slope_bound = c0 * k1_deriv_abs
    level_bound = c0 * k1_abs
    c4 = max(slope_bound / ramp_slope_inf, level_bound / ramp_level_inf)

    ell = 2.0 ** (2.0 / 3.0)
    xp = grid.x[grid.center_index + 1:]
    ramp = psi(xp)
    if float(np.min(np.cbrt(ramp) / ramp)) < ell - 1e-12:
        raise LedgerInvariantError("ramp cube-root lower bound fails on the grid")

    sup_ramp = 0.5
    cap = 1.0 / sup_ramp - 1e-6
    c2 = min(math.sqrt(c3 * ell**3) * (1.0 - _C2_SHAVE), cap)
    q0 = 0.99 * math.sqrt(c3 * c2 / c4)

    d_grid = np.round(np.arange(0.05, 0.951, 0.05), 10)
    c5_values = np.array([c5_bound(d) for d in d_grid])

    ledger = ConstantsLedger(b=b, c0=c0, e=e, c_hat=c_hat, c1=c1, c3=c3, c4=c4,
                             ell=ell, c2=c2, q0=q0,
                             c5_grid=d_grid, c5_values=c5_values)
    validate_ledger(ledger)
    return ledger


def validate_ledger(ledger: ConstantsLedger) -> None:
    """Re-check the inequalities the cone construction depends on."""
    if not math.isclose(ledger.c0, math.sqrt(ledger.b), rel_tol=1e-14):
        raise LedgerInvariantError("c0 != sqrt(b)")
    if not math.isclose(ledger.c1, ledger.c_hat * (ledger.c0 * ledger.e) ** (1 / 3),
                        rel_tol=1e-14):
        raise LedgerInvariantError("c1 != c_hat (c0 e)^(1/3)")
    if ledger.c3 ** (1.0 / 3.0) * ledger.ell * ledger.c2 ** (1.0 / 3.0) < ledger.c2:
        raise LedgerInvariantError("closing inequality fails: barrier not reproduced")
    if not ledger.c2 * 0.5 < 1.0:
        raise LedgerInvariantError("barrier exceeds the ramp's saturation bound")
    if not ledger.c4 * ledger.q0**2 < ledger.c3 * ledger.c2:
        raise LedgerInvariantError("admissible deformation bound q0 is too large")
    if not ledger.q0 > 0.0:
        raise LedgerInvariantError("q0 must be strictly positive")
    if not np.all((ledger.c5_values > 0.0) & (ledger.c5_values < 1.0)):
        raise LedgerInvariantError("cube-root contraction factors must lie in (0, 1)")


def check_cone(p: Profile, ledger: ConstantsLedger, far_pairs: int = 10000,
               seed: int = 42) -> ConeReport:
    """Evaluate the four cone-membership conditions on the grid nodes.

    The modulus condition is checked exhaustively over all node pairs within
    NEAR_PAIR_RANGE (the ratio peaks at short range for one-third-power
    moduli) plus `far_pairs` seeded random distant pairs.
    """
    g = p.grid
    v = p.values
    h = g.spacing

    sup_value = sup_norm(p)
    is_bounded = sup_value <= ledger.c0 + MEMBERSHIP_SLACK

    worst = 0.0
    max_lag = min(int(round(NEAR_PAIR_RANGE / h)), g.n_points - 1)
    for lag in range(1, max_lag + 1):
        diff = np.max(np.abs(v[lag:] - v[:-lag]))
        worst = max(worst, diff / (lag * h) ** (1.0 / 3.0))
    rng = np.random.default_rng(seed)
    i = rng.integers(0, g.n_points, size=far_pairs)
    j = rng.integers(0, g.n_points, size=far_pairs)
    keep = np.abs(i - j) > max_lag
    if np.any(keep):
        dist = (np.abs(i[keep] - j[keep]) * h) ** (1.0 / 3.0)
        worst = max(worst, float(np.max(np.abs(v[i[keep]] - v[j[keep]]) / dist)))
    is_holder = worst <= ledger.c1 + MEMBERSHIP_SLACK

    defect = odd_defect(p)
    is_odd = defect <= ODD_TOL

    xp = g.x[g.center_index + 1:]
    margin = float(np.min(v[g.center_index + 1:] - ledger.c2 * psi(xp)))
    margin = min(margin, p.tail_right - ledger.c2 * 0.5)
    is_above_psi = margin >= -MEMBERSHIP_SLACK

    return ConeReport(is_bounded=is_bounded, sup_value=sup_value,
                      is_holder=is_holder, holder_ratio=worst,
                      is_odd=is_odd, odd_defect=defect,
                      is_above_psi=is_above_psi, psi_margin=margin)


def check_preservation(p: Profile, family: KernelFamily, ledger: ConstantsLedger,
                       cfg: OperatorConfig = OperatorConfig()) -> ConeReport:
    """Membership report for the image of a cone member under the map.

    Requires a genuine member and a deformation within the admissible bound;
    under those hypotheses the image must remain in the cone, so a failing
    report indicates a constants or operator bug.
    """
    if not check_cone(p, ledger).member:
        raise ValueError("input profile is not a cone member")
    if family.q > ledger.q0:
        raise ValueError(f"deformation {family.q} exceeds admissible bound {ledger.q0}")
    return check_cone(apply_pq(p, family, cfg), ledger)


def random_cone_members(n: int, grid: GridSpec, ledger: ConstantsLedger,
                        seed: int = 42) -> list[Profile]:
    """Draw random cone members: band-limited odd ripples on the erf kink.

    Amplitudes and frequencies are kept small enough that the modulus bound
    holds even for worst-case phase alignment; the draw is then clipped to
    the sup bound, raised above the barrier on x > 0, and mirrored to exact
    oddness, all operations that cannot increase the modulus constant.
    """
    rng = np.random.default_rng(seed)
    x = grid.x
    members = []
    envelope = np.exp(-((x / 5.0) ** 2))
    for _ in range(n):
        ripple = np.zeros_like(x)
        for _ in range(int(rng.integers(1, 4))):
            amp = rng.uniform(-0.03, 0.03)
            freq = rng.uniform(0.2, 2.0)
            ripple += amp * np.sin(freq * x) * envelope
        v = erf(x) + ripple
        v = np.clip(v, -ledger.c0, ledger.c0)
        pos = slice(grid.center_index + 1, None)
        v[pos] = np.maximum(v[pos], ledger.c2 * psi(x[pos]))
        v[:grid.center_index] = -v[:grid.center_index:-1]
        v[grid.center_index] = 0.0
        members.append(Profile(grid=grid, values=v, tail_right=1.0, tail_left=-1.0))
    return members
