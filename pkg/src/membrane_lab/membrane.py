"""Eigenmodes of uniform and radially loaded circular membranes.

A loaded head is modelled as concentric rings of constant surface density
under uniform tension, clamped at the rim.  Within ring i the transverse
displacement of an azimuthal-order-m mode is

    u_i(r) = A_i J_m(k_i r) + B_i Y_m(k_i r),      k_i = 2 pi f sqrt(sigma_i / T)

with B_1 = 0 (regularity at the centre).  Continuity of displacement and
radial slope at every ring boundary propagates (A, B) outward; frequencies
where the propagated solution vanishes at the rim are the eigenfrequencies.
The residual is evaluated on whole frequency grids at once, so the scan and
the simultaneous bisection of all brackets stay vectorised.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j, bessel_j_prime, bessel_y, bessel_y_prime, bessel_zero
from .errors import ConvergenceError, InsufficientCeiling, ProfileMismatch

# Scan resolution: 1/20 of the modal spacing of a uniform membrane at the
# densest ring (loaded spectra are denser than the lightest uniform one,
# never denser than the heaviest).
SCAN_DIVISIONS = 20
BISECT_RTOL = 1e-11
BISECT_CAP = 200
# A dip of |D| this far below its neighbours without a sign change gets a
# 4x finer look, in case two near-degenerate roots hide inside one step.
_DIP_RATIO = 1e-3


@dataclass(frozen=True)
class RadialDensityProfile:
    """Piecewise-constant surface-density map of a clamped circular membrane.

    rings are (outer_radius_fraction, surface_density) pairs ordered from
    the centre outward; the last fraction must be exactly 1.0.
    """

    radius: float
    tension: float
    rings: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive and finite, got {self.radius}")
        if not (self.tension > 0 and math.isfinite(self.tension)):
            raise ValueError(f"tension must be positive and finite, got {self.tension}")
        rings = tuple((float(f), float(s)) for f, s in self.rings)
        object.__setattr__(self, "rings", rings)
        if len(rings) < 1:
            raise ValueError("profile needs at least one ring")
        fracs = [f for f, _ in rings]
        if any(not (0.0 < f <= 1.0) for f in fracs):
            raise ValueError("ring fractions must lie in (0, 1]")
        if any(b <= a for a, b in zip(fracs, fracs[1:])):
            raise ValueError("ring fractions must be strictly increasing")
        if fracs[-1] != 1.0:
            raise ValueError("last ring fraction must equal 1.0 exactly")
        if any(not (s > 0 and math.isfinite(s)) for _, s in rings):
            raise ValueError("surface densities must be positive and finite")

    @property
    def densities(self) -> tuple[float, ...]:
        return tuple(s for _, s in self.rings)

    def fingerprint(self) -> str:
        canon = "|".join(
            ["%.17g" % self.radius, "%.17g" % self.tension]
            + ["%.17g,%.17g" % ring for ring in self.rings]
        )
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def to_json_dict(self) -> dict:
        return {
            "radius_m": self.radius,
            "tension_n_per_m": self.tension,
            "rings": [{"r_frac": f, "sigma_kg_m2": s} for f, s in self.rings],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RadialDensityProfile":
        try:
            rings = tuple((r["r_frac"], r["sigma_kg_m2"]) for r in doc["rings"])
            return cls(doc["radius_m"], doc["tension_n_per_m"], rings)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed profile document: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def loads(cls, text: str) -> "RadialDensityProfile":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class Mode:
    """One eigenmode: m nodal diameters, n-th radial root, frequency in Hz."""

    m: int
    n: int
    frequency: float
    source_fingerprint: str = ""


@dataclass(frozen=True)
class ModeTable:
    profile_fingerprint: str
    modes: tuple[Mode, ...] = field(default_factory=tuple)

    def __post_init__(self):
        modes = tuple(self.modes)
        object.__setattr__(self, "modes", modes)
        keys = [(mo.frequency, mo.m, mo.n) for mo in modes]
        if keys != sorted(keys):
            raise ValueError("mode table must be sorted by (frequency, m, n)")
        pairs = [(mo.m, mo.n) for mo in modes]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate (m, n) pair in mode table")

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, i) -> Mode:
        return self.modes[i]

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([mo.frequency for mo in self.modes])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("m,n,frequency_hz\n")
        for mo in self.modes:
            buf.write(f"{mo.m},{mo.n},{mo.frequency:.9g}\n")
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "profile_fingerprint": self.profile_fingerprint,
            "modes": [
                {"m": mo.m, "n": mo.n, "frequency_hz": mo.frequency} for mo in self.modes
            ],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ModeTable":
        fp = doc.get("profile_fingerprint", "")
        modes = tuple(
            Mode(int(e["m"]), int(e["n"]), float(e["frequency_hz"]), fp)
            for e in doc["modes"]
        )
        return cls(fp, modes)


def _sorted_table(fingerprint: str, modes: list[Mode]) -> ModeTable:
    modes.sort(key=lambda mo: (mo.frequency, mo.m, mo.n))
    return ModeTable(fingerprint, tuple(modes))


def uniform_modes(
    radius: float, tension: float, density: float, m_max: int, n_max: int
) -> ModeTable:
    """Closed-form modes of an unloaded membrane: f = j_{m,n} c / (2 pi R)."""
    if min(radius, tension, density) <= 0:
        raise ValueError("radius, tension and density must all be positive")
    if not (0 <= m_max <= 8 and 1 <= n_max <= 8):
        raise ValueError("m_max must be in [0, 8] and n_max in [1, 8]")
    profile = RadialDensityProfile(radius, tension, ((1.0, density),))
    fp = profile.fingerprint()
    c = math.sqrt(tension / density)
    modes = [
        Mode(m, n, bessel_zero(m, n) * c / (2.0 * math.pi * radius), fp)
        for m in range(m_max + 1)
        for n in range(1, n_max + 1)
    ]
    return _sorted_table(fp, modes)


def _residual_mixed(
    profile: RadialDensityProfile, orders: np.ndarray, freqs: np.ndarray
) -> np.ndarray:
    """Rim displacement of the unit-amplitude regular solution.

    Vectorised over frequency with a per-element azimuthal order, so one
    call can polish brackets from every order at once.  The per-interface
    2x2 solve uses the analytic Wronskian inverse
    (J_m(x) Y_m'(x) - J_m'(x) Y_m(x) = 2 / (pi x)), and the coefficient
    pair is renormalised by a positive factor after every interface so the
    sign pattern, which the bracketing relies on, is preserved.
    """
    from scipy import special

    freqs = np.asarray(freqs, dtype=float)
    orders = np.broadcast_to(np.asarray(orders, dtype=float), freqs.shape)
    R = profile.radius
    two_pi = 2.0 * math.pi
    ks = [two_pi * freqs * math.sqrt(sig / profile.tension) for sig in profile.densities]

    A = np.ones_like(freqs)
    B = np.zeros_like(freqs)
    single = len(profile.rings) == 1
    for i in range(len(profile.rings) - 1):
        rb = profile.rings[i][0] * R
        xl = ks[i] * rb
        xr = ks[i + 1] * rb
        u = A * special.jv(orders, xl)
        du = ks[i] * A * special.jvp(orders, xl)
        if i > 0:
            u = u + B * special.yv(orders, xl)
            du = du + ks[i] * B * special.yvp(orders, xl)
        det = 2.0 / (math.pi * rb)
        A = (ks[i + 1] * special.yvp(orders, xr) * u - special.yv(orders, xr) * du) / det
        B = (special.jv(orders, xr) * du - ks[i + 1] * special.jvp(orders, xr) * u) / det
        scale = np.maximum(np.abs(A), np.abs(B))
        scale = np.where(scale > 0.0, scale, 1.0)
        A = A / scale
        B = B / scale
    last = ks[-1] * R
    D = A * special.jv(orders, last)
    if not single:
        D = D + B * special.yv(orders, last)
    return D


def _boundary_residual(profile: RadialDensityProfile, m: int, freqs: np.ndarray) -> np.ndarray:
    freqs = np.asarray(freqs, dtype=float)
    return _residual_mixed(profile, np.full_like(freqs, float(m)), freqs)


def _bisect_mixed(
    profile: RadialDensityProfile,
    orders: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    d_lo: np.ndarray,
) -> np.ndarray:
    """Bisect sign-change brackets from every azimuthal order in lockstep."""
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    d_lo = d_lo.copy()
    for _ in range(BISECT_CAP):
        mid = 0.5 * (lo + hi)
        active = (hi - lo) > BISECT_RTOL * np.abs(mid)
        if not active.any():
            return mid
        d_mid = _residual_mixed(profile, orders, mid)
        go_left = (d_lo * d_mid) < 0.0
        hi = np.where(active & go_left, mid, hi)
        move_right = active & ~go_left
        lo = np.where(move_right, mid, lo)
        d_lo = np.where(move_right, d_mid, d_lo)
    raise ConvergenceError(
        f"bracketed root failed to converge in {BISECT_CAP} bisections"
    )


def _refine_interval(
    profile: RadialDensityProfile, m: int, lo: float, hi: float, levels: int = 2
) -> tuple[list[tuple[float, float, float]], list[float]]:
    """Re-scan a suspicious interval at 4x finer steps, recursing once more.

    Returns (brackets, exact roots); bisection happens later in the shared
    batch.
    """
    grid = np.linspace(lo, hi, 9)
    d = _boundary_residual(profile, m, grid)
    brackets: list[tuple[float, float, float]] = []
    sign_change = d[:-1] * d[1:] < 0.0
    idx = np.nonzero(sign_change)[0]
    if idx.size:
        brackets = [(float(grid[j]), float(grid[j + 1]), float(d[j])) for j in idx]
    elif levels > 0:
        absd = np.abs(d)
        j = int(np.argmin(absd[1:-1])) + 1
        if absd[j] < _DIP_RATIO * max(absd[0], absd[-1]):
            return _refine_interval(profile, m, grid[j - 1], grid[j + 1], levels - 1)
    exact = [float(grid[j]) for j in np.nonzero(d == 0.0)[0]]
    return brackets, exact


def _scan_brackets(
    profile: RadialDensityProfile, m: int, n_max: int, f_ceiling: float, step: float
) -> tuple[list[tuple[float, float, float]], list[float]]:
    """Walk the residual upward collecting the first n_max sign changes."""
    brackets: list[tuple[float, float, float]] = []
    exact: list[float] = []
    chunk = 512
    f_lo = step
    d_prev = None
    f_prev = None
    while f_lo < f_ceiling and len(brackets) + len(exact) < n_max:
        grid = f_lo + step * np.arange(chunk + 1)
        grid = grid[grid <= f_ceiling + step]
        if f_prev is not None:
            grid = np.concatenate(([f_prev], grid))
        d = _boundary_residual(profile, m, grid)
        if d_prev is not None:
            d[0] = d_prev
        sign_change = d[:-1] * d[1:] < 0.0
        for j in np.nonzero(sign_change)[0]:
            brackets.append((float(grid[j]), float(grid[j + 1]), float(d[j])))
        # Exact zeros on the grid are roots too (rare but cheap to honour).
        exact.extend(float(grid[j]) for j in np.nonzero(d == 0.0)[0])
        # Local |D| minima without a crossing may hide a near-degenerate pair.
        absd = np.abs(d)
        interior = np.arange(1, len(grid) - 1)
        dips = interior[
            (absd[interior] < absd[interior - 1])
            & (absd[interior] < absd[interior + 1])
            & (absd[interior] < _DIP_RATIO * np.median(absd))
            & ~sign_change[interior - 1]
            & ~sign_change[interior]
        ]
        for j in dips:
            sub_brackets, sub_exact = _refine_interval(
                profile, m, float(grid[j - 1]), float(grid[j + 1])
            )
            brackets.extend(sub_brackets)
            exact.extend(sub_exact)
        f_prev = float(grid[-1])
        d_prev = float(d[-1])
        f_lo = f_prev + step
    return brackets, exact


def composite_modes(
    profile: RadialDensityProfile,
    m_max: int,
    n_max: int,
    f_ceiling: float,
) -> ModeTable:
    """Transfer-matrix eigenfrequencies of a ringed profile, merged over m.

    Scans each azimuthal order with a step of 1/20 of the conservative
    modal spacing, bisects every sign change (all orders polished in one
    batch), and returns the n_max lowest roots per order below f_ceiling.
    Raises InsufficientCeiling when an order comes up short (reporting how
    many roots it did find).
    """
    if m_max < 0 or n_max < 1:
        raise ValueError("m_max must be >= 0 and n_max >= 1")
    if f_ceiling <= 0:
        raise ValueError("f_ceiling must be positive")
    sigma_max = max(profile.densities)
    spacing = math.sqrt(profile.tension / sigma_max) / (2.0 * profile.radius)
    step = spacing / SCAN_DIVISIONS
    fp = profile.fingerprint()

    all_orders: list[int] = []
    all_lo: list[float] = []
    all_hi: list[float] = []
    all_dlo: list[float] = []
    roots_by_m: dict[int, list[float]] = {}
    for m in range(m_max + 1):
        brackets, exact = _scan_brackets(profile, m, n_max, f_ceiling, step)
        roots_by_m[m] = exact
        for lo, hi, d_lo in brackets:
            all_orders.append(m)
            all_lo.append(lo)
            all_hi.append(hi)
            all_dlo.append(d_lo)
    if all_orders:
        found = _bisect_mixed(
            profile,
            np.array(all_orders, dtype=float),
            np.array(all_lo),
            np.array(all_hi),
            np.array(all_dlo),
        )
        for m, root in zip(all_orders, found):
            roots_by_m[m].append(float(root))

    modes: list[Mode] = []
    for m in range(m_max + 1):
        roots = sorted(set(roots_by_m[m]))
        roots = [r for r in roots if r <= f_ceiling][:n_max]
        if len(roots) < n_max:
            raise InsufficientCeiling(m, len(roots), n_max, f_ceiling)
        modes.extend(Mode(m, n, f, fp) for n, f in enumerate(roots, start=1))
    return _sorted_table(fp, modes)


def default_ceiling(profile: RadialDensityProfile, n_max: int, m_max: int = 8) -> float:
    """Ceiling guaranteed to clear n_max roots per order: loading only ever
    lowers frequencies, so the lightest ring's uniform spectrum bounds from
    above."""
    sigma_min = min(profile.densities)
    c = math.sqrt(profile.tension / sigma_min)
    return 1.05 * bessel_zero(m_max, n_max) * c / (2.0 * math.pi * profile.radius)


def mode_shape(profile: RadialDensityProfile, mode: Mode, samples: int = 256) -> np.ndarray:
    """Radial displacement of a solved mode on a uniform [0, R] grid.

    Normalised to max |u| = 1; the rim sample is the clamped boundary and
    is exactly zero.
    """
    if samples < 64:
        raise ValueError("samples must be >= 64")
    fp = profile.fingerprint()
    if mode.source_fingerprint != fp:
        raise ProfileMismatch(
            "mode was not solved from this profile "
            f"(mode fingerprint {mode.source_fingerprint!r}, profile {fp!r})"
        )
    R = profile.radius
    two_pi = 2.0 * math.pi
    ks = [two_pi * mode.frequency * math.sqrt(sig / profile.tension) for sig in profile.densities]

    coeffs = [(1.0, 0.0)]
    for i in range(len(profile.rings) - 1):
        rb = profile.rings[i][0] * R
        xl = ks[i] * rb
        xr = ks[i + 1] * rb
        a, b = coeffs[-1]
        u = a * bessel_j(mode.m, xl) + b * bessel_y(mode.m, xl)
        du = ks[i] * (a * bessel_j_prime(mode.m, xl) + b * bessel_y_prime(mode.m, xl))
        det = 2.0 / (math.pi * rb)
        a_next = (ks[i + 1] * bessel_y_prime(mode.m, xr) * u - bessel_y(mode.m, xr) * du) / det
        b_next = (bessel_j(mode.m, xr) * du - ks[i + 1] * bessel_j_prime(mode.m, xr) * u) / det
        coeffs.append((a_next, b_next))

    r = np.linspace(0.0, R, samples)
    boundaries = np.array([f * R for f, _ in profile.rings])
    region = np.searchsorted(boundaries, r, side="left")
    region = np.clip(region, 0, len(profile.rings) - 1)
    u = np.empty_like(r)
    for i, (a, b) in enumerate(coeffs):
        mask = region == i
        if not mask.any():
            continue
        x = ks[i] * r[mask]
        val = a * bessel_j(mode.m, x)
        if b != 0.0:
            # Y_m blows up at the origin but interior regions never touch r=0.
            val = val + b * bessel_y(mode.m, np.maximum(x, 1e-300))
        u[mask] = val
    u /= np.max(np.abs(u))
    u[-1] = 0.0  # clamped rim, exact by construction
    return u


def find_degeneracies(table: ModeTable, rel_tol: float) -> list[list[Mode]]:
    """Greedy grouping of modes whose pairwise frequency ratios sit in 1 +/- rel_tol."""
    if not (0.0 < rel_tol <= 0.05):
        raise ValueError("rel_tol must lie in (0, 0.05]")
    groups: list[list[Mode]] = []
    modes = list(table.modes)
    i = 0
    while i < len(modes):
        j = i + 1
        while j < len(modes) and modes[j].frequency <= modes[i].frequency * (1.0 + rel_tol):
            j += 1
        if j - i >= 2:
            groups.append(modes[i:j])
        i = j
    return groups
