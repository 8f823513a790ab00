"""2D operators -Delta - alpha V via angular Fourier reduction.

In (t = ln r, angular mode) coordinates the quadratic form
int (|grad u|^2 - alpha V |u|^2) dx becomes block-tridiagonal: per-channel
1D operators -d^2/dt^2 + m^2 - alpha e^{2t} Vhat_0(e^t) on the diagonal,
and diagonal-in-t couplings -alpha e^{2t} Vhat_{m-m'}(e^t) between modes.
Complex modes are paired into cos/sin channels so every matrix is real
symmetric, and negative eigenvalues are counted exactly by a block
Schur-complement recursion (the block analogue of the Sturm sweep).

The constrained variant deletes the t = 0 node of the constant channel,
which is the discrete form of the mean-zero condition int u(1, theta)
dtheta = 0; removing that single row restores the full operator, hence
the rank-one sandwich count_tilde <= count_full <= count_tilde + 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import MatrixSizeError, NumericalError
from .potentials import (Decomposition, EffectivePotential, PotentialSpec, RadialProfile,
                         RadialPotential, decompose, effective_potential)
from .spectra1d import (Grid1D, SchrodingerMatrix1D, ZERO_PIVOT_SHIFT, _channel_diags,
                        _sturm_counts, count_channels, negative_count)

log = logging.getLogger(__name__)

DEFAULT_MAX_DIMENSION = 12000


def fourier_modes(spec: PotentialSpec, r, k_max: int, n_theta: int = 256) -> np.ndarray:
    """Complex angular modes Vhat_k(r), k = 0..k_max (Vhat_{-k} = conj).

    Mode 0 is the angular mean; higher modes are computed from the
    mean-subtracted samples, so they carry only the non-radial part.
    """
    return spec.angular_coefficients(r, k_max, n_theta)


@dataclass(frozen=True)
class ChannelSet:
    """Symmetric set of angular modes -m_max..m_max, realized as real
    channels (const, cos m, sin m)."""

    m_max: int

    def __post_init__(self):
        if self.m_max < 0:
            raise ValueError("m_max must be >= 0")

    @property
    def channels(self) -> list[tuple[str, int]]:
        out = [("const", 0)]
        for m in range(1, self.m_max + 1):
            out.append(("cos", m))
            out.append(("sin", m))
        return out

    @property
    def size(self) -> int:
        return 2 * self.m_max + 1


def radial_cutoff_m_max(G: EffectivePotential | Callable, alpha: float, grid: Grid1D) -> int:
    """Smallest m with m^2 >= alpha max_i G(t_i): for radial potentials the
    channel matrix K + diag(m^2 - alpha G) is then positive definite, so all
    omitted channels are provably empty at the matrix level."""
    gvals = np.asarray(G(grid.interior), dtype=float)
    sup = float(np.max(gvals)) if gvals.size else 0.0
    if sup <= 0 or alpha <= 0:
        return 0
    return int(math.ceil(math.sqrt(alpha * sup)))


def coupled_cutoff_m_max(spec: PotentialSpec, alpha: float, grid: Grid1D,
                         n_theta: int = 256, guard: int = 4) -> int:
    """Channel cutoff for non-radial potentials: a Gershgorin-style bound on
    the total angular coupling, plus the highest declared Fourier mode and a
    guard band.  Under-truncation remains detectable by escalation."""
    hint = spec.angular_mode_hint()
    k_probe = hint if hint is not None else max(8, n_theta // 8)
    t = grid.interior
    vhat = fourier_modes(spec, np.exp(t), k_probe, n_theta)
    with np.errstate(over="ignore"):
        weight = np.exp(2.0 * t)
    row = np.abs(vhat[:, 0].real) + 2.0 * np.sum(np.abs(vhat[:, 1:]), axis=-1)
    live = row > 0
    sup = float(np.max(weight[live] * row[live])) if np.any(live) else 0.0
    base = int(math.ceil(math.sqrt(alpha * sup))) if sup > 0 and alpha > 0 else 0
    return base + (hint if hint is not None else k_probe) + guard


@dataclass(frozen=True)
class BlockSystem2D:
    """Assembled block-tridiagonal form of the 2D quadratic form.

    ``chan_diag[b, i]`` holds 2/h^2 + m_b^2 - alpha G(t_i); the non-radial
    angular residual (everything beyond mode 0) enters through the p/q mode
    arrays and is scaled by -alpha e^{2t_i} slice by slice.  ``constraint``
    marks the t = 0 slice where the constant channel is deleted.
    """

    grid: Grid1D
    channel_set: ChannelSet
    alpha: float
    chan_diag: np.ndarray          # [B, n_int]
    pmodes: np.ndarray             # [n_int, 2 m_max + 1] Re Vhat_k
    qmodes: np.ndarray             # [n_int, 2 m_max + 1] (1/2pi) int V sin k theta
    is_block_diagonal: bool
    constraint: int | None = None  # interior index of the t = 0 slice

    @property
    def channels(self) -> list[tuple[str, int]]:
        return self.channel_set.channels

    @property
    def dimension(self) -> int:
        b = self.channel_set.size
        n = self.chan_diag.shape[1]
        return b * n - (1 if self.constraint is not None else 0)

    def angular_residual(self, i: int) -> np.ndarray:
        """R(r_i) = A(r_i) - p_0(r_i) I in the real channel basis; built from
        modes k >= 1 only, so it vanishes identically for radial potentials."""
        chans = self.channels
        B = len(chans)
        p = self.pmodes[i]
        q = self.qmodes[i]
        R = np.zeros((B, B))
        sqrt2 = math.sqrt(2.0)
        for a in range(B):
            kind_a, m = chans[a]
            for b in range(a, B):
                kind_b, n = chans[b]
                if kind_a == "const" and kind_b == "const":
                    val = 0.0
                elif kind_a == "const":
                    val = sqrt2 * (p[n] if kind_b == "cos" else q[n])
                elif kind_a == "cos" and kind_b == "cos":
                    val = (p[abs(m - n)] if m != n else 0.0) + p[m + n]
                elif kind_a == "sin" and kind_b == "sin":
                    val = (p[abs(m - n)] if m != n else 0.0) - p[m + n]
                else:
                    # one cos (mode mc), one sin (mode ms)
                    mc, ms = (m, n) if kind_a == "cos" else (n, m)
                    val = q[ms + mc]
                    if ms != mc:
                        val += math.copysign(1.0, ms - mc) * q[abs(ms - mc)]
                R[a, b] = val
                R[b, a] = val
        return R

    def slice_matrix(self, i: int, shift: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """(active channel indices, dense diagonal block) for slice i."""
        B = self.channel_set.size
        active = np.arange(B)
        if self.constraint is not None and i == self.constraint:
            active = active[1:]  # drop the constant channel at t = 0
        D = np.diag(self.chan_diag[active, i] - shift)
        if not self.is_block_diagonal:
            row = self.pmodes[i, 1:]
            if np.any(row != 0.0) or np.any(self.qmodes[i, 1:] != 0.0):
                t_i = self.grid.interior[i]
                R = self.angular_residual(i)
                D = D - self.alpha * (math.exp(2.0 * t_i) * R[np.ix_(active, active)])
        return active, D

    def to_dense(self, max_dimension: int = DEFAULT_MAX_DIMENSION) -> np.ndarray:
        """Materialize the full symmetric matrix (slice-major ordering)."""
        if self.dimension > max_dimension:
            raise MatrixSizeError(
                f"dense dimension {self.dimension} exceeds ceiling {max_dimension}; "
                "use fewer channels or a coarser grid")
        n = self.chan_diag.shape[1]
        esq_off = -1.0 / self.grid.h ** 2
        offsets = []
        pos = 0
        actives = []
        for i in range(n):
            active, _ = self.slice_matrix(i)
            actives.append(active)
            offsets.append(pos)
            pos += active.size
        A = np.zeros((pos, pos))
        for i in range(n):
            active, D = self.slice_matrix(i)
            sl = slice(offsets[i], offsets[i] + active.size)
            A[sl, sl] = D
            if i + 1 < n:
                nxt = actives[i + 1]
                common, ia, ib = np.intersect1d(active, nxt, return_indices=True)
                for a, b in zip(ia, ib):
                    A[offsets[i] + a, offsets[i + 1] + b] = esq_off
                    A[offsets[i + 1] + b, offsets[i] + a] = esq_off
        return A


def assemble_full_2d(spec: PotentialSpec, alpha: float, grid: Grid1D,
                     channels: ChannelSet | int | None = None,
                     n_theta: int = 256, constrained: bool = False,
                     max_dimension: int = DEFAULT_MAX_DIMENSION,
                     dec: Decomposition | None = None,
                     G: EffectivePotential | None = None) -> BlockSystem2D:
    """Assemble the discretized quadratic form of H_{alpha V} (or of the
    constrained operator when ``constrained``)."""
    if alpha < 0:
        raise ValueError("coupling must be non-negative")
    if dec is None:
        dec = decompose(spec, n_theta)
    if G is None:
        G = effective_potential(dec)
    if channels is None:
        if spec.is_radial:
            m_max = radial_cutoff_m_max(G, alpha, grid)
        else:
            m_max = coupled_cutoff_m_max(spec, alpha, grid, n_theta)
        channel_set = ChannelSet(m_max)
    elif isinstance(channels, ChannelSet):
        channel_set = channels
    else:
        channel_set = ChannelSet(int(channels))
    B = channel_set.size
    n_int = grid.n - 2
    # radial systems stay block-diagonal (batched 1D sweeps, no dense work),
    # so the dense-dimension ceiling applies to coupled systems only
    if not spec.is_radial and B * n_int > max_dimension:
        raise MatrixSizeError(
            f"system dimension {B * n_int} exceeds ceiling {max_dimension}; "
            "use fewer channels or a coarser grid (the ceiling is configurable)")
    ms = [m for _, m in channel_set.channels]
    chan_diag = _channel_diags(G, alpha, ms, grid)
    if spec.is_radial:
        k_needed = 0
        pmodes = np.zeros((n_int, 2 * channel_set.m_max + 1))
        qmodes = np.zeros_like(pmodes)
        block_diag = True
    else:
        k_needed = 2 * channel_set.m_max
        with np.errstate(over="ignore"):
            radii = np.exp(grid.interior)
        vhat = fourier_modes(spec, radii, k_needed, n_theta)
        pmodes = vhat.real.copy()
        qmodes = (-vhat.imag).copy()
        pmodes[:, 0] = 0.0  # mode 0 lives in chan_diag via G
        block_diag = bool(np.all(pmodes == 0.0) and np.all(qmodes == 0.0))
    constraint = None
    if constrained:
        constraint = grid.zero_index
        if constraint is None:
            raise ValueError("constrained assembly needs a grid node at t=0")
    return BlockSystem2D(grid=grid, channel_set=channel_set, alpha=alpha,
                         chan_diag=chan_diag, pmodes=pmodes, qmodes=qmodes,
                         is_block_diagonal=block_diag, constraint=constraint)


class _SingularPivot(Exception):
    pass


def _count_block_diagonal(sys: BlockSystem2D) -> int:
    """Radial fast path: per-channel scalar pivot sweeps, row-for-row the
    same arithmetic as the 1D channel counts."""
    chans = sys.channels
    off = -1.0 / sys.grid.h ** 2
    esq = off * off
    n_int = sys.chan_diag.shape[1]
    if sys.constraint is None:
        offsq = np.full((len(chans), n_int - 1), esq)
        return int(np.sum(_sturm_counts(sys.chan_diag, offsq)))
    total = 0
    k = sys.constraint
    # constant channel: two half-line blocks around the removed node
    const_matrix = SchrodingerMatrix1D(grid=sys.grid, diag=sys.chan_diag[0],
                                       offdiag=np.full(n_int - 1, off),
                                       constraint_index=k)
    total += negative_count(const_matrix)
    if len(chans) > 1:
        offsq = np.full((len(chans) - 1, n_int - 1), esq)
        total += int(np.sum(_sturm_counts(sys.chan_diag[1:], offsq)))
    return total


def _count_block_tridiagonal(sys: BlockSystem2D, shift: float = 0.0) -> int:
    """Block Schur-complement sweep: inertia of the block-tridiagonal matrix
    is the sum of the inertias of the successive pivot blocks."""
    esq = (1.0 / sys.grid.h ** 2) ** 2
    n_int = sys.chan_diag.shape[1]
    total = 0
    prev_inv = None
    prev_active = None
    for i in range(n_int):
        active, D = sys.slice_matrix(i, shift)
        if active.size == 0:
            prev_inv, prev_active = None, None
            continue
        if prev_inv is not None:
            common, ia, ib = np.intersect1d(prev_active, active, return_indices=True)
            if common.size:
                D[np.ix_(ib, ib)] -= esq * prev_inv[np.ix_(ia, ia)]
        w, U = np.linalg.eigh(D)
        wmax = float(np.max(np.abs(w)))
        if wmax == 0.0 or float(np.min(np.abs(w))) <= 1e-14 * wmax:
            raise _SingularPivot(f"near-singular pivot block at slice {i}")
        total += int(np.count_nonzero(w < 0))
        prev_inv = (U / w) @ U.T
        prev_active = active
    return total


def count_full_2d(sys: BlockSystem2D) -> int:
    """Exact negative-eigenvalue count of the assembled system."""
    if sys.is_block_diagonal:
        return _count_block_diagonal(sys)
    try:
        return _count_block_tridiagonal(sys)
    except _SingularPivot as exc:
        log.warning("%s; retrying with shift %g", exc, ZERO_PIVOT_SHIFT)
        try:
            return _count_block_tridiagonal(sys, shift=ZERO_PIVOT_SHIFT)
        except _SingularPivot as exc2:
            raise NumericalError(f"singular pivot persisted under shift: {exc2}") from exc2


def count_radial_2d(v_rad: RadialProfile | EffectivePotential | Callable,
                    alpha: float, grid: Grid1D, m_max: int | None = None) -> int:
    """N_- of the 2D operator for a radial potential: the sum of channel
    counts over |m| <= m_max, with the cutoff chosen so omitted channels are
    positive definite by construction."""
    G = _as_effective(v_rad)
    if m_max is None:
        m_max = radial_cutoff_m_max(G, alpha, grid)
    ms = [0] + [m for k in range(1, m_max + 1) for m in (k, k)]
    return int(np.sum(count_channels(G, alpha, ms, grid)))


def _as_effective(v) -> EffectivePotential | Callable:
    if isinstance(v, RadialProfile):
        return effective_potential(decompose(RadialPotential(profile=v)))
    return v


def count_tilde(spec: PotentialSpec, alpha: float, grid: Grid1D,
                channels: ChannelSet | int | None = None, n_theta: int = 256,
                max_dimension: int = DEFAULT_MAX_DIMENSION) -> int:
    """N_- of the constrained operator (mean of u over the unit circle
    vanishes): the constant channel loses its t = 0 node."""
    sys = assemble_full_2d(spec, alpha, grid, channels, n_theta,
                           constrained=True, max_dimension=max_dimension)
    return count_full_2d(sys)


def birman_schwinger_2d(spec: PotentialSpec, eps: float, grid: Grid1D,
                        channels: ChannelSet | int | None = None, n_theta: int = 256,
                        max_dimension: int = DEFAULT_MAX_DIMENSION) -> int:
    """n_+(eps, B_V): negatives of (constrained stiffness - (1/eps) V-mass).

    Built through the same assembly as the constrained operator at coupling
    1/eps, which is exactly the shifted-inertia formulation of the
    generalized eigenvalue count.
    """
    if not eps > 0:
        raise ValueError("threshold must be positive")
    sys = assemble_full_2d(spec, 1.0 / eps, grid, channels, n_theta,
                           constrained=True, max_dimension=max_dimension)
    return count_full_2d(sys)


def count_2d_auto(spec: PotentialSpec, alpha: float, grid: Grid1D,
                  tilde: bool = False, n_theta: int = 256,
                  max_dimension: int = DEFAULT_MAX_DIMENSION,
                  escalation_step: int = 2, max_escalations: int = 4
                  ) -> tuple[int, int, bool]:
    """(count, m_max used, channel cutoff certified).

    Radial specs use the provable cutoff.  Non-radial specs count again with
    ``escalation_step`` extra modes until the count stops changing; failure
    to stabilize is flagged, never silently accepted.
    """
    dec = decompose(spec, n_theta)
    G = effective_potential(dec)
    if spec.is_radial:
        m_max = radial_cutoff_m_max(G, alpha, grid)
        sys = assemble_full_2d(spec, alpha, grid, ChannelSet(m_max), n_theta,
                               constrained=tilde, max_dimension=max_dimension,
                               dec=dec, G=G)
        return count_full_2d(sys), m_max, True
    m_max = coupled_cutoff_m_max(spec, alpha, grid, n_theta)
    counts = {}

    def run(mm):
        if mm not in counts:
            sys = assemble_full_2d(spec, alpha, grid, ChannelSet(mm), n_theta,
                                   constrained=tilde, max_dimension=max_dimension,
                                   dec=dec, G=G)
            counts[mm] = count_full_2d(sys)
        return counts[mm]

    for _ in range(max_escalations):
        if run(m_max) == run(m_max + escalation_step):
            return counts[m_max], m_max, True
        m_max += escalation_step
    log.info("channel cutoff did not stabilize at m_max=%d for alpha=%g", m_max, alpha)
    return run(m_max), m_max, False


# ----------------------------------------------------------------------
# Hardy ratios and the quadratic-form inequality


def hardy_ratio(f, which: str, grid: Grid1D) -> float:
    """Discrete ratio of weighted L2 mass to Dirichlet energy.

    which='F0': f is a radial profile omega(t) with the t = 0 node removed
    (the discrete phi(1) = 0 condition); weight (|x| ln|x|)^-2, i.e. 1/t^2
    in substitution coordinates.  The sharp constant of the underlying 1D
    Hardy inequality makes the ratio at most 4.

    which='F1': f is a list of (kind, m, omega) channel profiles with m >= 1
    (zero angular mean); weight |x|^-2, ratio at most 1.
    """
    h = grid.h
    nodes = grid.nodes
    if which == "F0":
        if not grid.has_node_at_zero:
            raise ValueError("F0 ratio needs a grid node at t=0")
        vals = np.asarray(f(nodes), dtype=float).copy()
        vals[0] = vals[-1] = 0.0
        i0 = grid.zero_index + 1  # interior index -> node index
        vals[i0] = 0.0
        interior = vals[1:-1]
        t = grid.interior
        mask = np.arange(t.size) != grid.zero_index
        weighted = h * float(np.sum(interior[mask] ** 2 / t[mask] ** 2))
        dirichlet = float(np.sum(np.diff(vals) ** 2)) / h
        if dirichlet == 0.0:
            raise ValueError("zero Dirichlet energy")
        return weighted / dirichlet
    if which == "F1":
        weighted = 0.0
        dirichlet = 0.0
        for kind, m, func in f:
            if m == 0:
                raise ValueError("F1 test functions must have zero angular mean (m >= 1)")
            vals = np.asarray(func(nodes), dtype=float).copy()
            vals[0] = vals[-1] = 0.0
            mass = h * float(np.sum(vals[1:-1] ** 2))
            weighted += mass
            dirichlet += float(np.sum(np.diff(vals) ** 2)) / h + m * m * mass
        if dirichlet == 0.0:
            raise ValueError("zero Dirichlet energy")
        return weighted / dirichlet
    raise ValueError(f"unknown Hardy class {which!r} (expected 'F0' or 'F1')")


def potential_form(spec: PotentialSpec, channel_profiles: Sequence[tuple[str, int, Callable]],
                   grid: Grid1D, n_theta: int = 256) -> float:
    """b_V[u] = int V |u|^2 dx for u given by real channel profiles."""
    chans = [(kind, m) for kind, m, _ in channel_profiles]
    m_max = max((m for _, m in chans), default=0)
    channel_set = ChannelSet(m_max)
    order = {c: i for i, c in enumerate(channel_set.channels)}
    t = grid.interior
    with np.errstate(over="ignore"):
        radii = np.exp(t)
    vhat = fourier_modes(spec, radii, 2 * m_max, n_theta)
    pmodes = vhat.real
    qmodes = -vhat.imag
    sys = BlockSystem2D(grid=grid, channel_set=channel_set, alpha=1.0,
                        chan_diag=np.zeros((channel_set.size, t.size)),
                        pmodes=np.where(np.arange(2 * m_max + 1)[None, :] == 0, 0.0, pmodes),
                        qmodes=qmodes, is_block_diagonal=False)
    U = np.zeros((channel_set.size, t.size))
    for kind, m, func in channel_profiles:
        U[order[(kind, m)]] += np.asarray(func(t), dtype=float)
    p0 = pmodes[:, 0]
    total = 0.0
    for i in range(t.size):
        R = sys.angular_residual(i)
        A = R + np.eye(channel_set.size) * p0[i]
        u = U[:, i]
        total += math.exp(2.0 * t[i]) * float(u @ A @ u)
    return grid.h * total


def qform_check(spec: PotentialSpec, f0: Callable, f1: Sequence[tuple[str, int, Callable]],
                grid: Grid1D, n_theta: int = 256) -> tuple[float, float]:
    """Evaluate b_V[f0 + f1] against 2 (b_V[f0] + b_V[f1]).

    The inequality lhs <= rhs holds pointwise for V >= 0; for radial V the
    cross term vanishes because the non-radial component is orthogonal to
    functions of |x|.
    """
    combined = [("const", 0, f0)] + list(f1)
    lhs = potential_form(spec, combined, grid, n_theta)
    b0 = potential_form(spec, [("const", 0, f0)], grid, n_theta)
    b1 = potential_form(spec, list(f1), grid, n_theta)
    return lhs, 2.0 * (b0 + b1)
