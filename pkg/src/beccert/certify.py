"""Certified scans of the smoothing-inequality bound over an epsilon segment.

A scan walks the segment right to left.  Each grid point is evaluated with
locally optimized parameters (U0, U); monotonicity of the bound functions
in eps turns one evaluation into a certificate for the whole subinterval
[eps * bound / target, eps].  The walk therefore takes large steps where
the bound is slack and geometrically shrinking ones near its peak.

For the i.i.d. case every grid point takes a maximum over the admissible
finite summand counts n in [n0(eps), m) plus a uniform tail bound with
threshold max(m, n0(eps)); the threshold grows with 1/eps^2 because the
tail estimate must track the least admissible n for the bound to close at
small eps.

Grid points are generated in deterministic speculative batches (a damped
geometric prediction of the next steps), so a worker pool can evaluate
ahead of the walk without changing the resulting grid; certificates are
bit-identical for a fixed configuration regardless of parallelism.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

from ._backend import BACKEND
from .bounds import n_zero, small_eps_bound_general, small_eps_bound_iid
from .golden import golden_min
from .prawitz import (
    DEFAULT_QUAD_TOL,
    BoundMode,
    General,
    IidFinite,
    IidTail,
    PrawitzParams,
    prawitz_rhs,
)

SCHEMA_VERSION = "v1"
GRID_POLICY = "anchor-damped-batch8/v1"
OPTIMIZER_POLICY = "coord-golden/v1"

GENERAL_TARGET = 0.5606
GENERAL_EPS_LO = 0.02
IID_TARGET = 0.4785
IID_EPS_LO = 0.037
DEFAULT_TAIL_M = 30

GENERAL_MANDATORY = (0.5092,)
IID_MANDATORY = (0.3536,)

_BATCH = 8
_DAMP = 0.5
_ESCALATE_FRACTION = 0.97
_OPTIMIZE_GATE = 0.93
_MAX_ENTRIES = 30000
_U0_MIN = 0.05
_U0_MAX = 34.0
_DEFAULT_SEED = (2.5, 6.0)


def _seed_point_count(eps_lo, eps_hi) -> int:
    return max(4, min(24, round(6.0 * math.log(eps_hi / eps_lo))))


class CertificationError(RuntimeError):
    """The target constant is not certifiable at some epsilon."""

    def __init__(self, epsilon, message):
        super().__init__(f"certification failed at eps={epsilon!r}: {message}")
        self.epsilon = epsilon


def default_quad_tol() -> float:
    env = os.environ.get("BECCERT_QUAD_TOL")
    return float(env) if env else DEFAULT_QUAD_TOL


@dataclass(frozen=True)
class OptResult:
    u0: float
    u: float
    dstar: float
    margin: float

    @property
    def total(self) -> float:
        return self.dstar + self.margin


def optimize_params(mode: BoundMode, seed, *, quad_tol=None, rel_tol=1e-4,
                    max_sweeps=8) -> OptResult:
    """Derivative-free local minimization of dstar + margin over (U0, U).

    Coordinate golden-section passes with re-centered brackets; stops when
    a full sweep improves by less than rel_tol relatively.  Returns the
    best point found (a valid bound regardless of optimality).
    """
    quad_tol = default_quad_tol() if quad_tol is None else quad_tol
    cache: dict = {}

    def ev(u0, u):
        key = (u0, u)
        if key not in cache:
            u0c = min(max(u0, _U0_MIN), _U0_MAX)
            uc = max(u, u0c)
            res = prawitz_rhs(mode, PrawitzParams(u0c, uc, quad_tol))
            cache[key] = (res.total, res)
        return cache[key][0]

    u0, u = seed
    u0 = min(max(u0, _U0_MIN), _U0_MAX)
    u = max(u, u0)
    best = ev(u0, u)
    for _ in range(max_sweeps):
        prev = best
        lo = max(_U0_MIN, 0.45 * u0)
        hi = min(max(u, _U0_MIN), 2.2 * u0, _U0_MAX)
        u0, best, _ = golden_min(lambda x: ev(x, u), lo, hi,
                                 xtol=max(1e-4 * u0, 1e-7))
        lo2 = max(u0, 0.45 * u)
        hi2 = 2.2 * u
        u, best, _ = golden_min(lambda x: ev(u0, x), lo2, hi2,
                                xtol=max(1e-4 * u, 1e-7))
        if prev - best <= rel_tol * max(best, 1e-12):
            break
    _, res = cache[(u0, u)]
    return OptResult(u0=u0, u=max(u, u0), dstar=res.dstar, margin=res.margin)


@dataclass(frozen=True)
class ScanEntry:
    """One certified grid point: the bound at eps extends to bridged_to."""

    epsilon: float
    u0: float
    u: float
    dstar: float
    margin: float
    bridged_to: float
    n_detail: dict | None = None


@dataclass(frozen=True)
class Certificate:
    schema: str
    mode: str
    target: float
    eps_lo: float
    eps_hi: float
    m: int | None
    quad_tol: float
    entries: tuple
    small_eps_witness: dict | None
    large_eps_note: dict
    global_bound: float | None
    config: dict
    fingerprint: str
    bridging_spotcheck: dict | None = None

    def to_json(self) -> str:
        data = asdict(self)
        data["entries"] = [asdict(e) for e in self.entries]
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        data = json.loads(text)
        data["entries"] = tuple(ScanEntry(**e) for e in data["entries"])
        return cls(**data)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["epsilon", "u0", "u", "dstar", "margin", "certified_from"])
        for e in self.entries:
            w.writerow([repr(e.epsilon), repr(e.u0), repr(e.u), repr(e.dstar),
                        repr(e.margin), repr(e.bridged_to)])
        return buf.getvalue()


def _config_dict(mode, target, eps_lo, eps_hi, m, quad_tol):
    return {
        "schema": SCHEMA_VERSION,
        "mode": mode,
        "target": target,
        "eps_lo": eps_lo,
        "eps_hi": eps_hi,
        "m": m,
        "quad_tol": quad_tol,
        "grid_policy": GRID_POLICY,
        "optimizer": OPTIMIZER_POLICY,
        "backend": BACKEND,
    }


def _fingerprint(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()
    ).hexdigest()


# ---------------------------------------------------------------------------
# grid-point evaluation (module-level so process pools can pickle the work)

def _eval_general_point(payload):
    eps, seed, quad_tol = payload
    opt = optimize_params(General(eps), seed, quad_tol=quad_tol)
    return {"u0": opt.u0, "u": opt.u, "dstar": opt.dstar,
            "margin": opt.margin, "n_detail": None}


def _iid_modes(eps: float, m: int):
    n0 = n_zero(eps)
    tail_threshold = max(m, n0)
    finite = [IidFinite(eps, n) for n in range(n0, m)] if n0 < m else []
    return finite, IidTail(eps, tail_threshold)


def _eval_iid_point(payload):
    """One i.i.d. grid point: stale bounds for every admissible mode, then
    full optimization of the maximal and of all near-target modes."""
    eps, seeds, m, target, quad_tol = payload
    finite, tail = _iid_modes(eps, m)
    modes = finite + [tail]

    stale = {}
    for mode in modes:
        seed = seeds["tail"] if isinstance(mode, IidTail) else seeds["finite"]
        res = prawitz_rhs(mode, PrawitzParams(
            min(max(seed[0], _U0_MIN), _U0_MAX),
            max(seed[1], seed[0], _U0_MIN), quad_tol))
        stale[mode] = (res.total, seed, res)

    worst = max(stale, key=lambda md: stale[md][0])
    to_optimize = {md for md, (tot, _, _) in stale.items()
                   if tot > _ESCALATE_FRACTION * target}
    # far below target the table parameters are tight enough; optimizing
    # the maximal mode only matters once the bridge step starts to shrink
    if stale[worst][0] > _OPTIMIZE_GATE * target:
        to_optimize.add(worst)

    final = {}
    for mode in modes:
        tot, seed, res = stale[mode]
        if mode in to_optimize:
            opt = optimize_params(mode, seed, quad_tol=quad_tol)
            final[mode] = (opt.total, opt.u0, opt.u, opt.dstar, opt.margin)
        else:
            final[mode] = (tot, seed[0], seed[1], res.dstar, res.margin)

    winner = max(final, key=lambda md: final[md][0])
    tot, u0, u, dstar, margin = final[winner]
    n_detail = {}
    for mode, (t, _, _, _, _) in final.items():
        key = f"tail@{mode.m}" if isinstance(mode, IidTail) else str(mode.n)
        n_detail[key] = t
    return {"u0": u0, "u": u, "dstar": dstar, "margin": margin,
            "n_detail": n_detail}


# ---------------------------------------------------------------------------
# seed tables

def _geom_grid(lo, hi, count):
    ratio = (hi / lo) ** (1.0 / (count - 1))
    return [lo * ratio**k for k in range(count)]


def _build_general_seeds(eps_lo, eps_hi, quad_tol):
    pts = _geom_grid(eps_lo, eps_hi, _seed_point_count(eps_lo, eps_hi))
    table = {}
    seed = _DEFAULT_SEED
    for eps in reversed(pts):
        opt = optimize_params(General(eps), seed, quad_tol=quad_tol)
        table[eps] = {"finite": (opt.u0, opt.u), "tail": (opt.u0, opt.u)}
        seed = (opt.u0, opt.u)
    return table


def _build_iid_seeds(eps_lo, eps_hi, m, quad_tol):
    pts = _geom_grid(eps_lo, eps_hi, _seed_point_count(eps_lo, eps_hi))
    table = {}
    seed_f = _DEFAULT_SEED
    seed_t = _DEFAULT_SEED
    for eps in reversed(pts):
        finite, tail = _iid_modes(eps, m)
        entry = {}
        if finite:
            opt = optimize_params(finite[0], seed_f, quad_tol=quad_tol)
            seed_f = (opt.u0, opt.u)
        entry["finite"] = seed_f
        opt_t = optimize_params(tail, seed_t, quad_tol=quad_tol)
        seed_t = (opt_t.u0, opt_t.u)
        entry["tail"] = seed_t
        table[eps] = entry
    return table


def _nearest_seed(table, eps):
    key = min(table, key=lambda e: abs(math.log(e) - math.log(eps)))
    return table[key]


# ---------------------------------------------------------------------------
# the scan walker

class _Walker:
    """Right-to-left walk with deterministic speculative batches.

    Batch points follow a damped geometric prediction of the bridging
    ratio; a predicted point is consumed only if it keeps coverage
    contiguous, otherwise the walk re-anchors at the exact bridge edge and
    discards the rest of the batch.  The resulting grid depends only on
    the evaluation results, never on pool timing.
    """

    def __init__(self, make_payload, eval_fn, executor, target, eps_lo,
                 mandatory, progress=None):
        self.make_payload = make_payload
        self.eval_fn = eval_fn
        self.executor = executor
        self.target = target
        self.eps_lo = eps_lo
        self.mandatory = sorted(mandatory, reverse=True)
        self.progress = progress
        self.cache = {}

    def _clamp(self, eps_next, eps_cur):
        for mp in self.mandatory:
            if eps_next < mp < eps_cur:
                return mp
        return max(eps_next, self.eps_lo)

    def _batch_chain(self, anchor_eps, last_ratio):
        chain = [anchor_eps]
        if last_ratio is None:
            return chain
        r = 1.0 - _DAMP * (1.0 - last_ratio)
        r = min(max(r, 1e-6), 1.0 - 1e-9)
        e = anchor_eps
        while len(chain) < _BATCH:
            nxt = self._clamp(e * r, e)
            if nxt >= e or nxt < self.eps_lo:
                break
            chain.append(nxt)
            e = nxt
            if e == self.eps_lo or e in self.mandatory:
                break
        return chain

    def _ensure(self, chain):
        missing = [e for e in chain if e not in self.cache]
        if missing:
            payloads = [self.make_payload(e) for e in missing]
            for e, res in zip(missing, self.executor(self.eval_fn, payloads)):
                self.cache[e] = res

    def run(self, eps_hi):
        entries = []
        eps = eps_hi
        last_ratio = None
        chain_pos = None
        chain = []
        while True:
            if eps not in self.cache:
                chain = self._batch_chain(eps, last_ratio)
                chain_pos = 0
                self._ensure(chain)
            res = self.cache.pop(eps)
            bound = res["dstar"] + res["margin"]
            ratio = bound / self.target
            if ratio >= 1.0:
                raise CertificationError(
                    eps,
                    f"best bound {bound:.6f} with (U0, U)=({res['u0']:.4f}, "
                    f"{res['u']:.4f}) does not beat target {self.target}",
                )
            # one-ULP outward nudge keeps the bridged bound at the interval
            # edge strictly below the target in floating point
            lo = eps * ratio * (1.0 + 4e-16)
            bridged = max(lo, self.eps_lo)
            entries.append(ScanEntry(
                epsilon=eps, u0=res["u0"], u=res["u"], dstar=res["dstar"],
                margin=res["margin"], bridged_to=bridged,
                n_detail=res["n_detail"],
            ))
            if self.progress is not None:
                self.progress(eps, bound)
            if lo <= self.eps_lo:
                # coverage is complete, but mandatory points still inside
                # the segment get their own entries before stopping
                pending = next((m for m in self.mandatory
                                if self.eps_lo < m < eps), None)
                if pending is None:
                    break
                last_ratio = ratio
                eps = pending
                chain_pos = None
                continue
            if len(entries) >= _MAX_ENTRIES:
                raise CertificationError(
                    eps, f"scan exceeded {_MAX_ENTRIES} grid points"
                )
            last_ratio = ratio
            nxt = None
            if chain_pos is not None and chain_pos + 1 < len(chain):
                cand = chain[chain_pos + 1]
                # a predicted point is usable only if it keeps coverage
                # contiguous and does not skip a pending mandatory point
                if cand >= self._clamp(lo, eps):
                    nxt = cand
                    chain_pos += 1
            if nxt is None:
                nxt = self._clamp(lo, eps)
                chain_pos = None
            eps = nxt
        return entries


def _make_executor(parallelism):
    if parallelism <= 1:
        return lambda fn, payloads: [fn(p) for p in payloads], None
    pool = ProcessPoolExecutor(max_workers=parallelism)
    return (lambda fn, payloads: list(pool.map(fn, payloads))), pool


def _run_scan(mode_name, eps_lo, eps_hi, target, m, quad_tol, parallelism,
              mandatory, progress=None):
    if not eps_lo < eps_hi:
        raise ValueError("need eps_lo < eps_hi")
    executor, pool = _make_executor(parallelism)
    try:
        if mode_name == "general":
            seeds = _build_general_seeds(eps_lo, eps_hi, quad_tol)

            def payload(eps):
                return (eps, _nearest_seed(seeds, eps)["finite"], quad_tol)

            eval_fn = _eval_general_point
        else:
            seeds = _build_iid_seeds(eps_lo, eps_hi, m, quad_tol)

            def payload(eps):
                return (eps, _nearest_seed(seeds, eps), m, target, quad_tol)

            eval_fn = _eval_iid_point

        walker = _Walker(payload, eval_fn, executor, target, eps_lo,
                         mandatory, progress=progress)
        entries = walker.run(eps_hi)
    finally:
        if pool is not None:
            pool.shutdown()

    config = _config_dict(mode_name, target, eps_lo, eps_hi, m, quad_tol)
    return Certificate(
        schema=SCHEMA_VERSION,
        mode=mode_name,
        target=target,
        eps_lo=eps_lo,
        eps_hi=eps_hi,
        m=m,
        quad_tol=quad_tol,
        entries=tuple(entries),
        small_eps_witness=None,
        large_eps_note={
            "from_eps": 1.0 / target,
            "reason": "kolmogorov distance never exceeds 1, so rho/eps <= "
                      "target once eps >= 1/target",
        },
        global_bound=None,
        config=config,
        fingerprint=_fingerprint(config),
    )


def certified_scan_general(eps_lo=GENERAL_EPS_LO, eps_hi=None,
                           target=GENERAL_TARGET, *, quad_tol=None,
                           parallelism=1, mandatory=GENERAL_MANDATORY,
                           progress=None) -> Certificate:
    quad_tol = default_quad_tol() if quad_tol is None else quad_tol
    eps_hi = 1.0 / target if eps_hi is None else eps_hi
    mandatory = tuple(p for p in mandatory if eps_lo < p < eps_hi)
    return _run_scan("general", eps_lo, eps_hi, target, None, quad_tol,
                     parallelism, mandatory, progress=progress)


def certified_scan_iid(eps_lo=IID_EPS_LO, eps_hi=None, target=IID_TARGET,
                       m=DEFAULT_TAIL_M, *, quad_tol=None, parallelism=1,
                       mandatory=IID_MANDATORY, progress=None) -> Certificate:
    if m < 2:
        raise ValueError("m must be >= 2")
    quad_tol = default_quad_tol() if quad_tol is None else quad_tol
    eps_hi = 1.0 / target if eps_hi is None else eps_hi
    mandatory = tuple(p for p in mandatory if eps_lo < p < eps_hi)
    return _run_scan("iid", eps_lo, eps_hi, target, m, quad_tol, parallelism,
                     mandatory, progress=progress)


# ---------------------------------------------------------------------------
# regime stitching

def _check_coverage(cert: Certificate):
    entries = cert.entries
    if not entries:
        raise CertificationError(cert.eps_hi, "empty certificate")
    if entries[0].epsilon < cert.eps_hi:
        raise CertificationError(entries[0].epsilon,
                                 "scan does not start at eps_hi")
    for prev, nxt in zip(entries, entries[1:]):
        if nxt.epsilon < prev.bridged_to:
            raise CertificationError(
                nxt.epsilon,
                f"coverage gap: next grid point below {prev.bridged_to!r}",
            )
    if entries[-1].bridged_to > cert.eps_lo:
        raise CertificationError(entries[-1].bridged_to,
                                 "scan does not reach eps_lo")


def _entry_bound(entry: ScanEntry) -> float:
    return (entry.epsilon / entry.bridged_to) * (entry.dstar + entry.margin)


def _small_eps_witness_general(eps_lo, target):
    grid = [eps_lo * k / 100.0 for k in range(1, 101)]
    vals = []
    for e in grid:
        v = small_eps_bound_general(e)
        if v is None or v > target:
            raise CertificationError(e, f"small-eps bound {v!r} fails target")
        vals.append(v)
    if any(b < a - 1e-12 for a, b in zip(vals, vals[1:])):
        raise CertificationError(eps_lo, "small-eps bound not nondecreasing")
    return {
        "kind": "uniform-inequality-grid",
        "grid_points": len(grid),
        "max_value": max(vals),
        "value_at_eps_lo": vals[-1],
        "monotone_nondecreasing": True,
    }


def _small_eps_witness_iid(eps_lo, target):
    """Dominate sup over (0, eps_lo] by piece left edges eps = 1/sqrt(k).

    Within each n0-piece the bound is a constant plus positive multiples
    of 1/eps, so its supremum sits at the left edge; the edge values are
    verified to decrease in k on a dense range and spot-checked far out.
    """
    k0 = n_zero(eps_lo)
    edge_ks = list(range(k0, k0 + 301)) + [10**4, 10**6, 10**8]
    vals = []
    for k in edge_ks:
        v = small_eps_bound_iid(1.0 / math.sqrt(k))
        if v is None or v > target:
            raise CertificationError(1.0 / math.sqrt(k),
                                     f"small-eps bound {v!r} fails target")
        vals.append(v)
    if any(b > a + 1e-12 for a, b in zip(vals, vals[1:])):
        raise CertificationError(eps_lo,
                                 "piece-edge values not nonincreasing in n0")
    v_lo = small_eps_bound_iid(eps_lo)
    if v_lo is None or v_lo > target:
        raise CertificationError(eps_lo, f"small-eps bound {v_lo!r} at eps_lo")
    return {
        "kind": "piece-left-edge-domination",
        "first_n0": k0,
        "edge_points": len(edge_ks),
        "max_value": max(vals),
        "value_at_eps_lo": v_lo,
        "edges_nonincreasing": True,
        "note": "within each n0-piece the bound is A + B/eps with A, B >= 0, "
                "so the piece supremum is its left edge",
    }


def _entry_worst_mode(cert: Certificate, entry: ScanEntry, epsilon: float):
    if cert.mode == "general":
        return General(epsilon)
    key = max(entry.n_detail, key=entry.n_detail.get)
    if key.startswith("tail@"):
        return IidTail(epsilon, int(key.split("@", 1)[1]))
    return IidFinite(epsilon, int(key))


def _bridging_spotcheck(cert: Certificate, samples=8) -> dict:
    """Re-verify the bridging inequality on this certificate's own grid.

    For sampled entries, the bound at the geometric midpoint of the
    certified subinterval (same mode, same (U0, U)) must not exceed the
    bridged value (eps/eps') * D*(eps); this is exactly the monotonicity
    property the scan relies on.
    """
    entries = [e for e in cert.entries if e.bridged_to < e.epsilon]
    if not entries:
        return {"checked": 0, "max_excess": 0.0}
    step = max(1, len(entries) // samples)
    picked = entries[::step][:samples]
    worst = -math.inf
    for e in picked:
        eps_mid = math.sqrt(e.bridged_to * e.epsilon)
        mode = _entry_worst_mode(cert, e, eps_mid)
        res = prawitz_rhs(mode, PrawitzParams(e.u0, e.u, cert.quad_tol))
        allowed = (e.epsilon / eps_mid) * (e.dstar + e.margin)
        excess = res.total - allowed
        worst = max(worst, excess)
        if excess > 1e-9:
            raise CertificationError(
                eps_mid, f"bridging violated: {res.total!r} > {allowed!r}")
    return {"checked": len(picked), "max_excess": worst}


def stitch_regimes(mode: str, cert: Certificate) -> Certificate:
    """Combine the three regimes into a certified global constant.

    Verifies scan coverage and per-entry soundness, re-verifies the
    bridging inequality on sampled grid points, runs the small-eps uniform
    bound below eps_lo, records the trivial regime above 1/target, and
    writes the global bound into the certificate.  Raises
    CertificationError if any regime check fails.
    """
    if mode != cert.mode:
        raise ValueError(f"mode mismatch: {mode!r} vs certificate {cert.mode!r}")
    _check_coverage(cert)
    worst = 0.0
    for e in cert.entries:
        bound = _entry_bound(e)
        if bound > cert.target + 1e-12:
            raise CertificationError(e.epsilon,
                                     f"bridged bound {bound!r} exceeds target")
        worst = max(worst, bound)
    spotcheck = _bridging_spotcheck(cert)
    if mode == "general":
        witness = _small_eps_witness_general(cert.eps_lo, cert.target)
    else:
        witness = _small_eps_witness_iid(cert.eps_lo, cert.target)
    global_bound = max(worst, witness["max_value"])
    if global_bound > cert.target:
        raise CertificationError(cert.eps_lo,
                                 f"global bound {global_bound!r} exceeds target")
    return replace(cert, small_eps_witness=witness, global_bound=global_bound,
                   bridging_spotcheck=spotcheck)
