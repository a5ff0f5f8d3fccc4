"""Experiment drivers behind the CLI. Each returns a JSON-ready report dict."""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import __version__
from .cocycles import (
    Character,
    cocycle_identity_check,
    coboundary_decide,
    restrict,
    standard_phase_cocycle,
    symmetry_test,
    tensor_cocycle,
)
from .groups import IndexedGroup, describe, generator_words, sl2_count_formula
from .projective import regular_rep, tensor_sum
from .rings import FiniteRing
from .spectral import DENSE_CAP, DEFAULT_MAX_ITERS, DEFAULT_TOL, gap_bound, norm_dense, norm_power

PAIR_CAP = 10**7
THREADS_ENV = "COCYCLEGAP_THREADS"
SAMPLED_CHECK = 10**4
CSV_COLUMNS = ["k", "kprime", "m", "dim", "norm", "residual", "iterations", "gap", "coboundary_verdict", "wall_ms"]


class NotConverged(RuntimeError):
    pass


@dataclass
class SpectralConfig:
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    seeds: tuple[int, ...] = (0, 1, 2)
    method: str = "lanczos"

    def summary(self) -> dict:
        return {"tol": self.tol, "max_iters": self.max_iters, "seeds": list(self.seeds), "method": self.method}


def _ms(t0: float) -> int:
    return int(round((time.perf_counter() - t0) * 1000))


@lru_cache(maxsize=8)
def zmod_group(k: int) -> IndexedGroup:
    return IndexedGroup.zmod(k)


@lru_cache(maxsize=8)
def zmod_rep(k: int):
    G = zmod_group(k)
    return regular_rep(G, standard_phase_cocycle(G))


def _identity_summary(c, seed: int = 0) -> dict:
    N = c.group.size
    if N**3 <= 10**7:
        return cocycle_identity_check(c, "exhaustive").summary()
    return cocycle_identity_check(c, "sampled", n=SAMPLED_CHECK, seed=seed).summary()


def _resolve_group(k=None, ring=None) -> IndexedGroup:
    if (k is None) == (ring is None):
        raise ValueError("give exactly one of k or a ring descriptor")
    if k is not None:
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        return zmod_group(k)
    return IndexedGroup(FiniteRing.from_descriptor(ring))


def base_report(command: list[str]) -> dict:
    return {"command": list(command), "version": __version__}


# -- commands -------------------------------------------------------------------


def cmd_group_info(k: int | None = None, ring: dict | None = None, command=()) -> dict:
    t0 = time.perf_counter()
    G = _resolve_group(k, ring)
    out = base_report(command)
    out.update(
        group=G.descriptor(),
        ring_order=G.ring.size,
        translation_order=G.ring.size**2,
        sl2_order=G.sl2_size,
        group_order=G.size,
    )
    if G.ring.kind == "zmod":
        out["sl2_order_formula"] = sl2_count_formula(G.ring.n) if G.ring.n > 1 else 1
    out["wall_ms"] = _ms(t0)
    return out


def cmd_cocycle(
    k: int | None = None,
    ring: dict | None = None,
    character: list[int] | None = None,
    subgroup: str | None = None,
    decide: bool = False,
    mode: str = "auto",
    samples: int = 10**6,
    seed: int = 0,
    export: str | None = None,
    command=(),
) -> dict:
    t0 = time.perf_counter()
    G = _resolve_group(k, ring)
    chi = None
    if ring is not None or character is not None:
        weights = character if character is not None else [1]
        chi = Character.coefficient_functional(G.ring, weights)
    c = standard_phase_cocycle(G, chi)
    out = base_report(command)
    out.update(group=G.descriptor(), order=c.order)
    if chi is not None:
        out["character"] = {"weights": list(character or [1]), "order": chi.order}
    if mode == "auto":
        mode = "exhaustive" if G.size**3 <= 10**8 else "sampled"
    out["identity_check"] = cocycle_identity_check(c, mode, n=samples, seed=seed).summary()
    target = c
    if subgroup is not None:
        target = restrict(c, subgroup)
        out["subgroup"] = {"name": subgroup, "order": target.group.size}
        out["restricted_identity_check"] = _identity_summary(target, seed)
        if target.group.is_abelian:
            sym = symmetry_test(target)
            entry = {"symmetric": sym.symmetric}
            if not sym.symmetric:
                entry["witness"] = [describe(target.group, x) for x in sym.witness]
                entry["values"] = list(sym.values)
            out["symmetry"] = entry
    if decide or subgroup is not None:
        cert = coboundary_decide(target)
        out["coboundary"] = cert.summary(target.group)
        if cert.method == "symmetry":
            # the SNF solver is recorded alongside the fast path
            out["coboundary"]["snf_verdict"] = coboundary_decide(target, fast_path=False).verdict
    if export:
        with open(export, "w") as fh:
            fh.write(target.to_json())
        out["exported"] = export
    out["wall_ms"] = _ms(t0)
    return out


def cmd_norm_single(
    k: int, m: int = 3, spectral: SpectralConfig | None = None, delta: float | None = None, command=()
) -> dict:
    t0 = time.perf_counter()
    spectral = spectral or SpectralConfig()
    words = generator_words(m)
    op = tensor_sum(zmod_rep(k), zmod_rep(1), words)
    est = norm_power(op, tol=spectral.tol, max_iters=spectral.max_iters, seeds=spectral.seeds, method=spectral.method)
    out = base_report(command)
    out.update(
        group=zmod_group(k).descriptor(),
        k=k,
        m=m,
        words=[str(w) for w in words],
        dim=op.dim,
        spectral=spectral.summary(),
        norm=est.summary(),
        gap=m - est.value,
    )
    if op.dim <= DENSE_CAP:
        dense = norm_dense(op.to_dense())
        out["dense_norm"] = dense
        out["dense_relative_difference"] = abs(dense - est.value) / dense if dense else abs(est.value)
    if delta is not None:
        out["bound"] = _bound(m, delta)
    out["wall_ms"] = _ms(t0)
    return out


def _bound(m: int, delta: float) -> dict:
    b = gap_bound(m, delta)
    return {"delta": b.delta, "D": b.D, "note": "user-supplied delta"}


def pair_verdict(k: int, kp: int) -> dict | None:
    """Coboundary verdict of the tensor cocycle on the image of Z^2, for k, k' >= 3, k != k'."""
    if k == kp or min(k, kp) < 3:
        return None
    tc = tensor_cocycle(zmod_rep(k).cocycle, zmod_rep(kp).cocycle)
    ct = restrict(tc, "translations")
    cert = coboundary_decide(ct)
    out = cert.summary(ct.group)
    out["subgroup_order"] = ct.group.size
    out["order"] = ct.order
    return out


def cmd_norm_pair(
    k: int,
    kprime: int,
    m: int = 3,
    spectral: SpectralConfig | None = None,
    delta: float | None = None,
    cap: int = PAIR_CAP,
    command=(),
) -> dict:
    t0 = time.perf_counter()
    spectral = spectral or SpectralConfig()
    if min(k, kprime) < 1:
        raise ValueError("k and k' must be >= 1")
    words = generator_words(m)
    G1, G2 = zmod_group(k), zmod_group(kprime)
    dim = G1.size * G2.size
    if dim > cap:
        raise ValueError(f"tensor dimension {dim} exceeds cap {cap}")
    op = tensor_sum(zmod_rep(k), zmod_rep(kprime), words)
    est = norm_power(op, tol=spectral.tol, max_iters=spectral.max_iters, seeds=spectral.seeds, method=spectral.method)
    out = base_report(command)
    out.update(
        groups=[G1.descriptor(), G2.descriptor()],
        k=k,
        kprime=kprime,
        m=m,
        words=[str(w) for w in words],
        dim=dim,
        spectral=spectral.summary(),
        norm=est.summary(),
        gap=m - est.value,
        diagonal=k == kprime,
    )
    verdict = pair_verdict(k, kprime)
    if verdict is not None:
        out["tensor_cocycle"] = verdict
    if delta is not None:
        out["bound"] = _bound(m, delta)
    out["wall_ms"] = _ms(t0)
    return out


def _scan_row(args):
    k, kp, m, spectral, cap = args
    row = cmd_norm_pair(k, kp, m, spectral, cap=cap)
    row.pop("command")
    row.pop("version")
    return row


def scan_threads() -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def cmd_scan(
    kmin: int,
    kmax: int,
    m: int = 3,
    spectral: SpectralConfig | None = None,
    out_path: str | None = None,
    csv_path: str | None = None,
    delta: float | None = None,
    cap: int = PAIR_CAP,
    threads: int | None = None,
    command=(),
) -> dict:
    t0 = time.perf_counter()
    spectral = spectral or SpectralConfig()
    if kmin > kmax:
        raise ValueError(f"empty grid: kmin={kmin} > kmax={kmax}")
    if kmin < 1:
        raise ValueError("kmin must be >= 1")
    pairs = [(k, kp) for k in range(kmin, kmax + 1) for kp in range(k, kmax + 1)]
    for k, kp in pairs:
        dim = zmod_group(k).size * zmod_group(kp).size
        if dim > cap:
            raise ValueError(f"pair ({k},{kp}) has dimension {dim} above cap {cap}")
    jobs = [(k, kp, m, spectral, cap) for k, kp in pairs]
    threads = threads or scan_threads()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
            rows = list(pool.map(_scan_row, jobs))
    else:
        rows = [_scan_row(j) for j in jobs]
    rows.sort(key=lambda r: (r["k"], r["kprime"]))
    off = [r for r in rows if not r["diagonal"]]
    summary = {
        "kmin": kmin,
        "kmax": kmax,
        "m": m,
        "rows": len(rows),
        "max_offdiagonal_norm": max((r["norm"]["value"] for r in off), default=None),
        "min_gap": min((r["gap"] for r in off), default=None),
        "max_diagonal_deviation": max((abs(r["norm"]["value"] - m) for r in rows if r["diagonal"]), default=None),
        "all_converged": all(r["norm"]["converged"] for r in rows),
    }
    if delta is not None:
        summary["bound"] = _bound(m, delta)
    report = base_report(command)
    report.update(spectral=spectral.summary(), summary=summary, rows=rows, wall_ms=_ms(t0))
    if out_path:
        write_jsonl(out_path, report)
    if csv_path:
        write_csv(csv_path, rows)
    return report


# -- serialization -----------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


def write_jsonl(path: str, report: dict) -> None:
    """One line per row, then a header/summary line."""
    head = {key: val for key, val in report.items() if key != "rows"}
    with open(path, "w") as fh:
        for row in report["rows"]:
            fh.write(dumps({"row": row}) + "\n")
        fh.write(dumps({"summary": head}) + "\n")


def write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in rows:
            verdict = r.get("tensor_cocycle", {}).get("verdict", "")
            w.writerow(
                [r["k"], r["kprime"], r["m"], r["dim"], repr(r["norm"]["value"]), repr(r["norm"]["residual"]),
                 r["norm"]["iterations"], repr(r["gap"]), verdict, r["wall_ms"]]
            )


def strip_timing(obj):
    """Drop every wall_ms field, recursively."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "wall_ms"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def is_finite_report(report: dict) -> bool:
    return all(math.isfinite(r["norm"]["value"]) for r in report.get("rows", []))
