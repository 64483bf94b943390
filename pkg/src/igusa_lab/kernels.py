"""Chunked exact evaluation of integer polynomials over finite product boxes.

Values are reduced modulo ``M`` after every multiplication.  With
``M <= SAFE_MODULUS`` all intermediates fit in int64; larger moduli fall back
to object arrays of Python integers.
"""

from __future__ import annotations

import os
from typing import Iterator, Sequence

import numpy as np

from .poly import Polynomial

SAFE_MODULUS = 3_037_000_499  # floor(sqrt(2**63 - 1))
DEFAULT_CHUNK = 1 << 18
DEFAULT_BUDGET = 10**9
BINCOUNT_LIMIT = 1 << 22
DENSE_LIMIT = 1 << 27  # a dense int64 count array of this length is about 1 GB


class BudgetExceeded(RuntimeError):
    pass


def evaluation_budget() -> int:
    env = os.environ.get("IGUSA_LAB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def check_budget(points: int, budget: int | None = None) -> None:
    limit = evaluation_budget() if budget is None else budget
    if points > limit:
        raise BudgetExceeded(f"{points} evaluation points exceed the budget of {limit}")


TABLE_LIMIT = 1 << 20  # longer coordinate domains get their powers computed per chunk


def _power_tables(polys: Sequence[Polynomial], domains, M: int, dtype):
    n = len(domains)
    tables = []
    for j in range(n):
        if len(domains[j]) > TABLE_LIMIT:
            tables.append(None)
            continue
        deg = max((p.degree_in(j) for p in polys), default=0)
        base = np.asarray(domains[j]).astype(dtype) % M
        rows = [np.ones_like(base)]
        for _ in range(deg):
            rows.append(rows[-1] * base % M)
        tables.append(rows)
    return tables


def _chunk_powers(values: np.ndarray, deg: int, M: int, dtype) -> list[np.ndarray]:
    base = values.astype(dtype) % M
    rows = [np.ones_like(base)]
    for _ in range(deg):
        rows.append(rows[-1] * base % M)
    return rows


def iterate_values(polys: Sequence[Polynomial], domains: Sequence[np.ndarray], modulus: int,
                   chunk_size: int = DEFAULT_CHUNK, with_coords: bool = False
                   ) -> Iterator[tuple[int, list[np.ndarray], list[np.ndarray] | None]]:
    """Yield ``(offset, values, coords)`` over the product of ``domains`` in C order."""
    M = int(modulus)
    dtype = np.int64 if M <= SAFE_MODULUS else object
    n = len(domains)
    sizes = [len(d) for d in domains]
    total = int(np.prod(sizes, dtype=object)) if n else 1
    strides = [1] * n
    for j in range(n - 2, -1, -1):
        strides[j] = strides[j + 1] * sizes[j + 1]
    tables = _power_tables(polys, domains, M, dtype)
    degs = [max((p.degree_in(j) for p in polys), default=0) for j in range(n)]
    term_lists = [[(e, c % M) for e, c in p.items()] for p in polys]
    chunk_size = max(1, int(chunk_size))
    for start in range(0, total, chunk_size):
        stop = min(total, start + chunk_size)
        flat = np.arange(start, stop, dtype=np.int64)
        idx = [(flat // strides[j]) % sizes[j] for j in range(n)]
        powers = [None if tables[j] is not None
                  else _chunk_powers(np.asarray(domains[j])[idx[j]], degs[j], M, dtype)
                  for j in range(n)]
        values = []
        for terms in term_lists:
            acc = np.zeros(stop - start, dtype=dtype)
            for e, c in terms:
                v = np.full(stop - start, c, dtype=dtype)
                for j, ej in enumerate(e):
                    if ej:
                        pw = powers[j][ej] if tables[j] is None else tables[j][ej][idx[j]]
                        v = v * pw % M
                acc = (acc + v) % M
            values.append(acc)
        coords = [np.asarray(domains[j])[idx[j]] for j in range(n)] if with_coords else None
        yield start, values, coords


def value_histogram(poly: Polynomial, domains: Sequence[np.ndarray], modulus: int,
                    chunk_size: int = DEFAULT_CHUNK) -> tuple[np.ndarray, np.ndarray]:
    """Sorted residues and their counts for ``poly`` over the product box."""
    M = int(modulus)
    if M <= BINCOUNT_LIMIT:
        counts = np.zeros(M, dtype=np.int64)
        for _, (vals,), _ in iterate_values([poly], domains, M, chunk_size):
            counts += np.bincount(vals.astype(np.int64), minlength=M)
        res = np.flatnonzero(counts)
        return res.astype(np.int64), counts[res]
    if M <= DENSE_LIMIT:
        counts = np.zeros(M, dtype=np.int64)
        for _, (vals,), _ in iterate_values([poly], domains, M, chunk_size):
            r, c = np.unique(vals, return_counts=True)
            counts[r] += c
        res = np.flatnonzero(counts)
        return res.astype(np.int64), counts[res]
    if M > SAFE_MODULUS:
        acc: dict[int, int] = {}
        for _, (vals,), _ in iterate_values([poly], domains, M, chunk_size):
            r, c = np.unique(vals, return_counts=True)
            for a, b in zip(r.tolist(), c.tolist()):
                acc[a] = acc.get(a, 0) + b
        keys = sorted(acc)
        return np.array(keys, dtype=object), np.array([acc[k] for k in keys], dtype=np.int64)
    # merge per-chunk histograms in batches so the work stays near-linear
    res = np.zeros(0, dtype=np.int64)
    cnt = np.zeros(0, dtype=np.int64)
    pending: list[tuple[np.ndarray, np.ndarray]] = []
    pending_size = 0
    for _, (vals,), _ in iterate_values([poly], domains, M, chunk_size):
        r, c = np.unique(vals, return_counts=True)
        pending.append((r, c))
        pending_size += len(r)
        if pending_size >= max(BINCOUNT_LIMIT, len(res)):
            res, cnt = _merge_sorted([(res, cnt)] + pending)
            pending, pending_size = [], 0
    return _merge_sorted([(res, cnt)] + pending)


def _merge_sorted(parts) -> tuple[np.ndarray, np.ndarray]:
    r = np.concatenate([a for a, _ in parts])
    c = np.concatenate([b for _, b in parts]).astype(np.int64)
    if not len(r):
        return r.astype(np.int64), c
    order = np.argsort(r, kind="stable")
    r, c = r[order], c[order]
    starts = np.concatenate([[0], np.flatnonzero(np.diff(r)) + 1])
    return r[starts].astype(np.int64), np.add.reduceat(c, starts)


def variable_blocks(poly: Polynomial) -> list[list[int]]:
    """Connected components of variables linked by co-occurrence in a term.

    Variables absent from ``poly`` are collected into one trailing block.
    """
    parent = list(range(poly.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    used = set()
    for e in poly.support():
        vs = [j for j, k in enumerate(e) if k]
        used.update(vs)
        for a, b in zip(vs, vs[1:]):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, list[int]] = {}
    for j in sorted(used):
        comps.setdefault(find(j), []).append(j)
    blocks = sorted(comps.values())
    absent = [j for j in range(poly.n) if j not in used]
    if absent:
        blocks.append(absent)
    return blocks


def block_polynomial(poly: Polynomial, block: Sequence[int], with_constant: bool) -> Polynomial:
    """Terms of ``poly`` living on ``block``, re-indexed to ``len(block)`` variables."""
    bset = set(block)
    terms = {}
    for e, c in poly.items():
        vs = {j for j, k in enumerate(e) if k}
        if (vs and vs <= bset) or (not vs and with_constant):
            terms[tuple(e[j] for j in block)] = c
    return Polynomial(len(block), terms)
