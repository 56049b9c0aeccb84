"""Exhaustive satisfiability oracle for very small structures.

Frames are enumerated up to isomorphism, keeping only those generated from
world 0.  Truth at a world depends only on the part of the structure it
generates, so every model can be cut down to such a frame.  For each frame, all valuations of the formula's letters are
evaluated at once: the truth value of a subformula at a world is a bitset
indexed by valuations, packed into 64-bit words.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from . import formula as fm
from .kripke import ALL_CLASSES, KripkeStructure, PointedStructure, check, frame_properties
from .verdict import Verdict

MAX_SIZE = 4
MAX_VALUATION_BITS = 24

_FLAG = {c: 1 << i for i, c in enumerate(ALL_CLASSES)}


def class_mask(frames) -> int:
    return sum(_FLAG[c] for c in set(frames))


@functools.lru_cache(maxsize=None)
def frames_of_size(k: int):
    """Frames on worlds 0..k-1 generated from 0, one per isomorphism class.

    Returns the relations as a (N, k, k) boolean array together with the
    frame classes of each, encoded as bit flags.
    """
    if not 1 <= k <= MAX_SIZE:
        raise ValueError(f"frame enumeration supports 1..{MAX_SIZE} worlds")
    kk = k * k
    codes = np.arange(1 << kk, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(kk)) & 1).astype(bool)
    rel = bits.reshape(-1, k, k)
    reach = rel[:, 0, :].copy()
    reach[:, 0] = True
    for _ in range(k):
        reach = reach | np.any(reach[:, :, None] & rel, axis=1)
    keep = reach.all(axis=1)
    # canonical representative: smallest code among relabellings fixing 0
    weights = np.int64(1) << np.arange(kk, dtype=np.int64)
    best = codes.copy()
    for perm in itertools.permutations(range(1, k)):
        p = (0,) + perm
        target = np.array([p[a] * k + p[b] for a in range(k) for b in range(k)])
        permuted = bits @ weights[target]
        best = np.minimum(best, permuted)
    keep &= best == codes
    rel = rel[keep]
    return rel, np.array([class_mask(frame_properties(r)) for r in rel], dtype=np.int64)


def _patterns(nbits: int):
    """Bitset of valuations in which variable b is true, for each b."""
    V = 1 << nbits
    v = np.arange(V, dtype=np.int64)
    out = []
    for b in range(nbits):
        out.append(_pack(((v >> b) & 1).astype(bool)))
    return out, _pack(np.ones(V, dtype=bool))


def _pack(flags):
    raw = np.packbits(flags, bitorder="little")
    pad = (-len(raw)) % 8
    if pad:
        raw = np.concatenate([raw, np.zeros(pad, dtype=np.uint8)])
    return raw.view(np.uint64)


def _at_least(count, terms, full):
    if count <= 0:
        return np.broadcast_to(full, terms[0].shape).copy()
    if count > len(terms):
        return np.zeros_like(terms[0])
    # reach[j]: valuations where at least j+1 of the terms seen so far hold
    reach = [np.zeros_like(terms[0]) for _ in range(count)]
    for t in terms:
        for j in range(count - 1, 0, -1):
            reach[j] |= reach[j - 1] & t
        reach[0] |= t
    return reach[count - 1]


def _evaluate(f, rel, names):
    """Root bitsets, shape (N, words), over all valuations of ``names``."""
    N, k, _ = rel.shape
    L = len(names)
    if k * L > MAX_VALUATION_BITS:
        raise ValueError("too many letters for exhaustive enumeration")
    pats, full = _patterns(k * L)
    col = {n: i for i, n in enumerate(names)}
    ones = np.uint64(0xFFFFFFFFFFFFFFFF)
    edge = np.where(rel, ones, np.uint64(0))[..., None]  # (N, k, k, 1)
    memo = {}
    for g in fm.subformulas(f):
        if g in memo:
            continue
        if isinstance(g, fm.Letter):
            val = np.stack([pats[w * L + col[g.name]] for w in range(k)])[:, None, :]
        elif isinstance(g, fm.Top):
            val = np.broadcast_to(full, (k, 1, len(full)))
        elif isinstance(g, fm.Bottom):
            val = np.zeros((k, 1, len(full)), dtype=np.uint64)
        elif isinstance(g, fm.Not):
            val = full & ~memo[g.arg]
        elif isinstance(g, fm.And):
            val = memo[g.left] & memo[g.right]
        elif isinstance(g, fm.Or):
            val = memo[g.left] | memo[g.right]
        elif isinstance(g, fm.Implies):
            val = (full & ~memo[g.left]) | memo[g.right]
        elif isinstance(g, fm.Iff):
            val = full & ~(memo[g.left] ^ memo[g.right])
        else:
            body = memo[g.body]
            rows = []
            for w in range(k):
                terms = [np.broadcast_to(body[u], (N, len(full))) & edge[:, w, u] for u in range(k)]
                least = _at_least(g.count if isinstance(g, fm.AtLeast) else g.count + 1, terms, full)
                rows.append(least if isinstance(g, fm.AtLeast) else full & ~least)
            val = np.stack(rows)
        memo[g] = val
    root = memo[f][0]
    return np.broadcast_to(root, (N, len(full)))


def _first_bit(words):
    """Index of the lowest set bit of each row, or -1."""
    nz = words != 0
    has = nz.any(axis=1)
    first_word = np.argmax(nz, axis=1)
    w = words[np.arange(len(words)), first_word]
    low = w & (~w + np.uint64(1))
    bit = np.zeros(len(words), dtype=np.int64)
    bit[has] = np.round(np.log2(low[has].astype(np.float64))).astype(np.int64)
    out = first_word.astype(np.int64) * 64 + bit
    out[~has] = -1
    return out


def first_valuations(f: fm.Formula, rel: np.ndarray, names=None) -> np.ndarray:
    """For each frame in ``rel`` the first valuation making ``f`` true at world 0.

    Valuations are numbered so that bit ``w * L + i`` says whether letter
    ``names[i]`` holds at world ``w``.  Frames without a model get -1.
    """
    names = sorted(fm.letters(f)) if names is None else list(names)
    rel = np.asarray(rel, dtype=bool)
    N, k, _ = rel.shape
    words = max(1, (1 << (k * len(names))) // 64)
    chunk = max(1, (1 << 21) // (k * words))
    out = []
    for start in range(0, N, chunk):
        out.append(_first_bit(_evaluate(f, rel[start:start + chunk], names)))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def decode(rel, valuation: int, names) -> PointedStructure:
    k = len(rel)
    L = len(names)
    worlds = [f"w{i}" for i in range(k)]
    val = {
        p: [worlds[w] for w in range(k) if (valuation >> (w * L + i)) & 1]
        for i, p in enumerate(names)
    }
    return PointedStructure(KripkeStructure(worlds, rel, val), "w0")


@functools.lru_cache(maxsize=4096)
def _scan(f: fm.Formula, k: int):
    rel, _ = frames_of_size(k)
    return first_valuations(f, rel)


def brute_force(f: fm.Formula, frames=(), max_size: int = 3) -> Verdict:
    """Search every structure with at most ``max_size`` worlds in the class.

    Returns a sat verdict with the first model found (smallest size, then a
    fixed frame order, then the smallest valuation) or none-up-to.
    """
    if max_size > MAX_SIZE:
        raise ValueError(f"brute force is limited to {MAX_SIZE} worlds")
    need = class_mask(frames)
    names = sorted(fm.letters(f))
    for k in range(1, max_size + 1):
        rel, flags = frames_of_size(k)
        found = _scan(f, k)
        ok = np.flatnonzero(((flags & need) == need) & (found >= 0))
        if len(ok):
            i = ok[0]
            model = decode(rel[i], int(found[i]), names)
            if not check(model.structure, model.world, f):
                raise RuntimeError("internal error: oracle model does not satisfy the formula")
            return Verdict.sat(model)
    return Verdict.none_up_to(max_size)


def tree_frames(max_size: int):
    """Transitive closures of rooted trees, with every choice of reflexive points.

    Yields (k, relations) per size, root at world 0 and parents before children.
    """
    for k in range(1, max_size + 1):
        rels = []
        for parents in itertools.product(*[range(i) for i in range(1, k)]):
            anc = np.zeros((k, k), dtype=bool)
            for child, parent in enumerate(parents, start=1):
                anc[parent, child] = True
                anc[:, child] |= anc[:, parent]
            for loops in range(1 << k):
                r = anc.copy()
                for w in range(k):
                    if (loops >> w) & 1:
                        r[w, w] = True
                rels.append(r)
        yield k, np.array(rels, dtype=bool).reshape(-1, k, k)
