"""Independent brute-force oracles used by the tests.

Nothing here imports the reasoner: formulas are small tuple ASTs that
are evaluated directly over enumerated Kripke frames.
"""
from __future__ import annotations

import itertools
import random

ATOMS = ("p1", "p2", "p3", "p4", "p5", "p6")
FRAME_CLASSES = {
    "K": (),
    "T": ("reflexive",),
    "KB": ("symmetric",),
    "S4": ("reflexive", "transitive"),
    "S5": ("reflexive", "symmetric", "transitive"),
}


# ---------------------------------------------------------------------------
# random propositional modal formulas


def random_formula(rng: random.Random, size: int, depth: int, atoms=ATOMS):
    """A tuple AST with about `size` connectives and modal depth <= depth."""
    if size <= 0:
        return ("atom", rng.choice(atoms))
    ops = ["not", "and", "or", "implies"] + (["box", "dia"] * 2 if depth > 0 else [])
    op = rng.choice(ops)
    if op in ("not", "box", "dia"):
        return (op, random_formula(rng, size - 1, depth - (op != "not"), atoms))
    left = rng.randint(0, size - 1)
    return (op, random_formula(rng, left, depth, atoms), random_formula(rng, size - 1 - left, depth, atoms))


def weaken(rng: random.Random, f, depth: int, atoms):
    """A formula that tends to follow from f (so f => weaken(f) is often valid)."""
    op = f[0]
    if op == "and" and rng.random() < 0.5:
        return weaken(rng, f[rng.randint(1, 2)], depth, atoms)
    if op in ("box", "dia") and rng.random() < 0.6:
        inner = weaken(rng, f[1], depth - 1, atoms)
        if op == "box" and rng.random() < 0.3:
            return ("dia", inner)
        return (op, inner)
    if rng.random() < 0.5:
        return ("or", f, random_formula(rng, 2, depth, atoms))
    return f if rng.random() < 0.5 else random_formula(rng, 3, depth, atoms)


def sample(rng: random.Random, max_size: int = 8, max_depth: int = 3):
    """Mixed workload: random formulas plus implications f => weaken(f).

    Each formula draws 1-3 atoms from p1..p6 so that a useful share of the
    sample is valid in every frame class.
    """
    atoms = tuple(rng.sample(ATOMS, rng.randint(1, 3)))
    if rng.random() < 0.4:
        d = rng.randint(0, max_depth)
        f = random_formula(rng, rng.randint(1, max_size // 2), d, atoms)
        g = weaken(rng, f, max_depth - d if rng.random() < 0.5 else d, atoms)
        out = ("implies", f, g)
        if modal_depth(out) <= max_depth:
            return out
    return random_formula(rng, rng.randint(1, max_size), max_depth, atoms)


def to_source(f) -> str:
    op = f[0]
    if op == "atom":
        return f[1]
    if op == "not":
        return f"~ ({to_source(f[1])})"
    if op in ("box", "dia"):
        return f"{op} ({to_source(f[1])})"
    sym = {"and": "&", "or": "|", "implies": "=>"}[op]
    return f"({to_source(f[1])}) {sym} ({to_source(f[2])})"


def atoms_of(f) -> list:
    if f[0] == "atom":
        return [f[1]]
    return sorted(set(itertools.chain.from_iterable(atoms_of(x) for x in f[1:])))


def modal_depth(f) -> int:
    if f[0] == "atom":
        return 0
    inner = max(modal_depth(x) for x in f[1:])
    return inner + (f[0] in ("box", "dia"))


# ---------------------------------------------------------------------------
# frames


def frames(n: int, conditions) -> list:
    """All relations on n worlds satisfying the conditions, generated from world 0."""
    cells = [(u, v) for u in range(n) for v in range(n)]
    out = []
    for bits in itertools.product((False, True), repeat=len(cells)):
        rel = {c for c, b in zip(cells, bits) if b}
        if "reflexive" in conditions and any((u, u) not in rel for u in range(n)):
            continue
        if "symmetric" in conditions and any((v, u) not in rel for (u, v) in rel):
            continue
        if "transitive" in conditions and any(
            (u, x) not in rel for (u, v) in rel for (v2, x) in rel if v == v2
        ):
            continue
        if "euclidean" in conditions and any(
            (v, x) not in rel for (u, v) in rel for (u2, x) in rel if u == u2
        ):
            continue
        seen, todo = {0}, [0]
        while todo:
            u = todo.pop()
            for (a, b) in rel:
                if a == u and b not in seen:
                    seen.add(b)
                    todo.append(b)
        if len(seen) == n:
            out.append([[v for v in range(n) if (u, v) in rel] for u in range(n)])
    return out


_FRAME_CACHE: dict = {}


def cached_frames(n: int, cls: str):
    key = (n, cls)
    if key not in _FRAME_CACHE:
        if cls == "S5":
            # a point-generated S5 frame is a single cluster
            _FRAME_CACHE[key] = [[list(range(n)) for _ in range(n)]]
        else:
            _FRAME_CACHE[key] = frames(n, FRAME_CLASSES[cls])
    return _FRAME_CACHE[key]


# ---------------------------------------------------------------------------
# bit-parallel evaluation: bit j of a mask is the truth value under valuation j


def _atom_masks(atoms, n: int):
    total = len(atoms) * n
    full = (1 << (1 << total)) - 1
    masks = {}
    for i, a in enumerate(atoms):
        for w in range(n):
            bit = i * n + w
            # valuation j makes (a, w) true iff bit `bit` of j is set
            block = 1 << bit
            period = block * 2
            reps = (1 << total) // period
            pattern = ((1 << block) - 1) << block
            masks[(a, w)] = pattern * (((1 << (period * reps)) - 1) // ((1 << period) - 1))
    return masks, full


def _eval(f, succ, masks, full, n):
    op = f[0]
    if op == "atom":
        return [masks[(f[1], w)] for w in range(n)]
    if op == "not":
        return [full ^ x for x in _eval(f[1], succ, masks, full, n)]
    if op in ("and", "or", "implies"):
        a = _eval(f[1], succ, masks, full, n)
        b = _eval(f[2], succ, masks, full, n)
        if op == "and":
            return [x & y for x, y in zip(a, b)]
        if op == "or":
            return [x | y for x, y in zip(a, b)]
        return [(full ^ x) | y for x, y in zip(a, b)]
    a = _eval(f[1], succ, masks, full, n)
    out = []
    for w in range(n):
        if op == "box":
            m = full
            for v in succ[w]:
                m &= a[v]
        else:
            m = 0
            for v in succ[w]:
                m |= a[v]
        out.append(m)
    return out


def countermodel_exists(f, cls: str, bound: int) -> bool:
    """True iff f fails at the root of some frame of the class with at most `bound` worlds."""
    atoms = atoms_of(f)
    for n in range(1, bound + 1):
        masks, full = _atom_masks(atoms, n)
        for succ in cached_frames(n, cls):
            if _eval(f, succ, masks, full, n)[0] != full:
                return True
    return False


def holds_in(f, succ, valuation: dict, w: int) -> bool:
    """Plain recursive evaluation at one world (used to cross-check the bitmasks)."""
    op = f[0]
    if op == "atom":
        return w in valuation.get(f[1], ())
    if op == "not":
        return not holds_in(f[1], succ, valuation, w)
    if op == "and":
        return holds_in(f[1], succ, valuation, w) and holds_in(f[2], succ, valuation, w)
    if op == "or":
        return holds_in(f[1], succ, valuation, w) or holds_in(f[2], succ, valuation, w)
    if op == "implies":
        return (not holds_in(f[1], succ, valuation, w)) or holds_in(f[2], succ, valuation, w)
    if op == "box":
        return all(holds_in(f[1], succ, valuation, v) for v in succ[w])
    return any(holds_in(f[1], succ, valuation, v) for v in succ[w])


# ---------------------------------------------------------------------------
# intended models by brute force: loop over every first-order model, then
# over every world, with no shared code from the package


def intended_keys(domain, worlds, tables, const_map, pred_map, arities):
    """Keys of the models that agree with the commitment at some world.

    tables: relation name -> {world: set of tuples}. A key is the tuple of
    (symbol, value) pairs sorted by symbol, with extensions as sorted tuples.
    """
    domain = list(domain)
    preds = sorted(pred_map)
    consts = sorted(const_map)
    per_pred = []
    for p in preds:
        cells = list(itertools.product(domain, repeat=arities[p]))
        per_pred.append([tuple(sorted(c for c, keep in zip(cells, bits) if keep))
                         for bits in itertools.product((False, True), repeat=len(cells))])
    found = set()
    for cvals in itertools.product(domain, repeat=len(consts)):
        for pvals in itertools.product(*per_pred):
            interp = dict(zip(consts, cvals))
            interp.update(zip(preds, pvals))
            if any(interp[c] != const_map[c] for c in consts):
                continue
            for w in worlds:
                if all(set(interp[p]) == set(tables[pred_map[p]][w]) for p in preds):
                    found.add(tuple(sorted(interp.items())))
                    break
    return found
