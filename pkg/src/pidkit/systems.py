"""Named example systems.

Every system is a joint distribution with predictors first and the target on
the last axis. Composite variables (e.g. a predictor carrying two bits) are
packed into a single integer axis, most significant component first.
"""
from __future__ import annotations

from itertools import product
from typing import Callable, Iterable

from .dist import DistributionError, JointDistribution

BITS = (0, 1)


def _pack(*bits: int) -> int:
    out = 0
    for b in bits:
        out = 2 * out + b
    return out


def _uniform_over(rows: Iterable[tuple[int, ...]]) -> JointDistribution:
    return JointDistribution.uniform(list(rows))


def rdn() -> JointDistribution:
    return _uniform_over([(0, 0, 0), (1, 1, 1)])


def unq() -> JointDistribution:
    """Two independent bits copied jointly into the target."""
    return _uniform_over((a, b, _pack(a, b)) for a, b in product(BITS, BITS))


def xor() -> JointDistribution:
    return _uniform_over((a, b, a ^ b) for a, b in product(BITS, BITS))


def and_() -> JointDistribution:
    return _uniform_over((a, b, a & b) for a, b in product(BITS, BITS))


def or_() -> JointDistribution:
    return _uniform_over((a, b, a | b) for a, b in product(BITS, BITS))


def sum_() -> JointDistribution:
    return _uniform_over((a, b, a + b) for a, b in product(BITS, BITS))


def rdnxor() -> JointDistribution:
    """Shared bit ``r`` plus an xor: ``X1=(r,a)``, ``X2=(r,b)``, ``S=(r,a^b)``."""
    return _uniform_over((_pack(r, a), _pack(r, b), _pack(r, a ^ b)) for r, a, b in product(BITS, repeat=3))


def rdnunqxor() -> JointDistribution:
    """Redundant, two unique and one synergistic bit: ``S=(r,u1,u2,a^b)``."""
    rows = ((_pack(r, u1, a), _pack(r, u2, b), _pack(r, u1, u2, a ^ b))
            for r, u1, u2, a, b in product(BITS, repeat=5))
    return JointDistribution.uniform(list(rows), cards=(8, 8, 16))


def reducedor() -> JointDistribution:
    return JointDistribution.from_outcomes({(0, 0, 0): 0.5, (0, 1, 1): 0.25, (1, 0, 1): 0.25})


def reducedor_broja() -> JointDistribution:
    """Optimum of the joint-MI minimisation for ``reducedor`` (coupled predictors)."""
    return JointDistribution.from_outcomes({(0, 0, 0): 0.5, (0, 0, 1): 0.25, (1, 1, 1): 0.25})


def wb_a() -> JointDistribution:
    return _uniform_over([(0, 0, 0), (0, 1, 1), (1, 0, 2)])


def wb_b() -> JointDistribution:
    return _uniform_over([(0, 0, 0), (0, 1, 1), (1, 0, 2), (1, 1, 1)])


def wb_c() -> JointDistribution:
    return _uniform_over([(0, 0, 0), (0, 0, 1), (0, 1, 2), (1, 0, 0), (1, 0, 2), (1, 1, 1)])


def uniquemis() -> JointDistribution:
    """Unique misinformation: ``X2`` carries misleading local information."""
    return JointDistribution.from_outcomes({(0, 0, 0): 0.4, (0, 1, 0): 0.1, (1, 1, 1): 0.5})


def dblxor() -> JointDistribution:
    return _uniform_over((a, b, c, _pack(a ^ b, b ^ c)) for a, b, c in product(BITS, repeat=3))


def xorcopy() -> JointDistribution:
    return _uniform_over((a, b, a ^ b, _pack(a, b, a ^ b)) for a, b in product(BITS, BITS))


def xorunq() -> JointDistribution:
    return _uniform_over((a, b, c, _pack(a ^ b, c)) for a, b, c in product(BITS, repeat=3))


def giantbit() -> JointDistribution:
    return _uniform_over([(0, 0, 0, 0), (1, 1, 1, 1)])


def parity3() -> JointDistribution:
    return _uniform_over((a, b, c, a ^ b ^ c) for a, b, c in product(BITS, repeat=3))


def anddup() -> JointDistribution:
    """AND with the first predictor duplicated as a third."""
    return _uniform_over((a, b, a, a & b) for a, b in product(BITS, BITS))


def parityrdnrdn() -> JointDistribution:
    """``X1=(a,r1,r2)``, ``X2=(b,r1,r2)``, ``X3=(c,r1)``, ``S=(a^b^c,r1,r2)``."""
    rows = ((_pack(a, r1, r2), _pack(b, r1, r2), _pack(c, r1), _pack(a ^ b ^ c, r1, r2))
            for a, b, c, r1, r2 in product(BITS, repeat=5))
    return JointDistribution.uniform(list(rows), cards=(8, 8, 4, 8))


def xorduplicate() -> JointDistribution:
    return _uniform_over((a, b, a, a ^ b) for a, b in product(BITS, BITS))


def xorloses() -> JointDistribution:
    return _uniform_over((a, b, a ^ b, a ^ b) for a, b in product(BITS, BITS))


def xormulticoal() -> JointDistribution:
    """``X1=(a,b)``, ``X2=(a,c)``, ``X3=(b,c)``, ``S=a^b^c``."""
    return _uniform_over((_pack(a, b), _pack(a, c), _pack(b, c), a ^ b ^ c) for a, b, c in product(BITS, repeat=3))


PREDPRED_RANGE = (-0.8, 0.1)


def predpred(c: float) -> JointDistribution:
    """Binary system whose predictor-predictor dependence is tuned by ``c``.

    Valid for ``-0.8 <= c <= 0.1``; the target-predictor marginals do not
    depend on ``c``.
    """
    lo, hi = PREDPRED_RANGE
    if not lo - 1e-12 <= c <= hi + 1e-12:
        raise DistributionError(f"predpred needs {lo} <= c <= {hi}, got {c}")
    # listed as (s, x1, x2)
    cells = {
        (0, 0, 0): c / 4 + 1 / 4,
        (0, 0, 1): 1 / 40 - c / 4,
        (0, 1, 0): 1 / 40 - c / 4,
        (0, 1, 1): c / 4 + 1 / 5,
        (1, 0, 0): 0.0,
        (1, 0, 1): 9 / 40,
        (1, 1, 0): 9 / 40,
        (1, 1, 1): 1 / 20,
    }
    rows = {(x1, x2, s): max(p, 0.0) for (s, x1, x2), p in cells.items()}
    return JointDistribution.from_outcomes(rows, cards=(2, 2, 2))


REGISTRY: dict[str, Callable[[], JointDistribution]] = {
    "rdn": rdn,
    "unq": unq,
    "xor": xor,
    "and": and_,
    "or": or_,
    "sum": sum_,
    "rdnxor": rdnxor,
    "rdnunqxor": rdnunqxor,
    "reducedor": reducedor,
    "reducedor-broja": reducedor_broja,
    "wb-a": wb_a,
    "wb-b": wb_b,
    "wb-c": wb_c,
    "uniquemis": uniquemis,
    "dblxor": dblxor,
    "xorcopy": xorcopy,
    "xorunq": xorunq,
    "giantbit": giantbit,
    "parity3": parity3,
    "anddup": anddup,
    "parityrdnrdn": parityrdnrdn,
    "xorduplicate": xorduplicate,
    "xorloses": xorloses,
    "xormulticoal": xormulticoal,
}


def get_example(name: str) -> JointDistribution:
    """Look up a registered system; ``predpred(c)`` takes its parameter inline."""
    key = name.strip().lower()
    if key.startswith("predpred"):
        inner = key[len("predpred"):].strip()
        if not (inner.startswith("(") and inner.endswith(")")):
            raise KeyError("use predpred(c), e.g. predpred(-0.2)")
        try:
            c = float(inner[1:-1])
        except ValueError:
            raise KeyError(f"bad predpred parameter {inner!r}") from None
        return predpred(c)
    try:
        return REGISTRY[key]()
    except KeyError:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(example_names())}") from None


def example_names() -> list[str]:
    return list(REGISTRY) + ["predpred(c)"]
