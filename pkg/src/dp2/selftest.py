"""Desk-scale acceptance suite: one entry per exit criterion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .complexes import dim_D
from .field import FieldSpec, gf
from .verify import (
    ClaimResult,
    verify_cor_2_3,
    verify_cor_2_4,
    verify_cor_2_5,
    verify_cor_3_4,
    verify_dsquared,
    verify_eq3,
    verify_equivariance,
    verify_field_independence,
    verify_k0_consistency,
    verify_lemma_2_1,
    verify_lemma_3_3,
    verify_prop_3_1,
    verify_remark,
    verify_theorem_2_2,
    verify_theorem_3_2,
)

SWEEP_M = (1, 2, 3)
SWEEP_J = range(5)
EXTRA_DEGREE = 8
COLUMN_CAP = 12_000


def sweep_js(m: int) -> list[int]:
    """j values of the dimension sweep, capped so dim D_(m+2j) stays under the column cap."""
    return [j for j in SWEEP_J if dim_D(m, m + 2 * j) <= COLUMN_CAP]


def sweep_degrees(m: int) -> range:
    return range(m + EXTRA_DEGREE + 1)


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    run: Callable[[FieldSpec], list[ClaimResult]]


def _dims(field):
    return [verify_cor_2_5(m, sweep_js(m), field) for m in SWEEP_M]


def _vanishing(field):
    return [verify_cor_2_3(m, sweep_degrees(m), field) for m in SWEEP_M]


def _m1(field):
    return [verify_lemma_2_1(range(12), field)]


def _basis(field):
    return [verify_cor_2_4(m, [m + 2 * j for j in sweep_js(m)], field) for m in SWEEP_M]


def _decomposition(field):
    return [verify_theorem_2_2(m, sweep_degrees(m), field) for m in SWEEP_M]


def _dsquared_equivariance(field):
    out = [verify_dsquared(m, sweep_degrees(m), field) for m in SWEEP_M]
    out += [verify_equivariance(m, range(9), gf(e)) for m in (1, 2) for e in (1, 2)]
    return out


def _binomial(field):
    return [verify_eq3(40)]


def _top_module(field):
    return [verify_prop_3_1(m, gf(1), mode="exhaustive") for m in (1, 2, 3)]


def _doubling(field):
    return [verify_lemma_3_3(n, k, gf(e)) for n, k in ((2, 1), (2, 2), (2, 3), (4, 1), (4, 2)) for e in (1, 2)]


def _psi(field):
    return [verify_theorem_3_2(m, k, gf(e)) for m, k in ((1, 1), (1, 2), (2, 1), (2, 2)) for e in (1, 2)]


def _next_module(field):
    # m = 1 needs 2^e > 3 for D_3 V to stay irreducible on the finite group; m = 2 is run over GF(2)
    return [verify_cor_3_4(1, gf(2), mode="exhaustive"), verify_cor_3_4(2, gf(1), mode="exhaustive")]


def _pattern_m1(field):
    r = verify_remark(5, gf(3), mode="exhaustive")
    labels = {k: v["verdict"] for k, v in r.evidence.get("verdicts", {}).items()}
    if labels != {1: "irreducible", 3: "irreducible", 5: "reducible"} or not r.evidence["verdicts"][5].get("witness_verified"):
        r.verdict = "fail"
        r.evidence.setdefault("counterexample", {"verdicts": labels})
    return [r]


def _cross(field):
    out = [verify_field_independence(m, sweep_degrees(m), (1, 2)) for m in SWEEP_M]
    out += [verify_k0_consistency(m, gf(1)) for m in SWEEP_M]
    return out


CRITERIA = (
    Criterion(1, "dimension formula 2^m binom(2m+j-1, j)", _dims),
    Criterion(2, "vanishing pattern", _vanishing),
    Criterion(3, "m = 1 cohomology and odd-degree differentials", _m1),
    Criterion(4, "canonical cohomology basis", _basis),
    Criterion(5, "dimension decomposition over odd compositions", _decomposition),
    Criterion(6, "d^2 = 0 and equivariance under transvections", _dsquared_equivariance),
    Criterion(7, "integer binomial identity, n <= 40", _binomial),
    Criterion(8, "H^m: weights, highest weight omega_m, irreducible", _top_module),
    Criterion(9, "N-stability and twisted doubling isomorphism", _doubling),
    Criterion(10, "H^(m+2k) as twisted D_k tensor H^m", _psi),
    Criterion(11, "H^(m+2): highest weight 2 omega_1 + omega_m, irreducible", _next_module),
    Criterion(12, "D_k V for m = 1 irreducible iff k = 2^n - 1", _pattern_m1),
    Criterion(13, "cross-field and k = 0 consistency", _cross),
)


def run_criterion(c: Criterion, field: FieldSpec | None = None) -> tuple[bool, list[ClaimResult]]:
    results = c.run(field or gf(1))
    return all(r.passed for r in results), results
