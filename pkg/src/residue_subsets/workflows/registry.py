"""Registries of the exact identities and the stated claims, with applicability."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple, Union

from residue_subsets.arith.characters import STREAM_CHUNK, TABLE_MODE_LIMIT
from residue_subsets.charsum.sums import pv_extremum, vanishing_check
from residue_subsets.classnum.forms import class_number_forms
from residue_subsets.classnum.lvalues import wright_identity
from residue_subsets.counts.subsets import (
    closed_form,
    count_brute,
    count_formula,
    count_formula_nonresidues,
    envelope,
)
from residue_subsets.domain.models import ClassifiedPrime, CountRecord, SubsetSelector
from residue_subsets.errors import UsageError

Number = Union[Fraction, float, int]

S1 = SubsetSelector.multiples(1)
S2 = SubsetSelector.multiples(2)
S3 = SubsetSelector.multiples(3)
S4 = SubsetSelector.multiples(4)
ODDS = SubsetSelector.odds()
S2_MINUS_S4 = SubsetSelector.s2_minus_s4()


class IdentityId(str, enum.Enum):
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    W1 = "W1"
    W2 = "W2"
    W3 = "W3"
    W4 = "W4"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    QN = "QN"
    PV = "PV"
    EXP = "EXP"


class ClaimId(str, enum.Enum):
    T1_1_EXACT = "T1.1-exact"
    T1_1_POS = "T1.1-pos"
    C1_2_EXACT = "C1.2-exact"
    C1_2_POS = "C1.2-pos"
    T1_3_POS = "T1.3-pos"
    C1_4_POS = "C1.4-pos"
    T1_5_EXACT = "T1.5-exact"
    T1_5_POS_1MOD4 = "T1.5-pos-1mod4"
    T1_5_POS_7MOD8 = "T1.5-pos-7mod8"
    C1_6 = "C1.6"
    C1_6_POS_1MOD4 = "C1.6-pos-1mod4"
    C1_6_POS_7MOD8 = "C1.6-pos-7mod8"
    C1_7_POS = "C1.7-pos"


class CheckStatus(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True, slots=True)
class CheckOutcome:
    """Verdict of one identity or claim at one prime."""

    check_id: str
    status: CheckStatus
    lhs: Optional[Number] = None
    rhs: Optional[Number] = None
    gap: Optional[Fraction] = None
    detail: Optional[str] = None


@dataclass(slots=True)
class PrimeContext:
    """Per-prime memo of brute-force counts shared by identities and claims."""

    cp: ClassifiedPrime
    class_number: Callable[[int], int] = class_number_forms
    max_k: int = 50
    table_limit: int = TABLE_MODE_LIMIT
    chunk: int = STREAM_CHUNK
    _records: Dict[SubsetSelector, CountRecord] = field(default_factory=dict)

    @property
    def sum_options(self) -> Dict[str, int]:
        return {"limit": self.table_limit, "chunk": self.chunk}

    def count(self, sel: SubsetSelector) -> CountRecord:
        record = self._records.get(sel)
        if record is None:
            record = count_brute(self.cp.p, sel, **self.sum_options)
            self._records[sel] = record
        return record


Evaluation = Tuple[bool, Number, Number, Optional[str]]


@dataclass(frozen=True, slots=True)
class IdentitySpec:
    id: IdentityId
    description: str
    applies: Callable[[ClassifiedPrime], bool]
    evaluate: Callable[[PrimeContext], Evaluation]


def _vanishing(case: str) -> Callable[[PrimeContext], Evaluation]:
    def evaluate(ctx: PrimeContext) -> Evaluation:
        outcomes = vanishing_check(ctx.cp, **ctx.sum_options)
        outcome = next(item for item in outcomes if item.case == case)
        return outcome.passed, outcome.witness, 0, None

    return evaluate


def _wright(which: str) -> Callable[[PrimeContext], Evaluation]:
    def evaluate(ctx: PrimeContext) -> Evaluation:
        check = wright_identity(
            ctx.cp, which, class_number=ctx.class_number, **ctx.sum_options
        )
        return check.passed, check.lhs, check.rhs, None

    return evaluate


def _closed(*selectors: SubsetSelector) -> Callable[[PrimeContext], Evaluation]:
    def evaluate(ctx: PrimeContext) -> Evaluation:
        sides = []
        for sel in selectors:
            value, derivation = closed_form(ctx.cp, sel, class_number=ctx.class_number)
            brute = ctx.count(sel).Q
            if value != brute:
                return False, value, brute, f"{sel.label} via {derivation}"
            sides.append((value, brute))
        value, brute = sides[0]
        return True, value, brute, None

    return evaluate


def _residue_count(ctx: PrimeContext) -> Evaluation:
    record = ctx.count(S1)
    half = (ctx.cp.p - 1) // 2
    if record.Q != half:
        return False, record.Q, half, "residues"
    if record.N != half:
        return False, record.N, half, "non-residues"
    return True, record.Q, half, None


def _polya_vinogradov(ctx: PrimeContext) -> Evaluation:
    spread, bound = pv_extremum(ctx.cp.p, **ctx.sum_options)
    return spread <= bound, spread, bound, None


def _expected_counts(ctx: PrimeContext) -> Evaluation:
    p = ctx.cp.p
    limit = envelope(p)
    for k in range(1, min(p - 1, ctx.max_k) + 1):
        brute = ctx.count(SubsetSelector.multiples(k))
        q_formula = count_formula(p, k, **ctx.sum_options)
        if q_formula != brute.Q:
            return False, q_formula, brute.Q, f"Q at k={k}"
        n_formula = count_formula_nonresidues(p, k, **ctx.sum_options)
        if n_formula != brute.N:
            return False, n_formula, brute.N, f"N at k={k}"
        for label, value in (("Q", brute.Q), ("N", brute.N)):
            distance = abs(value - brute.main_term)
            if distance > limit:
                return False, distance, limit, f"{label} envelope at k={k}"
    return True, 0, 0, None


def _always(cp: ClassifiedPrime) -> bool:
    return True


def _above_three(cp: ClassifiedPrime) -> bool:
    return cp.p > 3


def _one_mod_four(cp: ClassifiedPrime) -> bool:
    return cp.r4 == 1


def _three_mod_four(cp: ClassifiedPrime) -> bool:
    return cp.r4 == 3


def _three_mod_eight(cp: ClassifiedPrime) -> bool:
    return cp.r8 == 3


def _seven_mod_eight(cp: ClassifiedPrime) -> bool:
    return cp.r8 == 7


def _plus_minus_one_mod_twelve(cp: ClassifiedPrime) -> bool:
    return cp.r12 in (1, 11)


def _class_above_three(
    predicate: Callable[[ClassifiedPrime], bool]
) -> Callable[[ClassifiedPrime], bool]:
    return lambda cp: cp.p > 3 and predicate(cp)


IDENTITIES: Dict[IdentityId, IdentitySpec] = {
    spec.id: spec
    for spec in (
        IdentitySpec(
            IdentityId.B1,
            "S(1,p/2) = 0 for p = 1 mod 4",
            _one_mod_four,
            _vanishing("B1"),
        ),
        IdentitySpec(
            IdentityId.B2,
            "S(1,p/4) = 0 for p = 3 mod 8",
            _three_mod_eight,
            _vanishing("B2"),
        ),
        IdentitySpec(
            IdentityId.B3,
            "sum over [ceil(p/4), floor(p/2)] = 0 for p = 7 mod 8",
            _seven_mod_eight,
            _vanishing("B3"),
        ),
        IdentitySpec(
            IdentityId.W1,
            "S(1,p/2) = (2 - (2/p)) h(-p) for p = 3 mod 4",
            _class_above_three(_three_mod_four),
            _wright("W1"),
        ),
        IdentitySpec(
            IdentityId.W2,
            "2 S(1,p/3) = (3 - (3/p)) h(-p) for p = 3 mod 4",
            _class_above_three(_three_mod_four),
            _wright("W2"),
        ),
        IdentitySpec(
            IdentityId.W3,
            "2 S(1,p/3) = h(-3p) for p = 1 mod 4",
            _class_above_three(_one_mod_four),
            _wright("W3"),
        ),
        IdentitySpec(
            IdentityId.W4,
            "2 S(1,p/4) = h(-4p) for p = 1 mod 4",
            _class_above_three(_one_mod_four),
            _wright("W4"),
        ),
        IdentitySpec(
            IdentityId.C2,
            "closed forms of Q(p,S_2) and Q(p,odds)",
            _above_three,
            _closed(S2, ODDS),
        ),
        IdentitySpec(
            IdentityId.C3,
            "closed form of Q(p,S_3)",
            _above_three,
            _closed(S3),
        ),
        IdentitySpec(
            IdentityId.C4,
            "closed forms of Q(p,S_4) and Q(p,S_2 minus S_4)",
            _above_three,
            _closed(S4, S2_MINUS_S4),
        ),
        IdentitySpec(
            IdentityId.QN,
            "exactly (p-1)/2 residues and non-residues",
            _always,
            _residue_count,
        ),
        IdentitySpec(
            IdentityId.PV,
            "max interval sum <= sqrt(p) log p",
            _always,
            _polya_vinogradov,
        ),
        IdentitySpec(
            IdentityId.EXP,
            "counting formula equals brute force for k <= max_k, within the envelope",
            _always,
            _expected_counts,
        ),
    )
}


@dataclass(frozen=True, slots=True)
class ClaimSpec:
    """A stated relation between a count and its main term.

    ``deviations`` returns the signed quantities that must be zero (relation
    "=") or positive (relation ">"), one per admissible reading of the claim.
    """

    id: ClaimId
    statement: str
    relation: str
    applies: Callable[[ClassifiedPrime], bool]
    deviations: Callable[[PrimeContext], List[Tuple[Number, Number, Fraction]]]


def _q_minus(sel: SubsetSelector, reference: Callable[[int], Fraction]):
    def deviations(ctx: PrimeContext) -> List[Tuple[Number, Number, Fraction]]:
        value = ctx.count(sel).Q
        ref = reference(ctx.cp.p)
        return [(value, ref, value - ref)]

    return deviations


def _minus_n(sel: SubsetSelector, reference: Callable[[int], Fraction]):
    def deviations(ctx: PrimeContext) -> List[Tuple[Number, Number, Fraction]]:
        value = ctx.count(sel).N
        ref = reference(ctx.cp.p)
        return [(value, ref, ref - value)]

    return deviations


def _n_minus(sel: SubsetSelector, reference: Callable[[int], Fraction]):
    def deviations(ctx: PrimeContext) -> List[Tuple[Number, Number, Fraction]]:
        value = ctx.count(sel).N
        ref = reference(ctx.cp.p)
        return [(value, ref, value - ref)]

    return deviations


def _quarter_minus_r(ctx: PrimeContext) -> List[Tuple[Number, Number, Fraction]]:
    ref = Fraction(ctx.cp.p - 1, 4)
    readings = (ctx.count(S2).N, ctx.count(ODDS).Q)
    return [(value, ref, ref - value) for value in readings]


def _r_minus_quarter(ctx: PrimeContext) -> List[Tuple[Number, Number, Fraction]]:
    ref = Fraction(ctx.cp.p - 1, 4)
    readings = (ctx.count(S2).N, ctx.count(ODDS).Q)
    return [(value, ref, value - ref) for value in readings]


def _quarter(p: int) -> Fraction:
    return Fraction(p - 1, 4)


def _sixth(p: int) -> Fraction:
    return Fraction(p - 1, 6)


def _eighth(p: int) -> Fraction:
    return Fraction(p - 1, 8)


def _half_floor_quarter(p: int) -> Fraction:
    return Fraction((p - 1) // 4, 2)


CLAIMS: Dict[ClaimId, ClaimSpec] = {
    spec.id: spec
    for spec in (
        ClaimSpec(
            ClaimId.T1_1_EXACT,
            "Q(p,S_2) = (p-1)/4 for p = 1 mod 4",
            "=",
            _one_mod_four,
            _q_minus(S2, _quarter),
        ),
        ClaimSpec(
            ClaimId.T1_1_POS,
            "Q(p,S_2) - (p-1)/4 > 0 for p = 3 mod 4",
            ">",
            _three_mod_four,
            _q_minus(S2, _quarter),
        ),
        ClaimSpec(
            ClaimId.C1_2_EXACT,
            "N(p,S_2) = Q(p,odds) = (p-1)/4 for p = 1 mod 4",
            "=",
            _one_mod_four,
            _r_minus_quarter,
        ),
        ClaimSpec(
            ClaimId.C1_2_POS,
            "(p-1)/4 - R > 0 for R = N(p,S_2) and R = Q(p,odds), p = 3 mod 4",
            ">",
            _three_mod_four,
            _quarter_minus_r,
        ),
        ClaimSpec(
            ClaimId.T1_3_POS,
            "Q(p,S_3) - (p-1)/6 > 0 for p = 1, 11 mod 12",
            ">",
            _plus_minus_one_mod_twelve,
            _q_minus(S3, _sixth),
        ),
        ClaimSpec(
            ClaimId.C1_4_POS,
            "(p-1)/6 - N(p,S_3) > 0 for p = 1, 11 mod 12",
            ">",
            _plus_minus_one_mod_twelve,
            _minus_n(S3, _sixth),
        ),
        ClaimSpec(
            ClaimId.T1_5_EXACT,
            "Q(p,S_4) = [(p-1)/4]/2 for p = 3 mod 8",
            "=",
            _three_mod_eight,
            _q_minus(S4, _half_floor_quarter),
        ),
        ClaimSpec(
            ClaimId.T1_5_POS_1MOD4,
            "Q(p,S_4) - (p-1)/8 > 0 for p = 1 mod 4",
            ">",
            _one_mod_four,
            _q_minus(S4, _eighth),
        ),
        ClaimSpec(
            ClaimId.T1_5_POS_7MOD8,
            "Q(p,S_4) - [(p-1)/4]/2 > 0 for p = 7 mod 8",
            ">",
            _seven_mod_eight,
            _q_minus(S4, _half_floor_quarter),
        ),
        ClaimSpec(
            ClaimId.C1_6,
            "N(p,S_4) = [(p-1)/4]/2 for p = 3 mod 8",
            "=",
            _three_mod_eight,
            _n_minus(S4, _half_floor_quarter),
        ),
        ClaimSpec(
            ClaimId.C1_6_POS_1MOD4,
            "(p-1)/8 - N(p,S_4) > 0 for p = 1 mod 4",
            ">",
            _one_mod_four,
            _minus_n(S4, _eighth),
        ),
        ClaimSpec(
            ClaimId.C1_6_POS_7MOD8,
            "[(p-1)/4]/2 - N(p,S_4) > 0 for p = 7 mod 8",
            ">",
            _seven_mod_eight,
            _minus_n(S4, _half_floor_quarter),
        ),
        ClaimSpec(
            ClaimId.C1_7_POS,
            "Q(p,S_2 minus S_4) - [(p-1)/4]/2 > 0 for p = 3 mod 8",
            ">",
            _three_mod_eight,
            _q_minus(S2_MINUS_S4, _half_floor_quarter),
        ),
    )
}


def _parse_ids(text: str, registry: Dict, make: Callable[[str], enum.Enum]) -> List:
    if text.strip().lower() == "all":
        return list(registry)
    try:
        wanted = {make(item.strip()) for item in text.split(",") if item.strip()}
    except ValueError as exc:
        raise UsageError(f"Unknown id in {text!r}: {exc}") from exc
    return [key for key in registry if key in wanted]


def parse_identity_ids(text: str) -> List[IdentityId]:
    """Comma-separated ids, or ``all``; registry order is kept."""

    return _parse_ids(text, IDENTITIES, lambda item: IdentityId(item.upper()))


def parse_claim_ids(text: str) -> List[ClaimId]:
    return _parse_ids(text, CLAIMS, ClaimId)
