"""Semi-refutation of the infinitary system via negative mappings.

Derivability with the omega-rule implies derivability of every n-th
negative mapping, and each mapping is iteration-free on the left, so the
finitary prover decides it exactly.  An underivable mapping therefore
refutes the original sequent; absence of a witness is only evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .formula import Plus, Sequent, negative_mapping, render_sequent
from .prover import ProveResult, prove

__all__ = ["RefutationVerdict", "UnfoldingReport", "omega_premises",
           "refute", "check_bounded_unfolding"]


@dataclass(frozen=True)
class RefutationVerdict:
    outcome: str                       # "refuted" | "consistent_up_to" | "inconclusive"
    n: int                             # witness n, or the bound reached
    mapped: Optional[Sequent] = None   # failing mapped sequent when refuted

    @property
    def refuted(self) -> bool:
        return self.outcome == "refuted"


@dataclass(frozen=True)
class UnfoldingReport:
    premises: tuple                    # the first n omega premises
    verdicts: tuple                    # "derivable" | "underivable" | "unknown"

    @property
    def refuted(self) -> bool:
        return "underivable" in self.verdicts

    @property
    def first_failure(self) -> Optional[Sequent]:
        for seq, v in zip(self.premises, self.verdicts):
            if v == "underivable":
                return seq
        return None


def omega_premises(s: Sequent, pos: int, n: int) -> list:
    """First ``n`` premises of the omega rule at antecedent position ``pos``."""
    if n < 1:
        raise ValueError("omega_premises requires n >= 1")
    if not 0 <= pos < len(s.antecedent) or not isinstance(s.antecedent[pos], Plus):
        raise ValueError(f"antecedent position {pos} of {render_sequent(s)} "
                         "does not hold an iterated formula")
    body = s.antecedent[pos].body
    out = []
    for k in range(1, n + 1):
        ant = s.antecedent[:pos] + (body,) * k + s.antecedent[pos + 1:]
        out.append(Sequent(ant, s.succedent))
    return out


def refute(s: Sequent, n_max: int, budget: Optional[int] = None) -> RefutationVerdict:
    """Search negative mappings for n = 1..n_max; smallest witness wins."""
    if n_max < 1:
        raise ValueError("refute requires n_max >= 1")
    for n in range(1, n_max + 1):
        mapped = negative_mapping(s, n)
        result = prove(mapped, budget)
        if result.status == "underivable":
            return RefutationVerdict("refuted", n, mapped)
        if result.status == "unknown":
            return RefutationVerdict("inconclusive", n)
    return RefutationVerdict("consistent_up_to", n_max)


def check_bounded_unfolding(s: Sequent, pos: int, n: int,
                            budget: Optional[int] = None) -> UnfoldingReport:
    """Decide the first ``n`` omega premises; any failure refutes ``s``."""
    premises = omega_premises(s, pos, n)
    verdicts = tuple(prove(p, budget).status for p in premises)
    return UnfoldingReport(tuple(premises), verdicts)
