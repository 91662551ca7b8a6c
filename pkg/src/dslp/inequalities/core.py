"""Chains of eigenvalue comparisons and the report produced by checking one.

A chain is a list of segments.  Each segment is an ordered list of groups
joined by relations ``"<"`` or ``"<="``; every member of a group is compared
with every member of the next group.  A member is a term ``(key, index)``
naming the ``index``-th eigenvalue of the problem stored under ``key``, or a
constant ``Const(value, label)``.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

DEFAULT_TOL = 1e-8

#: A strict link whose gap is at most this multiple of ``tol`` is "tight".
TIGHT_FACTOR = 10.0


class Const(NamedTuple):
    value: float
    label: str


@dataclass
class Segment:
    """Groups joined by relations; ``rels[i]`` sits between groups i and i+1."""

    groups: list = field(default_factory=list)
    rels: list = field(default_factory=list)

    def add(self, group, rel=None):
        """Append ``group``, joined to the previous one by ``rel``."""
        group = _as_group(group)
        if self.groups:
            if rel not in ("<", "<="):
                raise ValueError(f"bad relation {rel!r}")
            self.rels.append(rel)
        self.groups.append(group)
        return self

    def comparisons(self):
        """Number of pairwise comparisons the segment encodes."""
        return sum(len(a) * len(b) for a, b in zip(self.groups, self.groups[1:]))


def _as_group(group):
    if isinstance(group, Const):
        return (group,)
    if isinstance(group, tuple) and len(group) == 2 and isinstance(group[1], int):
        return (group,)
    return tuple(group)


def ladder(period, stop, start=0, limit=10_000):
    """Unroll a periodic chain until the group ``stop`` has been emitted.

    ``period(n)`` returns a list of ``(group, rel_after)`` pairs for the
    ``n``-th period.  The relation after the stop group is discarded.
    """
    stop = _as_group(stop)
    seg = Segment()
    pending = None
    n = start
    while n < limit:
        for group, rel in period(n):
            seg.add(group, pending)
            if _as_group(group) == stop:
                return seg
            pending = rel
        n += 1
    raise ValueError(f"stop group {stop} never reached")


def alternate(first, second, stop, rel="<="):
    """first_0 rel second_0 rel first_1 rel second_1 ... up to ``stop``."""
    return ladder(lambda n: [((first, n), rel), ((second, n), rel)], stop)


class Violation(NamedTuple):
    """A failed comparison or claim.  ``gap`` is rhs - lhs for a link."""

    position: Optional[int]
    lhs: float
    rhs: float
    gap: float
    note: str = ""


@dataclass
class TheoremReport:
    """Outcome of checking one theorem on one instance."""

    id: str
    hypotheses_met: bool
    chain: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    strictness_flags: list = field(default_factory=list)
    case: str = ""
    problems: dict = field(default_factory=dict)
    comparisons: int = 0
    reason: str = ""

    @property
    def passed(self):
        return self.hypotheses_met and not self.violations

    def to_dict(self):
        return {
            "id": self.id,
            "hypotheses_met": self.hypotheses_met,
            "passed": self.passed,
            "case": self.case,
            "reason": self.reason,
            "comparisons": self.comparisons,
            "chain": [[label, value] for label, value in self.chain],
            "violations": [v._asdict() for v in self.violations],
            "strictness_flags": list(self.strictness_flags),
            "problems": self.problems,
        }


def evaluate_chain(segments, values, labels, tol=DEFAULT_TOL, report=None):
    """Check every comparison of ``segments`` and record it in ``report``.

    ``values[key]`` is the expanded eigenvalue list of problem ``key`` and
    ``labels[key]`` its display name.  Every link fails when rhs - lhs < -tol.
    Strictness cannot be decided below the resolution of the solver, so a
    strict link whose gap is at most ``TIGHT_FACTOR * tol`` is recorded in
    ``strictness_flags`` instead of failing.
    """
    if report is None:
        report = TheoremReport("", True)

    def resolve(term):
        if isinstance(term, Const):
            return term.label, float(term.value)
        key, idx = term
        return f"lambda_{idx}({labels[key]})", float(values[key][idx])

    position = 0
    for seg in segments:
        resolved = [[resolve(t) for t in g] for g in seg.groups]
        for group in resolved:
            report.chain.extend(group)
        for a, rel, b in zip(resolved, seg.rels, resolved[1:]):
            for la, va in a:
                for lb, vb in b:
                    gap = vb - va
                    if rel == "<":
                        if gap < -tol:
                            report.violations.append(
                                Violation(position, va, vb, gap, f"{la} < {lb}")
                            )
                        elif gap <= TIGHT_FACTOR * tol:
                            report.strictness_flags.append(position)
                    elif gap < -tol:
                        report.violations.append(Violation(position, va, vb, gap, f"{la} <= {lb}"))
                    position += 1
    report.comparisons += position
    return report
