"""Factor-and-branch solving of the over-determined coefficient system.

Every equation is split into factors (rational and monomial content,
common factors of the coefficients in one variable, and quadratics in one
variable with a square discriminant). The solver picks the equation with
the fewest factors, branches on each factor vanishing while the earlier
siblings are assumed nonzero, solves linear factors exactly and
back-substitutes. Parameters are treated as generic: a branch that needs
a relation among parameters alone is pruned with that reason recorded.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .equation_model import Poly, Symbol, SymbolKind, normalize, substitute
from .equation_model.rational import RationalFunction
from .ansatz import AlgebraicSystem, AnsatzSpec, build_ansatz
from .errors import DepthLimitExceeded

DEFAULT_DEPTH_LIMIT = 12


# --- factorization ----------------------------------------------------------

def _fkey(f: Poly):
    return (f.total_degree(), len(f.terms), str(f))


def _var_order(p: Poly, priority: tuple) -> list:
    vs = p.variables()
    ranked = [v for v in priority if v in vs]
    rest = sorted(vs - set(ranked), key=lambda a: a.sort_key())
    return ranked + rest


def _common_factor(q: Poly, priority: tuple):
    """A nonconstant ``g`` dividing every coefficient of ``q`` in some variable."""
    for y in _var_order(q, priority):
        coeffs = [c for c in q.coefficients(y).values() if not c.is_zero()]
        if len(coeffs) < 2:
            continue
        smallest = min(coeffs, key=lambda c: (len(c.terms), str(c)))
        if smallest.is_constant():
            continue
        _, cands = factorize(smallest, priority)
        for g, _m in cands:
            if all(c.div_exact(g) is not None for c in coeffs):
                return g
    return None


def _quadratic_split(q: Poly, priority: tuple):
    for y in _var_order(q, priority):
        coeffs = q.coefficients(y)
        if max(coeffs) != 2:
            continue
        a, b, c = (coeffs.get(k, Poly()) for k in (2, 1, 0))
        s = (b * b - a * c.scale(4)).sqrt()
        if s is None:
            continue
        Y = Poly.atom(y)
        f1 = (a * Y).scale(2) + b - s
        f2 = (a * Y).scale(2) + b + s
        # q * 4a == f1 * f2; remove the factors of a.
        if not a.is_constant():
            _, afs = factorize(a, priority)
            ok = True
            for g, m in afs:
                for _ in range(m):
                    r = f1.div_exact(g)
                    if r is not None:
                        f1 = r
                        continue
                    r = f2.div_exact(g)
                    if r is None:
                        ok = False
                        break
                    f2 = r
                if not ok:
                    break
            if not ok:
                continue
        if f1.is_constant() or f2.is_constant():
            continue
        prod = f1 * f2
        _, pp = prod.primitive()
        _, qp = q.primitive()
        if pp == qp:
            return f1, f2
    return None


def factorize(p: Poly, priority: tuple = ()) -> tuple[Fraction, list]:
    """``p == c * prod(f**m)`` with primitive factors sorted canonically."""
    if p.is_zero():
        raise ZeroDivisionError("cannot factor the zero polynomial")
    c, prim = p.primitive()
    found: list = []
    mono = prim.monomial_content()
    if mono:
        found.extend(Poly.atom(a) for a, e in mono for _ in range(e))
        prim = prim.mul_monomial(tuple((a, -e) for a, e in mono))
    stack = [prim]
    while stack:
        q = stack.pop()
        cq, q = q.primitive()
        c *= cq
        if q.is_constant():
            c *= q.constant_value()
            continue
        g = _common_factor(q, priority)
        if g is not None:
            stack.extend([g, q.div_exact(g)])
            continue
        split = _quadratic_split(q, priority)
        if split is not None:
            f1, f2 = split
            c1, f1 = f1.primitive()
            c2, f2 = f2.primitive()
            stack.extend([f1, f2])
            # restore the exact constant below
            continue
        found.append(q)
    counts: dict = {}
    for f in found:
        counts[f] = counts.get(f, 0) + 1
    factors = sorted(counts.items(), key=lambda fm: _fkey(fm[0]))
    prod = Poly.const(1)
    for f, m in factors:
        prod = prod * f ** m
    # exact constant: p / prod
    (m0, c0) = prod.leading_term(p.sorted_variables() or None) if not prod.is_constant() else ((), Fraction(1))
    lead = dict(p.terms).get(m0)
    if lead is None:
        raise ArithmeticError("factorization lost the leading term")
    c = lead / c0
    if prod.scale(c) != p:
        raise ArithmeticError(f"factorization check failed for {p}")
    return c, factors


def _factorizer(priority):
    return lambda p: factorize(p, priority)


# --- branches -----------------------------------------------------------------

class BranchClass(str, enum.Enum):
    TRIVIAL = "Trivial"
    KINK = "Kink"
    BELL = "Bell"
    MIXED = "Mixed"
    STUCK = "Stuck"


@dataclass(frozen=True, eq=False)
class SolutionBranch:
    """One case of the solution set.

    ``assignments`` maps solved unknowns to rational functions of the
    ``free_symbols`` and parameters; every ``nonzero_constraints`` entry must
    not vanish. A ``STUCK`` branch keeps the equations it could not solve in
    ``residue``.
    """

    assignments: dict
    free_symbols: tuple
    nonzero_constraints: tuple
    classification: BranchClass
    residue: tuple = ()
    path: tuple = ()
    spec: AnsatzSpec | None = None

    @property
    def is_stuck(self) -> bool:
        return self.classification is BranchClass.STUCK

    def value(self, sym: Symbol) -> RationalFunction:
        if sym in self.assignments:
            return self.assignments[sym]
        return RationalFunction(Poly.atom(sym))

    @property
    def integration_constant(self) -> Symbol | None:
        for s in list(self.assignments) + list(self.free_symbols):
            if s.kind is SymbolKind.INTEGRATION_CONSTANT:
                return s
        return None

    def relations(self) -> list[Poly]:
        """Assignments of the integration constant written as ``P = 0`` relations."""
        out = []
        for s, r in self.assignments.items():
            if s.kind is SymbolKind.INTEGRATION_CONSTANT:
                out.append(r.num - Poly.atom(s) * r.denominator())
        return out

    def free_count(self, exclude_constant: bool = True) -> int:
        return sum(1 for s in self.free_symbols
                   if not (exclude_constant and s.kind is SymbolKind.INTEGRATION_CONSTANT))

    def same_family(self, other: "SolutionBranch") -> bool:
        if set(self.assignments) != set(other.assignments):
            return False
        if [r for r in self.residue] != [r for r in other.residue]:
            return False
        return all(self.assignments[s] == other.assignments[s] for s in self.assignments)


@dataclass
class CaseAnalysis:
    """Full record of a case split: surviving branches and every pruned leaf."""

    branches: list = field(default_factory=list)
    leaves: list = field(default_factory=list)  # (status, reason, path)
    alternatives: int = 0
    internal: int = 0
    merged: int = 0

    @property
    def pruned(self) -> list:
        return [leaf for leaf in self.leaves if leaf[0] == "pruned"]

    @property
    def solutions(self) -> list:
        return [leaf for leaf in self.leaves if leaf[0] == "solution"]

    @property
    def stuck(self) -> list:
        return [leaf for leaf in self.leaves if leaf[0] == "stuck"]


@dataclass(frozen=True)
class _State:
    equations: tuple
    assignments: dict
    nonzero: tuple
    path: tuple
    depth: int


class _Solver:
    def __init__(self, system: AlgebraicSystem, depth_limit: int):
        self.system = system
        self.unknowns = tuple(system.unknowns)
        self.unknown_set = set(self.unknowns)
        self.priority = self.unknowns
        self.depth_limit = depth_limit
        self.factorize = _factorizer(self.priority)
        self.result = CaseAnalysis()
        self._raw: list = []

    # helpers
    def is_param_only(self, p: Poly) -> bool:
        return not (p.variables() & self.unknown_set)

    def linear_candidates(self, f: Poly, assigned) -> list:
        cands = []
        for idx, x in enumerate(self.unknowns):
            if x in assigned or x not in f.variables():
                continue
            if f.degree(x) != 1:
                continue
            coeffs = f.coefficients(x)
            p = coeffs[1]
            rank = 0 if p.is_constant() else (1 if self.is_param_only(p) else 2)
            cands.append((rank, idx, x, p, coeffs.get(0, Poly())))
        cands.sort(key=lambda c: (c[0], c[1]))
        return cands

    def nonzero_factors(self, p: Poly) -> list:
        if p.is_constant():
            return []
        _, fs = self.factorize(p)
        return [f for f, _ in fs]

    def positive_definite(self, f: Poly, nonzero) -> bool:
        """Sum of even monomials with positive coefficients, one of them surely nonzero."""
        strict = False
        for mono, c in f.terms.items():
            if c <= 0 or any(e % 2 for _, e in mono):
                return False
            if all(Poly.atom(a) in nonzero or not (Poly.atom(a).variables() & self.unknown_set)
                   for a, _ in mono):
                strict = True
        return strict

    def eliminate(self, residue: tuple):
        """One pseudo-division step between two residue equations, if it makes progress."""
        for i, f in enumerate(residue):
            for g in residue[i + 1:]:
                for y in self.unknowns:
                    df, dg = f.degree(y), g.degree(y)
                    if df <= 0 or df != dg:
                        continue
                    lf, lg = f.coefficients(y)[df], g.coefficients(y)[dg]
                    h = lg * f - lf * g
                    if h.is_zero():
                        continue
                    known = {r.primitive()[1] for r in residue}
                    if h.degree(y) < df and h.primitive()[1] not in known:
                        return h
        return None

    def leaf(self, status, reason, state):
        self.result.leaves.append((status, reason, state.path))

    # main recursion
    def run(self):
        root = _State(
            equations=tuple(self.system.equations),
            assignments={},
            nonzero=tuple(sorted({f for a in self.system.assumptions for f in self.nonzero_factors(a)}, key=_fkey)),
            path=(),
            depth=0,
        )
        self.process(root)
        self.finish()
        return self.result

    def process(self, state: _State):
        if state.depth > self.depth_limit:
            raise DepthLimitExceeded(f"case tree deeper than {self.depth_limit}: {' ; '.join(state.path)}")
        nonzero = set(state.nonzero)
        eq_factors = []
        seen = set()
        for eq in state.equations:
            if eq.is_zero():
                continue
            _, fs = self.factorize(eq)
            if not fs:
                self.leaf("pruned", f"nonzero constant {eq} forced to vanish", state)
                return
            live = tuple(f for f, _ in fs if f not in nonzero and not self.is_param_only(f)
                         and not self.positive_definite(f, nonzero))
            if not live:
                if any(self.positive_definite(f, nonzero) for f, _ in fs):
                    self.leaf("pruned", f"{eq} = 0 has no real solution", state)
                else:
                    self.leaf("pruned", f"{eq} = 0 needs a nonzero factor or a parameter relation to vanish", state)
                return
            if live not in seen:
                seen.add(live)
                eq_factors.append((live, [f for f, _ in fs]))
        if not eq_factors:
            self.emit(state, residue=())
            return

        def solvable(f):
            return bool(self.linear_candidates(f, state.assignments))

        def key(item):
            fs = item[0]
            if any(not solvable(f) for f in fs):
                return (1, 3, len(fs), max(f.total_degree() for f in fs), str(fs))
            worst = max(self.linear_candidates(f, state.assignments)[0][0] for f in fs)
            return (0, worst, len(fs), max(f.total_degree() for f in fs), str(fs))

        eq_factors.sort(key=key)
        splittable = [item for item in eq_factors if len(item[0]) > 1 or solvable(item[0][0])]
        if not splittable:
            residue = tuple(fs[0] for fs, _ in eq_factors)
            reduced = self.eliminate(residue)
            if reduced is not None:
                self.process(replace(state, equations=residue + (reduced,), depth=state.depth + 1,
                                     path=state.path + (f"eliminate: {reduced} = 0",)))
                return
            self.emit(state, residue=residue)
            return
        chosen, raw = splittable[0]
        others = [fs for fs, _ in eq_factors if fs is not chosen]
        other_eqs = tuple(_product(fs) for fs in others)

        self.result.internal += 1
        assumed: list = []
        for f in raw:
            self.result.alternatives += 1
            if f in nonzero or f in assumed:
                self.leaf("pruned", f"{f} = 0 contradicts {f} != 0", state)
                assumed.append(f) if f not in assumed else None
                continue
            if self.is_param_only(f):
                self.leaf("pruned", f"{f} = 0 is a relation among parameters", state)
                continue
            child = replace(
                state,
                equations=other_eqs,
                nonzero=_merge(state.nonzero, assumed),
                path=state.path + tuple(f"{a} != 0" for a in assumed),
                depth=state.depth + 1,
            )
            assumed.append(f)
            if solvable(f):
                self.solve_factor(child, f)
            else:
                self.process(replace(child, equations=child.equations + (f,),
                                     path=child.path + (f"{f} = 0",)))

    def solve_factor(self, state: _State, f: Poly):
        rank, _, x, p, q = self.linear_candidates(f, state.assignments)[0]
        value = RationalFunction(-q).divide(p, self.factorize)
        if rank < 2:
            extra = [] if rank == 0 else self.nonzero_factors(p)
            self.assign(replace(state, nonzero=_merge(state.nonzero, extra)), x, value)
            return
        # coefficient may vanish: split on it
        self.result.internal += 1
        self.result.alternatives += 2
        self.assign(replace(state, nonzero=_merge(state.nonzero, self.nonzero_factors(p)),
                            path=state.path + (f"{p} != 0",), depth=state.depth + 1), x, value)
        self.process(replace(state, equations=state.equations + (p, q),
                             path=state.path + (f"{p} = 0", f"{q} = 0"), depth=state.depth + 1))

    def assign(self, state: _State, x: Symbol, value: RationalFunction):
        path = state.path + (f"{x.name} = {value}",)
        st = replace(state, path=path)
        assignments = {}
        for y, r in state.assignments.items():
            assignments[y] = r.subs1(x, value, self.factorize)
        assignments[x] = value
        equations = []
        for eq in state.equations:
            num = RationalFunction(eq).subs1(x, value, self.factorize).num
            if not num.is_zero():
                equations.append(num)
        nonzero: list = []
        for nz in state.nonzero:
            num = RationalFunction(nz).subs1(x, value, self.factorize).num
            if num.is_zero():
                self.leaf("pruned", f"{nz} != 0 violated by {x.name} = {value}", st)
                return
            nonzero.extend(self.nonzero_factors(num))
        for f in value.den:
            nonzero.extend(self.nonzero_factors(f))
        self.process(_State(
            equations=tuple(equations),
            assignments=assignments,
            nonzero=_merge((), nonzero),
            path=path,
            depth=state.depth + 1,
        ))

    def absorb(self, branches: list) -> list:
        """Drop a sibling assumption ``f != 0`` when the ``f = 0`` case is another branch."""
        changed = True
        while changed:
            changed = False
            for i, outer in enumerate(branches):
                if outer.is_stuck:
                    continue
                for j, inner in enumerate(branches):
                    if i == j or inner.is_stuck or not _contains(outer, inner):
                        continue
                    violated = [f for f in outer.nonzero_constraints if _value_zero(f, inner)]
                    if len(violated) != 1:
                        continue
                    f = violated[0]
                    rest = tuple(g for g in outer.nonzero_constraints if g != f)
                    pieces = _closure_restricted(outer, f, self.unknowns, rest)
                    if all(not p.is_stuck and _contains(inner, p) for p in pieces):
                        branches = list(branches)
                        branches[i] = replace(outer, nonzero_constraints=rest)
                        del branches[j]
                        self.result.merged += 1
                        changed = True
                        break
                if changed:
                    break
        return branches

    def emit(self, state: _State, residue: tuple):
        status = "stuck" if residue else "solution"
        self.leaf(status, "unsolved residue" if residue else "", state)
        ordered = {x: state.assignments[x] for x in self.unknowns if x in state.assignments}
        free = tuple(x for x in self.unknowns if x not in state.assignments)
        constraints = tuple(f for f in state.nonzero if not f.is_constant())
        cls = BranchClass.STUCK if residue else classify(ordered, self.system.spec)
        self._raw.append(SolutionBranch(
            assignments=ordered,
            free_symbols=free,
            nonzero_constraints=constraints,
            classification=cls,
            residue=residue,
            path=state.path,
            spec=self.system.spec,
        ))

    def finish(self):
        out: list[SolutionBranch] = []
        for b in self._raw:
            for i, kept in enumerate(out):
                if kept.same_family(b):
                    common = tuple(f for f in kept.nonzero_constraints if f in b.nonzero_constraints)
                    out[i] = replace(kept, nonzero_constraints=common)
                    self.result.merged += 1
                    break
            else:
                out.append(b)
        out = self.absorb(out)
        kept = []
        for i, b in enumerate(out):
            if any(j != i and _subsumes(other, b) and not (_subsumes(b, other) and j > i)
                   for j, other in enumerate(out)):
                self.result.merged += 1
                continue
            kept.append(b)
        self.result.branches = kept


def _closure_restricted(outer: SolutionBranch, f: Poly, unknowns: tuple, assumptions: tuple) -> list:
    """Branches of ``outer``'s assignment relations together with ``f = 0``."""
    eqs = [Poly.atom(x) * r.denominator() - r.num for x, r in outer.assignments.items()]
    sys = AlgebraicSystem(equations=tuple(eqs) + (f,), unknowns=unknowns, parameters=(),
                          assumptions=assumptions, spec=outer.spec)
    return solve_by_cases(sys)


def _product(fs) -> Poly:
    out = Poly.const(1)
    for f in fs:
        out = out * f
    return out


def _merge(existing, extra) -> tuple:
    items = list(existing)
    for f in extra:
        if f not in items and not f.is_constant():
            items.append(f)
    return tuple(sorted(items, key=_fkey))


_T = Symbol("_tanh", SymbolKind.PARAMETER)
_S = Symbol("_sech", SymbolKind.PARAMETER)


def classify(assignments: dict, spec: AnsatzSpec | None) -> BranchClass:
    """Shape of the profile after rewriting even tanh powers through sech.

    The profile becomes ``A(sech) + tanh * B(sech)``: a nonzero ``B`` is a
    kink, a nonconstant ``A`` a bell, both together a mixed wave.
    """
    if spec is None:
        return BranchClass.MIXED
    values = {s: (assignments[s] if s in assignments else RationalFunction(Poly.atom(s)))
              for s in (spec.V0, *spec.U, *spec.V)}
    lcm: dict = {}
    for r in values.values():
        for f, m in r.den.items():
            lcm[f] = max(lcm.get(f, 0), m)
    D = RationalFunction(Poly.const(1))
    for f, m in lcm.items():
        D = D * RationalFunction(f ** m)
    T, S = Poly.atom(_T), Poly.atom(_S)
    one_minus = Poly.const(1) - S * S
    profile = (values[spec.V0] * D).num
    for i, (U, V) in enumerate(zip(spec.U, spec.V), start=1):
        tpow = (T if i % 2 else Poly.const(1)) * one_minus ** (i // 2)
        profile = profile + (values[U] * D).num * tpow + (values[V] * D).num * S ** i
    parts = profile.coefficients(_T)
    a, b = parts.get(0, Poly()), parts.get(1, Poly())
    bell = any(k > 0 and not c.is_zero() for k, c in a.coefficients(_S).items())
    kink = not b.is_zero()
    if kink and bell:
        return BranchClass.MIXED
    if kink:
        return BranchClass.KINK
    if bell:
        return BranchClass.BELL
    return BranchClass.TRIVIAL


def explore_cases(system: AlgebraicSystem, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> CaseAnalysis:
    """Run the case split and keep the full leaf record."""
    return _Solver(system, depth_limit).run()


def solve_by_cases(system: AlgebraicSystem, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> list[SolutionBranch]:
    return explore_cases(system, depth_limit).branches


def apply_branch(branch: SolutionBranch, spec: AnsatzSpec | None = None):
    """Closed-form profile ``u(xi)`` for a branch; free symbols stay symbolic."""
    spec = spec or branch.spec
    if spec is None:
        raise ValueError("branch carries no ansatz spec")
    profile = build_ansatz(spec)
    bindings = {s: r.to_expr() for s, r in branch.assignments.items() if s in set(spec.unknowns)}
    return substitute(profile, bindings) if bindings else normalize(profile)


# --- loss of solutions at C = 0 ---------------------------------------------------

@dataclass
class LossEntry:
    branch_index: int
    status: str  # LOST_AT_C0, KEPT, TRIVIAL, STUCK
    reason: str
    free_before: int
    free_after: int
    specializations: list = field(default_factory=list)
    matches: list = field(default_factory=list)


@dataclass
class LossReport:
    constant: Symbol | None
    entries: list = field(default_factory=list)
    full_branches: list = field(default_factory=list)
    c0_branches: list = field(default_factory=list)
    unmatched_c0: list = field(default_factory=list)

    @property
    def flagged(self) -> list:
        return [e for e in self.entries if e.status == "LOST_AT_C0"]

    def __bool__(self):
        return bool(self.entries)


def _find_constant(system: AlgebraicSystem) -> Symbol | None:
    for s in system.unknowns:
        if s.kind is SymbolKind.INTEGRATION_CONSTANT:
            return s
    for eq in system.equations:
        for s in eq.variables():
            if isinstance(s, Symbol) and s.kind is SymbolKind.INTEGRATION_CONSTANT:
                return s
    return None


def _contains(outer: SolutionBranch, inner: SolutionBranch) -> bool:
    """Whether every point of ``inner`` satisfies ``outer``'s assignments."""
    if outer.is_stuck or inner.is_stuck:
        return False
    for x, r in outer.assignments.items():
        val = r
        for y, ry in inner.assignments.items():
            if y in val.variables():
                val = val.subs1(y, ry)
        if not (val == inner.value(x)):
            return False
    return True


def _value_zero(f: Poly, branch: SolutionBranch) -> bool:
    val = RationalFunction(f)
    for y, ry in branch.assignments.items():
        if y in val.variables():
            val = val.subs1(y, ry)
    return val.is_zero()


def _subsumes(outer: SolutionBranch, inner: SolutionBranch) -> bool:
    """``inner`` is a special case of ``outer``, constraints included."""
    if not _contains(outer, inner):
        return False
    for f in outer.nonzero_constraints:
        val = RationalFunction(f)
        for y, ry in inner.assignments.items():
            if y in val.variables():
                val = val.subs1(y, ry)
        if val.is_zero():
            return False
    return True


def specialize_branch(branch: SolutionBranch, constant: Symbol, unknowns: tuple,
                      depth_limit: int = DEFAULT_DEPTH_LIMIT) -> list:
    """Branches of ``branch`` restricted to ``constant = 0``."""
    zero = {constant: Poly()}
    eqs = []
    for x, r in branch.assignments.items():
        rel = r.num if x == constant else Poly.atom(x) * r.denominator() - r.num
        rel = rel.subs(zero)
        if not rel.is_zero():
            eqs.append(rel)
    assumptions = []
    for f in branch.nonzero_constraints:
        g = f.subs(zero)
        if g.is_zero():
            return []
        assumptions.append(g)
    sys = AlgebraicSystem(
        equations=tuple(eqs),
        unknowns=tuple(u for u in unknowns if u != constant),
        parameters=(),
        assumptions=tuple(assumptions),
        spec=branch.spec,
    )
    return solve_by_cases(sys, depth_limit)


def compare_constant_zero(sys_full: AlgebraicSystem, sys_c0: AlgebraicSystem,
                          depth_limit: int = DEFAULT_DEPTH_LIMIT) -> LossReport:
    """Pair branches of the full system with those of its ``C = 0`` specialization."""
    constant = _find_constant(sys_full)
    if constant is None:
        return LossReport(constant=None)
    full = solve_by_cases(sys_full, depth_limit)
    c0 = solve_by_cases(sys_c0, depth_limit)
    report = LossReport(constant=constant, full_branches=full, c0_branches=c0)
    matched = set()
    for i, b in enumerate(full):
        before = b.free_count()
        if b.is_stuck:
            report.entries.append(LossEntry(i, "STUCK", "branch has unsolved residue", before, -1))
            continue
        subs = specialize_branch(b, constant, tuple(sys_full.unknowns), depth_limit)
        live = [s for s in subs if not s.is_stuck]
        after = max((s.free_count() for s in live), default=-1)
        matches = sorted({j for s in live for j, c in enumerate(c0) if _contains(c, s)})
        matched.update(matches)
        if b.classification is BranchClass.TRIVIAL:
            status, reason = "TRIVIAL", f"constant profile; free symbols {before} -> {after} at C = 0"
        elif not subs:
            status, reason = "LOST_AT_C0", "family is empty at C = 0"
        elif after < before:
            status, reason = "LOST_AT_C0", f"free symbols drop from {before} to {after} at C = 0"
        elif b.classification is not BranchClass.TRIVIAL and live and all(
                s.classification is BranchClass.TRIVIAL for s in live):
            status, reason = "LOST_AT_C0", "family collapses to a trivial profile at C = 0"
        else:
            status, reason = "KEPT", "family survives C = 0 with the same freedom"
        report.entries.append(LossEntry(i, status, reason, before, after, subs, matches))
    report.unmatched_c0 = [j for j in range(len(c0)) if j not in matched]
    return report


__all__ = [
    "BranchClass", "CaseAnalysis", "DEFAULT_DEPTH_LIMIT", "LossEntry", "LossReport",
    "SolutionBranch", "apply_branch", "classify", "compare_constant_zero", "explore_cases",
    "factorize", "solve_by_cases", "specialize_branch",
]
