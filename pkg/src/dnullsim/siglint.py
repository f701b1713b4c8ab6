"""Signature bookkeeping for the null-frame equations.

Every null-frame quantity carries a half-integer weight s2.  For quantities
defined through frame contractions the weight is half the number of angular
indices plus the number of incoming indices minus one; the matter fields and
the coupling constant are weighted so that the gauge-covariant derivative and
the sourced Maxwell equations stay homogeneous.  Each derivative shifts the
weight by a fixed amount (incoming +1, angular +1/2, outgoing 0), and every
additive term of a valid equation then shares one s2.  This module parses a
schematic-equation corpus, checks that homogeneity, verifies the structural
shape of the eight transport pairs, and exposes the expected sup-norm decay
exponents per symbol.

Equation grammar (one equation per line, `label: lhs = rhs`):
terms are separated by + or -, factors inside a term by '*', with an optional
leading rational coefficient.  Derivative and projection operators are prefix
functions: D3, D4, Ds (any angular derivative; the Hodge-type operators d1,
d1s, d2, d2s count the same as Ds), star (dual), Im/Re/conj (inert), sharp1
(an optional extra weighted angular derivative, used by schematic error
terms).  'i' is the imaginary unit, 'ef' the coupling, 'a', 'u', 'b' inert
weight symbols.  Signs inside paired-operator argument lists are suppressed;
only the additive term structure matters for the checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources

__all__ = [
    "SymbolInfo",
    "Registry",
    "Factor",
    "Term",
    "EquationAST",
    "ParseError",
    "parse_equation",
    "print_equation",
    "signature_of",
    "check_homogeneous",
    "check_bianchi_pair",
    "expected_bounds",
    "default_registry",
    "load_corpus",
    "lint_corpus",
    "mutation_sweep",
    "rule_consistency",
    "lint_report",
    "BIANCHI_PAIRS",
    "TABLE_ENTRIES",
]

HALF = Fraction(1, 2)

# weight increment per operator (lo == hi for all but sharp1)
_OP_INCREMENT = {
    "D3": (Fraction(1), Fraction(1)),
    "D4": (Fraction(0), Fraction(0)),
    "Ds": (HALF, HALF),
    "d1": (HALF, HALF),
    "d1s": (HALF, HALF),
    "d2": (HALF, HALF),
    "d2s": (HALF, HALF),
    "star": (Fraction(0), Fraction(0)),
    "Im": (Fraction(0), Fraction(0)),
    "Re": (Fraction(0), Fraction(0)),
    "conj": (Fraction(0), Fraction(0)),
    "sharp1": (Fraction(0), HALF),
}


@dataclass(frozen=True)
class SymbolInfo:
    """One registry row: weight, optional frame-index counts, decay bound."""

    name: str
    s2: Fraction | None = None
    family_range: tuple[Fraction, Fraction] | None = None
    frame_counts: tuple[int, int] | None = None  # (angular, incoming)
    bound: tuple[Fraction, Fraction] | None = None  # (a power, u power)
    members: tuple[str, ...] = ()

    @property
    def is_family(self) -> bool:
        return self.family_range is not None


class Registry:
    """Immutable symbol table; mutated copies drive the rigidity sweep."""

    def __init__(self, infos: dict[str, SymbolInfo]):
        self._infos = dict(infos)

    def __contains__(self, name: str) -> bool:
        return name in self._infos

    def info(self, name: str) -> SymbolInfo:
        try:
            return self._infos[name]
        except KeyError:
            raise KeyError(f"unknown symbol {name!r}") from None

    def signature(self, name: str) -> Fraction:
        info = self.info(name)
        if info.is_family:
            raise ValueError(f"{name} is a schematic family, not a single symbol")
        return info.s2

    def range(self, name: str) -> tuple[Fraction, Fraction]:
        info = self.info(name)
        if info.is_family:
            return info.family_range
        return (info.s2, info.s2)

    def names(self) -> list[str]:
        return sorted(self._infos)

    def mutated(self, name: str, delta: Fraction) -> "Registry":
        infos = dict(self._infos)
        info = infos[name]
        if info.is_family:
            raise ValueError("cannot mutate a family symbol")
        infos[name] = replace(info, s2=info.s2 + delta)
        return Registry(infos)


def _build_default_registry() -> Registry:
    f = Fraction
    rows: list[SymbolInfo] = []

    def sym(name, s2, frame=None, bound=None):
        rows.append(SymbolInfo(name=name, s2=f(s2), frame_counts=frame,
                               bound=None if bound is None else
                               (f(bound[0]), f(bound[1]))))

    # curvature components (frame counts: angular, incoming)
    sym("alpha", 0, frame=(2, 0), bound=("1/2", -1))
    sym("beta", "1/2", frame=(1, 1), bound=("1/2", -2))
    sym("rho", 1, frame=(0, 2), bound=(1, -3))
    sym("sigma", 1, frame=(0, 2), bound=(1, -3))
    sym("betab", "3/2", frame=(1, 2), bound=("3/2", -4))
    sym("alphab", 2, frame=(2, 2), bound=(2, -5))
    # connection coefficients
    sym("trchi", 0, frame=(2, 0), bound=(0, -1))
    sym("chih", 0, frame=(2, 0), bound=("1/2", -1))
    sym("omega", 0, frame=(0, 1), bound=(0, -1))
    sym("Omega", 0, frame=(0, 1))
    sym("logOmega", 0, frame=(0, 1), bound=(0, -1))
    sym("zeta", "1/2", frame=(1, 1), bound=("1/2", -2))
    sym("eta", "1/2", frame=(1, 1), bound=("1/2", -2))
    sym("etab", "1/2", frame=(1, 1), bound=("1/2", -2))
    sym("trchib", 1, frame=(2, 1))
    sym("chibh", 1, frame=(2, 1), bound=("1/2", -2))
    sym("omegab", 1, frame=(0, 2), bound=(1, -3))
    sym("gslash", 0, frame=(2, 0))
    # matter fields: weighted for homogeneity of the sourced equations,
    # not by frame counts
    sym("beta_F", 0, bound=("1/2", -1))
    sym("rho_F", "1/2", bound=(1, -2))
    sym("sigma_F", "1/2", bound=(1, -2))
    sym("betab_F", 1, bound=("3/2", -3))
    sym("psi", 0, bound=("1/2", -1))
    sym("Psi4", 0, bound=("1/2", -1))
    sym("Psislash", "1/2", bound=(1, -2))
    sym("Psi3", 1, bound=("1/2", -2))
    sym("U", "-1/2")
    # transport homogeneity (potential equations and the covariant-derivative
    # links) forces Ub -> 1/2 and Aslash -> 0
    sym("Ub", "1/2", bound=(1, -2))
    sym("Aslash", 0, bound=("1/2", -1))
    sym("ef", "1/2")
    # renormalized quantities
    sym("mu", 1)
    sym("mub", 1)
    sym("vkp", "1/2")
    sym("vkpb", "3/2")
    sym("K", 1, frame=(0, 2))
    sym("sigmat", 1)
    sym("Ktilde", 1)
    sym("trchit", 0)
    sym("trchibt", 1, bound=(1, -3))
    sym("betat", "1/2")
    sym("betabt", "3/2")
    sym("omegad", 0)
    sym("omegabd", 1)
    sym("Psit3", 1, bound=("3/2", -3))
    # matter stress components and their trace adjustments
    sym("Ric44", 0)
    sym("Ric33", 2)
    sym("Ric34", 1)
    sym("RicA4", "1/2")
    sym("RicA3", "3/2")
    sym("RicAB", 1)
    sym("Rscal", 1)
    sym("S44", 0)
    sym("S33", 2)
    sym("S34", 1)
    sym("Sl4", "1/2")
    sym("Sl3", "3/2")
    sym("Slhat", 1)
    sym("trSl", 1)
    sym("TrS", 1)
    # derivative-of-stress (Cotton) components
    sym("J434", 1)
    sym("J343", 2)
    sym("J4A4", "1/2")
    sym("J3A3", "5/2")
    sym("J3A4", "3/2")
    sym("J4A3", "3/2")
    sym("Jhat4", 1)
    sym("Jhat3", 2)
    sym("Jstar434", 1)
    sym("Jstar343", 2)
    # inert weights
    sym("i", 0)
    sym("a", 0)
    sym("u", 0)
    sym("b", 0)

    infos = {r.name: r for r in rows}

    def family(name, members):
        lows = [infos[m].s2 for m in members]
        infos[name] = SymbolInfo(name=name, family_range=(min(lows), max(lows)),
                                 members=tuple(members))

    family("Gamma_g", ("trchi", "trchit", "trchibt", "eta", "etab", "zeta",
                       "omega", "omegad", "omegab", "omegabd"))
    family("Gamma_b", ("chih", "chibh", "beta_F", "psi", "Psi4", "Psi3",
                       "Aslash", "rho_F", "sigma_F", "betab_F", "Psislash",
                       "Psit3", "Ub"))
    return Registry(infos)


_DEFAULT_REGISTRY: Registry | None = None


def default_registry() -> Registry:
    global _DEFAULT_REGISTRY
    if _DEFAULT_REGISTRY is None:
        _DEFAULT_REGISTRY = _build_default_registry()
    return _DEFAULT_REGISTRY


# table entries subjected to the single-entry mutation sweep; a table row
# covering both the trace and traceless part of a tensor mutates jointly
TABLE_ENTRIES: dict[str, tuple[str, ...]] = {
    "alpha": ("alpha",), "beta": ("beta",), "rho": ("rho",),
    "sigma": ("sigma",), "betab": ("betab",), "alphab": ("alphab",),
    "chi": ("trchi", "chih"), "omega": ("omega",),
    "Omega": ("Omega", "logOmega"), "zeta": ("zeta",), "eta": ("eta",),
    "etab": ("etab",), "chib": ("trchib", "chibh"), "omegab": ("omegab",),
    "gslash": ("gslash",),
    "beta_F": ("beta_F",), "rho_F": ("rho_F",), "sigma_F": ("sigma_F",),
    "betab_F": ("betab_F",), "psi": ("psi",), "Psi4": ("Psi4",),
    "Psislash": ("Psislash",), "Psi3": ("Psi3",), "U": ("U",), "Ub": ("Ub",),
    "Aslash": ("Aslash",), "ef": ("ef",),
    "mu": ("mu",), "mub": ("mub",), "vkp": ("vkp",), "vkpb": ("vkpb",),
    "K": ("K",), "sigmat": ("sigmat",),
}


# ---------------------------------------------------------------------------
# AST and parser
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Factor:
    """A symbol or an operator applied to products of factors."""

    base: str | None = None
    func: str | None = None
    args: tuple[tuple["Factor", ...], ...] = ()
    power: Fraction = Fraction(1)
    conj: bool = False


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    factors: tuple[Factor, ...]

    def _power_of(self, name: str) -> Fraction:
        total = Fraction(0)
        for fct in self.factors:
            if fct.base == name:
                total += fct.power
        return total

    @property
    def e_power(self) -> Fraction:
        return self._power_of("ef")

    @property
    def u_power(self) -> Fraction:
        return self._power_of("u")

    @property
    def a_power(self) -> Fraction:
        return self._power_of("a")


@dataclass(frozen=True)
class EquationAST:
    label: str
    lhs: tuple[Term, ...]
    rhs: tuple[Term, ...]

    @property
    def category(self) -> str:
        return self.label.split("-", 1)[0]


class ParseError(ValueError):
    pass


_TOKEN_RE = re.compile(r"\s*(\d+\.\d+|\d+|[A-Za-z_][A-Za-z0-9_]*|[()*+\-=^,/])")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"bad character at {text[pos:pos + 10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of equation")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}")

    def _is_number(self, tok) -> bool:
        return tok is not None and (tok[0].isdigit())

    def parse_number(self) -> Fraction:
        num = Fraction(self.next())
        if self.peek() == "/":
            self.next()
            den = self.next()
            if not self._is_number(den):
                raise ParseError(f"bad denominator {den!r}")
            num /= Fraction(den)
        return num

    def parse_power(self) -> tuple[Fraction, bool]:
        """After '^': a signed rational exponent or the conjugation marker."""
        if self.peek() == "dag":
            self.next()
            return Fraction(1), True
        sign = Fraction(1)
        if self.peek() == "-":
            self.next()
            sign = Fraction(-1)
        if not self._is_number(self.peek()):
            raise ParseError(f"bad exponent {self.peek()!r}")
        return sign * self.parse_number(), False

    def parse_factor(self) -> Factor:
        tok = self.next()
        if not re.match(r"[A-Za-z_]", tok):
            raise ParseError(f"expected symbol, got {tok!r}")
        if tok in _OP_INCREMENT and self.peek() == "(":
            self.next()
            args = [tuple(self.parse_product())]
            while self.peek() == ",":
                self.next()
                args.append(tuple(self.parse_product()))
            self.expect(")")
            fct = Factor(func=tok, args=tuple(args))
        else:
            fct = Factor(base=tok)
        while self.peek() == "^":
            self.next()
            power, conj = self.parse_power()
            if conj:
                fct = replace(fct, conj=True)
            else:
                fct = replace(fct, power=fct.power * power)
        return fct

    def parse_product(self) -> list[Factor]:
        factors = [self.parse_factor()]
        while self.peek() == "*":
            self.next()
            factors.append(self.parse_factor())
        return factors

    def parse_term(self, sign: int) -> Term:
        coeff = Fraction(sign)
        have_coeff = False
        if self._is_number(self.peek()):
            coeff *= self.parse_number()
            have_coeff = True
            if self.peek() == "*":
                self.next()
        factors: tuple[Factor, ...] = ()
        if self.peek() is not None and re.match(r"[A-Za-z_]", self.peek()):
            factors = tuple(self.parse_product())
        if not factors and not have_coeff:
            raise ParseError(f"empty term at {self.peek()!r}")
        return Term(coeff=coeff, factors=factors)

    def parse_side(self) -> tuple[Term, ...]:
        terms = []
        sign = 1
        if self.peek() == "-":
            self.next()
            sign = -1
        terms.append(self.parse_term(sign))
        while self.peek() in ("+", "-"):
            sign = 1 if self.next() == "+" else -1
            terms.append(self.parse_term(sign))
        return tuple(terms)


def parse_equation(line: str, label: str = "") -> EquationAST:
    """Parse `label: lhs = rhs` (or bare `lhs = rhs` with a label argument)."""
    if ":" in line:
        head, _, body = line.partition(":")
        label = head.strip() or label
    else:
        body = line
    p = _Parser(_tokenize(body))
    lhs = p.parse_side()
    if p.peek() != "=":
        raise ParseError(f"missing '=' in {line!r}")
    p.next()
    rhs = p.parse_side()
    if p.peek() is not None:
        raise ParseError(f"trailing tokens {p.toks[p.i:]!r}")
    if not lhs or not rhs:
        raise ParseError("empty equation side")
    return EquationAST(label=label, lhs=lhs, rhs=rhs)


def _print_factor(fct: Factor) -> str:
    if fct.func is not None:
        inner = ", ".join("*".join(_print_factor(f) for f in arg)
                          for arg in fct.args)
        out = f"{fct.func}({inner})"
    else:
        out = fct.base
    if fct.power != 1:
        p = fct.power
        out += f"^{p.numerator}" if p.denominator == 1 else \
            f"^{p.numerator}/{p.denominator}"
    if fct.conj:
        out += "^dag"
    return out


def _print_term(term: Term) -> str:
    mag = abs(term.coeff)
    parts = []
    if mag != 1 or not term.factors:
        parts.append(str(mag.numerator) if mag.denominator == 1
                     else f"{mag.numerator}/{mag.denominator}")
    if term.factors:
        parts.append("*".join(_print_factor(f) for f in term.factors))
    return " ".join(parts)


def _print_side(terms: tuple[Term, ...]) -> str:
    out = ""
    for i, t in enumerate(terms):
        if i == 0:
            out = ("- " if t.coeff < 0 else "") + _print_term(t)
        else:
            out += (" - " if t.coeff < 0 else " + ") + _print_term(t)
    return out


def print_equation(eq: EquationAST, with_label: bool = True) -> str:
    body = f"{_print_side(eq.lhs)} = {_print_side(eq.rhs)}"
    return f"{eq.label}: {body}" if with_label and eq.label else body


# ---------------------------------------------------------------------------
# signature evaluation and checks
# ---------------------------------------------------------------------------


def _factor_range(fct: Factor, registry: Registry):
    """(lo, hi) weight of one factor, or None on inconsistent paired args."""
    if fct.func is None:
        lo, hi = registry.range(fct.base)
    else:
        arg_ranges = []
        for arg in fct.args:
            r = _product_range(arg, registry)
            if r is None:
                return None
            arg_ranges.append(r)
        lo = max(r[0] for r in arg_ranges)
        hi = min(r[1] for r in arg_ranges)
        if lo > hi:
            return None  # paired arguments carry different weights
        inc_lo, inc_hi = _OP_INCREMENT[fct.func]
        lo, hi = lo + inc_lo, hi + inc_hi
    if fct.power >= 0:
        return (lo * fct.power, hi * fct.power)
    return (hi * fct.power, lo * fct.power)


def _product_range(factors, registry: Registry):
    lo = hi = Fraction(0)
    for fct in factors:
        r = _factor_range(fct, registry)
        if r is None:
            return None
        lo, hi = lo + r[0], hi + r[1]
    return (lo, hi)


def signature_of(term: Term, registry: Registry | None = None):
    """Total weight of a term: a Fraction, or a (lo, hi) pair for families."""
    registry = registry or default_registry()
    r = _product_range(term.factors, registry)
    if r is None:
        raise ValueError("inconsistent paired-operator arguments")
    return r[0] if r[0] == r[1] else r


@dataclass
class Mismatch:
    side: str
    term: str
    expected: Fraction
    lo: Fraction | None
    hi: Fraction | None

    @property
    def deficit(self) -> Fraction | None:
        if self.lo is None:
            return None
        if self.lo <= self.expected <= self.hi:
            return Fraction(0)
        return (self.expected - self.hi if self.expected > self.hi
                else self.expected - self.lo)


@dataclass
class EquationResult:
    label: str
    category: str
    target: Fraction | None
    passed: bool
    mismatches: list[Mismatch] = field(default_factory=list)


def check_homogeneous(eq: EquationAST,
                      registry: Registry | None = None) -> EquationResult:
    """Every additive term must carry the weight of the leading LHS term.

    Terms built from schematic families pass when the target lies inside the
    achievable weight range.
    """
    registry = registry or default_registry()
    if not eq.lhs or not eq.rhs:
        raise ValueError("empty equation")
    lead = _product_range(eq.lhs[0].factors, registry)
    if lead is None or lead[0] != lead[1]:
        raise ValueError(f"{eq.label}: leading term must have a definite weight")
    target = lead[0]
    mismatches: list[Mismatch] = []
    for side, terms in (("lhs", eq.lhs), ("rhs", eq.rhs)):
        for term in terms:
            r = _product_range(term.factors, registry)
            if r is None:
                mismatches.append(Mismatch(side=side, term=_print_term(term),
                                           expected=target, lo=None, hi=None))
            elif not (r[0] <= target <= r[1]):
                mismatches.append(Mismatch(side=side, term=_print_term(term),
                                           expected=target, lo=r[0], hi=r[1]))
    return EquationResult(label=eq.label, category=eq.category, target=target,
                          passed=not mismatches, mismatches=mismatches)


@dataclass(frozen=True)
class BianchiPair:
    """Incoming/outgoing transport pair and its incoming-expansion coefficient."""

    psi1: tuple[str, ...]
    psi2: tuple[str, ...]
    k: int
    kind: int  # 1: psi1 is the higher-rank member; 2: the lower
    coeff: Fraction


BIANCHI_PAIRS: dict[str, BianchiPair] = {
    "alpha-betat": BianchiPair(("alpha",), ("betat",), 2, 1, HALF),
    "beta-K-sigmat": BianchiPair(("beta",), ("K", "sigmat"), 1, 1, Fraction(1)),
    "Ktilde-sigmat-betab": BianchiPair(("Ktilde", "sigmat"), ("betab",), 1, 2,
                                       Fraction(3, 2)),
    "betab-alphab": BianchiPair(("betab",), ("alphab",), 2, 2, Fraction(2)),
    "betaF-rhoF-sigmaF": BianchiPair(("beta_F",), ("rho_F", "sigma_F"), 1, 1,
                                     HALF),
    "rhoF-sigmaF-betabF": BianchiPair(("rho_F", "sigma_F"), ("betab_F",), 1, 2,
                                      Fraction(1)),
    "Psi4-Psislash": BianchiPair(("Psi4",), ("Psislash",), 1, 1, HALF),
    "Psislash-Psit3": BianchiPair(("Psislash",), ("Psit3",), 1, 2, Fraction(1)),
}


@dataclass
class PairResult:
    pair_id: str
    passed: bool
    s2_psi1: Fraction
    s2_psi2: Fraction
    coeff: Fraction
    expected_coeff: Fraction
    details: str


def check_bianchi_pair(pair_id: str,
                       registry: Registry | None = None) -> PairResult:
    """Structural check: s2(psi2) = s2(psi1) + 1/2 and the incoming-expansion
    coefficient on the psi1 transport equals 1/2 + s2(psi1)."""
    registry = registry or default_registry()
    if pair_id not in BIANCHI_PAIRS:
        raise KeyError(f"unknown pair {pair_id!r}; known: "
                       f"{sorted(BIANCHI_PAIRS)}")
    pair = BIANCHI_PAIRS[pair_id]

    def common_s2(names):
        vals = {registry.signature(n) for n in names}
        if len(vals) != 1:
            raise ValueError(f"pair members {names} carry different weights")
        return vals.pop()

    problems = []
    try:
        s1 = common_s2(pair.psi1)
        s2 = common_s2(pair.psi2)
    except ValueError as exc:
        return PairResult(pair_id=pair_id, passed=False, s2_psi1=Fraction(0),
                          s2_psi2=Fraction(0), coeff=pair.coeff,
                          expected_coeff=Fraction(0), details=str(exc))
    if s2 != s1 + HALF:
        problems.append(f"s2 step {s2 - s1} != 1/2")
    expected = HALF + s1
    if pair.coeff != expected:
        problems.append(f"coefficient {pair.coeff} != 1/2 + s2(psi1) = {expected}")
    return PairResult(pair_id=pair_id, passed=not problems, s2_psi1=s1,
                      s2_psi2=s2, coeff=pair.coeff, expected_coeff=expected,
                      details="; ".join(problems) or "ok")


def expected_bounds(symbol: str, registry: Registry | None = None) -> tuple[float, float]:
    """Expected sup-norm exponents (a power, |u| power) for a symbol.

    Tabulated values where the decay table lists them; otherwise the
    scale-invariant default (s2, -(2 s2 + 1)).
    """
    registry = registry or default_registry()
    info = registry.info(symbol)
    if info.is_family:
        raise ValueError(f"{symbol} is a schematic family")
    if info.bound is not None:
        return (float(info.bound[0]), float(info.bound[1]))
    return (float(info.s2), float(-(2 * info.s2 + 1)))


# ---------------------------------------------------------------------------
# corpus and reports
# ---------------------------------------------------------------------------


def load_corpus(path=None) -> list[EquationAST]:
    """Parse the equation corpus (packaged fixture by default)."""
    if path is None:
        text = resources.files("dnullsim.data").joinpath(
            "equations.txt").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(parse_equation(line))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return out


def lint_corpus(registry: Registry | None = None,
                corpus: list[EquationAST] | None = None) -> list[EquationResult]:
    registry = registry or default_registry()
    corpus = corpus if corpus is not None else load_corpus()
    return [check_homogeneous(eq, registry) for eq in corpus]


def rule_consistency(registry: Registry | None = None) -> list[str]:
    """Symbols with declared frame indices must satisfy s2 = na/2 + n3 - 1."""
    registry = registry or default_registry()
    bad = []
    for name in registry.names():
        info = registry.info(name)
        if info.frame_counts is None or info.is_family:
            continue
        na, n3 = info.frame_counts
        want = Fraction(na, 2) + n3 - 1
        if info.s2 != want:
            bad.append(f"{name}: s2 {info.s2} != {want} from indices ({na},{n3})")
    return bad


def mutation_sweep(registry: Registry | None = None,
                   corpus: list[EquationAST] | None = None) -> dict:
    """Shift each table entry by +-1/2 and count equations that break."""
    registry = registry or default_registry()
    corpus = corpus if corpus is not None else load_corpus()
    entries = {}
    for entry, names in TABLE_ENTRIES.items():
        per_delta = {}
        for delta in (HALF, -HALF):
            mutated = registry
            for n in names:
                mutated = mutated.mutated(n, delta)
            fails = sum(1 for r in lint_corpus(mutated, corpus) if not r.passed)
            fails += sum(1 for pid in BIANCHI_PAIRS
                         if not check_bianchi_pair(pid, mutated).passed)
            per_delta["+1/2" if delta > 0 else "-1/2"] = fails
        entries[entry] = per_delta
    all_detected = all(v > 0 for per in entries.values() for v in per.values())
    return {"entries": entries, "all_detected": all_detected}


def lint_report(registry: Registry | None = None, corpus_path=None,
                with_mutations: bool = True) -> dict:
    """Full linter report: homogeneity table, pair checks, rule and mutations."""
    registry = registry or default_registry()
    corpus = load_corpus(corpus_path)
    eq_results = lint_corpus(registry, corpus)
    pair_results = {pid: check_bianchi_pair(pid, registry)
                    for pid in BIANCHI_PAIRS}
    report = {
        "equations": [
            {"label": r.label, "category": r.category,
             "s2": float(r.target), "pass": r.passed,
             "mismatches": [{"side": m.side, "term": m.term,
                             "expected": float(m.expected),
                             "got": None if m.lo is None else
                             [float(m.lo), float(m.hi)]}
                            for m in r.mismatches]}
            for r in eq_results],
        "n_equations": len(eq_results),
        "n_failed": sum(1 for r in eq_results if not r.passed),
        "pairs": {pid: {"pass": p.passed, "s2_psi1": float(p.s2_psi1),
                        "s2_psi2": float(p.s2_psi2),
                        "coeff": float(p.coeff), "details": p.details}
                  for pid, p in pair_results.items()},
        "rule_violations": rule_consistency(registry),
        "notes": [
            "table weights for the renormalized pair (vkp, vkpb) rest on the "
            "transport-defined duals omegad/omegabd rather than on frame "
            "indices; recorded as assigned, not derived",
        ],
    }
    if with_mutations:
        report["mutations"] = mutation_sweep(registry, corpus)
    report["all_pass"] = (report["n_failed"] == 0
                          and all(p["pass"] for p in report["pairs"].values())
                          and not report["rule_violations"])
    return report
