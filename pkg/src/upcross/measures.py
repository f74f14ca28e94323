"""Stationary measures on the binary Cantor space.

A measure is identified with its cylinder function ``p(x) = P([x])``.  The
built-in families evaluate it exactly as a Fraction; samplers draw finite
prefixes from a seeded numpy Generator.
"""
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

import numpy as np

from .errors import BadParameter, BadWeights, NoUniqueStationary, ParseError, TooDeep
from .rational import as_rational, format_rational

MAX_AXIOM_DEPTH = 16


def all_strings(length):
    """Binary strings of the given length in lexicographic order."""
    return ("".join(bits) for bits in product("01", repeat=length))


class Measure:
    """Cylinder function interface.

    Subclasses provide :meth:`prob`.  Exact families also override
    :meth:`cylinder_weights` and :meth:`sample`.
    """

    kind = "function"

    def prob(self, x):
        raise NotImplementedError

    def cylinder_weights(self, length):
        """``(numerators, denominator)`` with ``p(w) = numerators[i] / denominator``
        for the i-th string of ``length`` in lexicographic order."""
        probs = [as_rational(self.prob(w)) for w in all_strings(length)]
        den = lcm(*(p.denominator for p in probs))
        return [p.numerator * (den // p.denominator) for p in probs], den

    def sample(self, rng, length, size):
        raise NotImplementedError(f"{type(self).__name__} has no sampler")

    def to_spec(self):
        raise NotImplementedError(f"{type(self).__name__} has no file representation")


class FunctionMeasure(Measure):
    """Wraps an arbitrary cylinder function, e.g. to exercise the axiom checker."""

    def __init__(self, func, name="custom"):
        self.func = func
        self.name = name

    def prob(self, x):
        return as_rational(self.func(x))

    def __repr__(self):
        return f"FunctionMeasure({self.name})"


def _unit(value, name):
    value = as_rational(value)
    if not 0 <= value <= 1:
        raise BadParameter(f"{name} must lie in [0, 1], got {value}")
    return value


class Bernoulli(Measure):
    kind = "bernoulli"

    def __init__(self, q):
        self.q = _unit(q, "q")

    def prob(self, x):
        ones = x.count("1")
        return self.q**ones * (1 - self.q) ** (len(x) - ones)

    def cylinder_weights(self, length):
        a, b = self.q.numerator, self.q.denominator
        nums = [1]
        for _ in range(length):
            nums = [v * f for v in nums for f in (b - a, a)]
        return nums, b**length

    def sample(self, rng, length, size):
        return (rng.random((size, length)) < float(self.q)).astype(np.uint8)

    def to_spec(self):
        return {"kind": "bernoulli", "q": format_rational(self.q)}

    def __repr__(self):
        return f"Bernoulli({self.q})"


class Markov(Measure):
    """Two-state chain with ``p01 = P(1 | 0)`` and ``p11 = P(1 | 1)``.

    Started from its stationary vector unless ``initial`` is given; a chain
    started elsewhere is not shift-invariant, which is useful as a control.
    """

    kind = "markov"

    def __init__(self, p01, p11, initial=None):
        self.p01 = _unit(p01, "p01")
        self.p11 = _unit(p11, "p11")
        self.transition = (
            (1 - self.p01, self.p01),
            (1 - self.p11, self.p11),
        )
        if initial is None:
            flow = self.p01 + (1 - self.p11)
            if flow == 0:
                raise NoUniqueStationary(
                    "both states are absorbing; pass the initial distribution explicitly"
                )
            pi1 = self.p01 / flow
            self.initial = (1 - pi1, pi1)
        else:
            pi = tuple(_unit(v, "initial probability") for v in initial)
            if len(pi) != 2 or sum(pi) != 1:
                raise BadParameter(f"initial distribution must be two entries summing to 1, got {pi}")
            self.initial = pi
        self.explicit_initial = initial is not None

    def prob(self, x):
        if not x:
            return Fraction(1)
        p = self.initial[int(x[0])]
        for a, b in zip(x, x[1:]):
            p *= self.transition[int(a)][int(b)]
        return p

    def cylinder_weights(self, length):
        if length == 0:
            return [1], 1
        dpi = lcm(self.initial[0].denominator, self.initial[1].denominator)
        dt = lcm(*(t.denominator for row in self.transition for t in row))
        pi = [int(v * dpi) for v in self.initial]
        tr = [[int(t * dt) for t in row] for row in self.transition]
        nums = pi
        for _ in range(length - 1):
            # the last bit of entry i is i & 1 in lexicographic order
            nums = [v * tr[i & 1][c] for i, v in enumerate(nums) for c in (0, 1)]
        return nums, dpi * dt ** (length - 1)

    def sample(self, rng, length, size):
        out = np.zeros((size, length), dtype=np.uint8)
        if length == 0:
            return out
        out[:, 0] = rng.random(size) < float(self.initial[1])
        p01, p11 = float(self.p01), float(self.p11)
        for j in range(1, length):
            u = rng.random(size)
            out[:, j] = np.where(out[:, j - 1] == 1, u < p11, u < p01)
        return out

    def to_spec(self):
        spec = {"kind": "markov", "p01": format_rational(self.p01), "p11": format_rational(self.p11)}
        if self.explicit_initial:
            spec["initial"] = [format_rational(v) for v in self.initial]
        return spec

    def __repr__(self):
        extra = f", initial={self.initial}" if self.explicit_initial else ""
        return f"Markov({self.p01}, {self.p11}{extra})"


class Mixture(Measure):
    kind = "mixture"

    def __init__(self, weights, components):
        weights = tuple(as_rational(w) for w in weights)
        if len(weights) != len(components) or not weights:
            raise BadWeights("need one weight per component and at least one component")
        if any(w < 0 for w in weights) or sum(weights) != 1:
            raise BadWeights(f"weights must be nonnegative and sum to 1, got {weights}")
        self.weights = weights
        self.components = tuple(components)

    def prob(self, x):
        return sum((w * c.prob(x) for w, c in zip(self.weights, self.components)), Fraction(0))

    def cylinder_weights(self, length):
        parts = [c.cylinder_weights(length) for c in self.components]
        den = lcm(*(w.denominator * d for w, (_, d) in zip(self.weights, parts)))
        total = [0] * (2**length)
        for w, (nums, d) in zip(self.weights, parts):
            factor = w.numerator * (den // (w.denominator * d))
            if factor:
                total = [t + factor * v for t, v in zip(total, nums)]
        return total, den

    def sample(self, rng, length, size):
        probs = np.array([float(w) for w in self.weights])
        which = rng.choice(len(self.components), size=size, p=probs / probs.sum())
        out = np.zeros((size, length), dtype=np.uint8)
        for i, comp in enumerate(self.components):
            rows = np.flatnonzero(which == i)
            if rows.size:
                out[rows] = comp.sample(rng, length, rows.size)
        return out

    def to_spec(self):
        return {
            "kind": "mixture",
            "weights": [format_rational(w) for w in self.weights],
            "components": [c.to_spec() for c in self.components],
        }

    def __repr__(self):
        return f"Mixture({list(map(str, self.weights))}, {list(self.components)})"


def bernoulli(q):
    return Bernoulli(q)


def markov(p01, p11, initial=None):
    return Markov(p01, p11, initial)


def mixture(weights, components):
    return Mixture(weights, components)


@dataclass(frozen=True)
class AxiomReport:
    kolmogorov_ok: bool
    stationary_ok: bool
    worst_violation: Fraction


def check_axioms(measure, depth):
    """Exact check of ``p(empty) = 1``, ``p >= 0``, ``p(x) = p(x0) + p(x1)`` and
    ``p(x) = p(0x) + p(1x)`` for every string up to length ``depth``."""
    if depth > MAX_AXIOM_DEPTH:
        raise TooDeep(f"axiom check limited to depth {MAX_AXIOM_DEPTH}, got {depth}")
    p = {}
    for length in range(depth + 1):
        for w in all_strings(length):
            p[w] = as_rational(measure.prob(w))
    worst_k = abs(p[""] - 1)
    worst_s = Fraction(0)
    nonnegative = all(v >= 0 for v in p.values())
    for length in range(depth):
        for w in all_strings(length):
            worst_k = max(worst_k, abs(p[w] - p[w + "0"] - p[w + "1"]))
            worst_s = max(worst_s, abs(p[w] - p["0" + w] - p["1" + w]))
    return AxiomReport(
        kolmogorov_ok=nonnegative and worst_k == 0,
        stationary_ok=worst_s == 0,
        worst_violation=max(worst_k, worst_s),
    )


def measure_from_spec(spec):
    """Build a measure from its JSON form, e.g. ``{"kind": "bernoulli", "q": "3/10"}``."""
    try:
        kind = spec["kind"]
        if kind == "bernoulli":
            return Bernoulli(as_rational(spec["q"]))
        if kind == "markov":
            initial = spec.get("initial")
            if initial is not None:
                initial = [as_rational(v) for v in initial]
            return Markov(as_rational(spec["p01"]), as_rational(spec["p11"]), initial)
        if kind == "mixture":
            return Mixture(
                [as_rational(w) for w in spec["weights"]],
                [measure_from_spec(c) for c in spec["components"]],
            )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad measure spec {spec!r}: {exc}") from exc
    raise ParseError(f"unknown measure kind {spec.get('kind')!r}")


def load_measure(path):
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    return measure_from_spec(spec)
