"""Sparse real polynomials in ``n`` variables."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RealPoly"]


@dataclass(frozen=True)
class RealPoly:
    """``p(x) = sum_alpha coeff_alpha x**alpha`` stored as a dict of multi-indices.

    Zero coefficients are dropped on construction, so ``support`` is exactly
    the set of indices with ``p_alpha != 0``.
    """

    n: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a polynomial needs at least one variable")
        clean = {}
        for alpha, c in dict(self.terms).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n or min(alpha) < 0:
                raise ValueError(f"bad multi-index {alpha} for n={self.n}")
            if alpha in clean:
                raise ValueError(f"duplicate multi-index {alpha}")
            c = float(c)
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient at {alpha}")
            if c != 0.0:
                clean[alpha] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(cls, pairs, n=None):
        """Build from ``[(alpha, coeff), ...]``; duplicate indices are an error."""
        pairs = list(pairs)
        if n is None:
            n = len(pairs[0][0])
        terms = {}
        for alpha, c in pairs:
            alpha = tuple(alpha)
            if alpha in terms:
                raise ValueError(f"duplicate multi-index {alpha}")
            terms[alpha] = c
        return cls(n, terms)

    @property
    def support(self):
        return sorted(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, alpha) -> float:
        return self.terms.get(tuple(alpha), 0.0)

    def __call__(self, *xs):
        """Evaluate at broadcastable coordinate arrays ``x1, ..., xn``."""
        if len(xs) != self.n:
            raise ValueError(f"expected {self.n} coordinate arrays, got {len(xs)}")
        xs = [np.asarray(x, dtype=float) for x in xs]
        out = np.zeros(np.broadcast(*xs).shape)
        for alpha, c in self.terms.items():
            term = c
            for x, a in zip(xs, alpha):
                if a:
                    term = term * x**a
            out = out + term
        return out

    def to_json(self):
        return {
            "n": self.n,
            "terms": [{"alpha": list(a), "coeff": c} for a, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            n = int(obj["n"])
            pairs = [(tuple(t["alpha"]), float(t["coeff"])) for t in obj["terms"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polynomial JSON: missing field {exc}") from exc
        return cls.from_terms(pairs, n=n) if pairs else cls(n, {})
