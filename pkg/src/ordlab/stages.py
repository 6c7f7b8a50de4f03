"""Injections f and the true/false-at-stage bookkeeping built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from .errors import DomainExceeded, NotInjective, ParseError


@dataclass(frozen=True)
class InjectionSpec:
    """A finite injection, given explicitly or by a seeded generator.

    The seeded generator draws ``domain`` distinct values from
    ``[0, 2*domain)``, lists them in increasing order and then reverses
    consecutive blocks of random length ``1..max_block``.  Every block
    reversal makes all but its last entry false, so the false fraction is
    substantial while the true numbers stay plentiful.
    """

    kind: str
    values_: tuple[int, ...] = ()
    seed: int = 0
    domain: int = 0
    max_block: int = 4

    @classmethod
    def from_list(cls, values) -> "InjectionSpec":
        return cls(kind="list", values_=tuple(int(v) for v in values))

    @classmethod
    def seeded(cls, seed: int, domain: int, max_block: int = 4) -> "InjectionSpec":
        if domain < 0 or max_block < 1:
            raise ParseError("seeded injection needs domain >= 0 and max_block >= 1")
        return cls(kind="seeded", seed=int(seed), domain=int(domain), max_block=int(max_block))

    @classmethod
    def identity(cls, domain: int) -> "InjectionSpec":
        return cls.from_list(range(domain))

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "InjectionSpec":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ParseError("injection must be an object with a 'kind' key")
        if obj["kind"] == "list":
            vals = obj.get("values")
            if not isinstance(vals, list) or not all(isinstance(v, int) and v >= 0 for v in vals):
                raise ParseError("'values' must be a list of naturals")
            return cls.from_list(vals)
        if obj["kind"] == "seeded":
            try:
                return cls.seeded(int(obj["seed"]), int(obj["domain"]), int(obj.get("max_block", 4)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad seeded injection: {exc}") from None
        raise ParseError(f"unknown injection kind {obj['kind']!r}")

    def to_json(self) -> dict[str, Any]:
        if self.kind == "list":
            return {"kind": "list", "values": list(self.values_)}
        out = {"kind": "seeded", "seed": self.seed, "domain": self.domain}
        if self.max_block != 4:
            out["max_block"] = self.max_block
        return out

    @cached_property
    def values(self) -> np.ndarray:
        if self.kind == "list":
            vals = np.asarray(self.values_, dtype=np.int64)
        else:
            rng = np.random.default_rng(self.seed)
            vals = np.sort(rng.choice(2 * self.domain, size=self.domain, replace=False)).astype(np.int64)
            i = 0
            while i < self.domain:
                length = int(rng.integers(1, self.max_block + 1))
                vals[i:i + length] = vals[i:i + length][::-1].copy()
                i += length
        self._check_injective(vals)
        vals.setflags(write=False)
        return vals

    @staticmethod
    def _check_injective(vals: np.ndarray) -> None:
        seen: dict[int, int] = {}
        for i, v in enumerate(vals.tolist()):
            if v in seen:
                raise NotInjective(seen[v], i)
            seen[v] = i

    def __len__(self) -> int:
        return len(self.values_) if self.kind == "list" else self.domain

    def __call__(self, n: int) -> int:
        if not 0 <= n < len(self):
            raise DomainExceeded(f"f is defined on [0, {len(self)}), asked for {n}")
        return int(self.values[n])


@dataclass
class StageTruth:
    """``true_at(n, m)``: f(n) < f(k) for every n < k <= m."""

    f: InjectionSpec
    _matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def domain(self) -> int:
        return len(self.f)

    @property
    def matrix(self) -> np.ndarray:
        """Boolean D x D table; entry [n, m] is true_at(n, m) (vacuously true for m <= n)."""
        if self._matrix is None:
            vals = self.f.values
            d = len(vals)
            out = np.ones((d, d), dtype=bool)
            for n in range(d - 1):
                later_min = np.minimum.accumulate(vals[n + 1:])
                out[n, n + 1:] = vals[n] < later_min
            out.setflags(write=False)
            self._matrix = out
        return self._matrix

    def _check(self, *ids: int) -> None:
        for i in ids:
            if not 0 <= i < self.domain:
                raise DomainExceeded(f"stage truth needs f on [0, {i}] but the domain is {self.domain}")

    def true_at(self, n: int, m: int) -> bool:
        self._check(n, m)
        return bool(self.matrix[n, m])

    def is_true(self, n: int) -> bool:
        """Truth relative to the whole finite domain."""
        return self.true_at(n, self.domain - 1)

    def true_set(self, stage: int | None = None) -> list[int]:
        """T_s = {n < s : n true at stage s}; with no stage, the true numbers of the domain."""
        if stage is None:
            return [n for n in range(self.domain) if self.matrix[n, self.domain - 1]]
        self._check(stage)
        return [n for n in range(stage) if self.matrix[n, stage]]

    def false_witness(self, n: int, m: int | None = None) -> int | None:
        """Least k in (n, m] with f(k) < f(n), or None when n is true at stage m."""
        m = self.domain - 1 if m is None else m
        self._check(n, m)
        vals = self.f.values
        hits = np.flatnonzero(vals[n + 1:m + 1] < vals[n])
        return None if len(hits) == 0 else int(n + 1 + hits[0])

    def range_table(self, bound: int, stage: int | None = None) -> list[bool]:
        """Brute force: membership of each v < bound in f[[0, stage]]."""
        stage = self.domain - 1 if stage is None else stage
        present = set(self.f.values[: stage + 1].tolist())
        return [v in present for v in range(bound)]
