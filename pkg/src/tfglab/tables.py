"""Growth tables: (n, value, exact) rows with CSV/JSON serialization.

CSV header is "n,value,exact"; JSON carries the same fields plus the table
meaning.  Integers stay integers; floats print with 12 significant digits.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

from .errors import PreconditionError

MEANINGS = (
    "complexity",
    "recurrence",
    "entropy-estimate",
    "quotient-degree",
    "lower-bound-exponent",
)


def format_number(v):
    if isinstance(v, bool):
        raise PreconditionError("growth values are numbers")
    if isinstance(v, int):
        return str(v)
    return format(float(v), ".12g")


@dataclass
class GrowthTable:
    meaning: str
    rows: list = field(default_factory=list)   # (n, value, exact) tuples

    def __post_init__(self):
        if self.meaning not in MEANINGS:
            raise PreconditionError(f"unknown table meaning {self.meaning!r}")

    def add(self, n: int, value, exact: bool = True):
        if self.rows and n <= self.rows[-1][0]:
            raise PreconditionError("row indices must be strictly increasing")
        self.rows.append((int(n), value, bool(exact)))

    def validate(self):
        """Check the structural invariants for this table's meaning."""
        ns = [r[0] for r in self.rows]
        vals = {n: v for n, v, _ in self.rows}
        if self.meaning == "complexity":
            for n in ns:
                for m in ns:
                    if n + m in vals and vals[n + m] > vals[n] * vals[m]:
                        raise PreconditionError(
                            f"complexity not submultiplicative at ({n}, {m})")
        if self.meaning == "recurrence":
            prev = None
            for n, v, _ in self.rows:
                if prev is not None and v < prev:
                    raise PreconditionError(f"recurrence decreasing at n={n}")
                prev = v
        return True

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("n,value,exact\n")
        for n, v, exact in self.rows:
            out.write(f"{n},{format_number(v)},{'true' if exact else 'false'}\n")
        return out.getvalue()

    def to_json(self) -> str:
        payload = {
            "meaning": self.meaning,
            "rows": [{"n": n, "value": v if isinstance(v, int) else float(format_number(v)),
                      "exact": exact} for n, v, exact in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GrowthTable":
        data = json.loads(text)
        table = cls(data["meaning"])
        for row in data["rows"]:
            table.add(row["n"], row["value"], row["exact"])
        return table
