"""Problem instances: interaction graphs, lattice presets, edge-list files.

Sites are 1-based. Edges are stored as ordered pairs (i, j) with i < j.
Presets follow the shared naming used by the CLI: "2x1", "line:n",
"grid:WxH" (open boundaries, row-major site numbering).
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class HubbardSpec:
    """Hubbard instance: interaction graph plus t, U and optional site weights."""

    n: int
    edges: tuple[tuple[int, int], ...]
    t: float = 1.0
    U: float = 0.0
    weights: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one site")
        seen = set()
        for i, j in self.edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge ({i},{j}) references sites outside 1..{self.n}")
            if i == j:
                raise ValueError(f"self-loop at site {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        if self.weights and len(self.weights) != self.n:
            raise ValueError("weights must have one entry per site")
        object.__setattr__(
            self, "edges", tuple(sorted((min(i, j), max(i, j)) for i, j in self.edges))
        )

    @property
    def site_weights(self) -> tuple[float, ...]:
        return self.weights if self.weights else (0.0,) * self.n


def grid_edges(width: int, height: int) -> list[tuple[int, int]]:
    edges = []
    for r in range(height):
        for c in range(width):
            s = r * width + c + 1
            if c + 1 < width:
                edges.append((s, s + 1))
            if r + 1 < height:
                edges.append((s, s + width))
    return edges


def preset(name: str, t: float = 1.0, U: float = 0.0, weights=()) -> HubbardSpec:
    name = name.strip().lower()
    if name == "2x1":
        return HubbardSpec(2, ((1, 2),), t, U, tuple(weights))
    if name.startswith("line:"):
        n = int(name.split(":", 1)[1])
        return HubbardSpec(n, tuple((i, i + 1) for i in range(1, n)), t, U, tuple(weights))
    if name.startswith("grid:"):
        w, h = (int(x) for x in name.split(":", 1)[1].split("x"))
        return HubbardSpec(w * h, tuple(grid_edges(w, h)), t, U, tuple(weights))
    raise ValueError(f"unknown lattice preset {name!r}")


def load_edge_list(path: str, t: float = 1.0, U: float = 0.0, weights=()) -> HubbardSpec:
    """Read a text edge list: one "i j" pair per line, # comments allowed."""
    edges = []
    n = 0
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"malformed edge line {line!r}")
            i, j = int(parts[0]), int(parts[1])
            edges.append((i, j))
            n = max(n, i, j)
    return HubbardSpec(n, tuple(edges), t, U, tuple(weights))
