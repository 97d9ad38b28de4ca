"""The 2D grid of candidate architectures.

The x-axis is the initial hidden layer size (IHLS), the y-axis the division
factor (DF). A grid point maps to a layer-size chain by repeated floor
division, e.g. ``(ihls=10, df=2)`` gives hidden layers ``[10, 5, 2, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator


@dataclass(frozen=True, order=True)
class GridPoint:
    ihls: int
    df: int

    def __post_init__(self):
        if self.ihls < 1 or self.df < 1:
            raise ValueError(f"ihls and df must be >= 1, got ({self.ihls}, {self.df})")

    def as_dict(self) -> dict:
        return {"ihls": self.ihls, "df": self.df}


@dataclass(frozen=True)
class Architecture:
    input_dim: int
    hidden_sizes: tuple[int, ...]
    origin: GridPoint
    output_dim: int = 1

    @property
    def layer_sizes(self) -> list[int]:
        return [self.input_dim, *self.hidden_sizes, self.output_dim]

    def as_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "hidden_sizes": list(self.hidden_sizes),
            "output_dim": self.output_dim,
            "origin": self.origin.as_dict(),
        }


def derive_architecture(point: GridPoint, input_dim: int) -> Architecture:
    """Expand a grid point into its hidden-layer chain.

    For ``df >= 2`` the chain keeps dividing (floor) by ``df`` and stops once
    the quotient hits 0, so a trailing 1 is kept. ``df == 1`` would never
    terminate and is read as a single hidden layer of ``ihls`` units.
    """
    if point.ihls < 1 or point.df < 1:
        raise ValueError(f"invalid grid point {point}")
    if input_dim < 1:
        raise ValueError(f"input_dim must be >= 1, got {input_dim}")
    sizes = [point.ihls]
    if point.df >= 2:
        nxt = point.ihls // point.df
        while nxt >= 1:
            sizes.append(nxt)
            nxt //= point.df
    return Architecture(input_dim=input_dim, hidden_sizes=tuple(sizes), origin=point)


@dataclass(frozen=True)
class SearchSpace:
    """Rectangular grid; rows are DF values, columns are IHLS values.

    Cell ``(i, j)`` with ``i`` indexing ``ihls_values`` and ``j`` indexing
    ``df_values`` is the point ``GridPoint(ihls_values[i], df_values[j])``.
    """

    ihls_values: tuple[int, ...]
    df_values: tuple[int, ...]
    input_dim: int
    output_dim: int = 1
    _ihls_pos: dict = field(init=False, repr=False, compare=False)
    _df_pos: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ihls_values", tuple(int(v) for v in self.ihls_values))
        object.__setattr__(self, "df_values", tuple(int(v) for v in self.df_values))
        for name, axis in (("ihls_values", self.ihls_values), ("df_values", self.df_values)):
            if not axis:
                raise ValueError(f"{name} must be non-empty")
            if axis[0] < 1:
                raise ValueError(f"{name} must be positive")
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if self.output_dim != 1:
            raise ValueError("only binary classification (output_dim == 1) is supported")
        object.__setattr__(self, "_ihls_pos", {v: i for i, v in enumerate(self.ihls_values)})
        object.__setattr__(self, "_df_pos", {v: j for j, v in enumerate(self.df_values)})

    @property
    def n_ihls(self) -> int:
        return len(self.ihls_values)

    @property
    def n_df(self) -> int:
        return len(self.df_values)

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols) == (number of DF values, number of IHLS values)."""
        return self.n_df, self.n_ihls

    def __len__(self) -> int:
        return self.n_ihls * self.n_df

    def __contains__(self, point) -> bool:
        return (
            isinstance(point, GridPoint)
            and point.ihls in self._ihls_pos
            and point.df in self._df_pos
        )

    def point(self, i: int, j: int) -> GridPoint:
        """Point at IHLS index ``i`` and DF index ``j``."""
        if not (0 <= i < self.n_ihls and 0 <= j < self.n_df):
            raise IndexError(f"cell ({i}, {j}) outside {self.n_ihls}x{self.n_df} grid")
        return GridPoint(self.ihls_values[i], self.df_values[j])

    def index(self, point: GridPoint) -> tuple[int, int]:
        """Inverse of :meth:`point`."""
        try:
            return self._ihls_pos[point.ihls], self._df_pos[point.df]
        except KeyError:
            raise ValueError(f"{point} is not in the search space") from None

    def cells(self) -> Iterator[GridPoint]:
        """All points, row-major over (df, ihls) ascending."""
        for df in self.df_values:
            for ihls in self.ihls_values:
                yield GridPoint(ihls, df)

    def architecture(self, point: GridPoint) -> Architecture:
        if point not in self:
            raise ValueError(f"{point} is not in the search space")
        return derive_architecture(point, self.input_dim)

    def as_dict(self) -> dict:
        return {
            "ihls_values": list(self.ihls_values),
            "df_values": list(self.df_values),
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
        }


def build_space(max_ihls: int, df_exponent_max: int, include_df_one: bool = False,
                input_dim: int = 11) -> SearchSpace:
    """IHLS in ``1..max_ihls``; DF in ``2, 4, ..., 2**df_exponent_max`` (plus 1 if asked)."""
    if max_ihls < 1:
        raise ValueError("max_ihls must be >= 1")
    if df_exponent_max < 0:
        raise ValueError("df_exponent_max must be >= 0")
    dfs = [2 ** e for e in range(1, df_exponent_max + 1)]
    if include_df_one:
        dfs.insert(0, 1)
    if not dfs:
        raise ValueError("empty DF axis: raise df_exponent_max or set include_df_one")
    return SearchSpace(tuple(range(1, max_ihls + 1)), tuple(dfs), input_dim)
