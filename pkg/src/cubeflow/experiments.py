"""Ready-made configurations on torus grids for comparing flowed products with cup products."""
from __future__ import annotations

from dataclasses import dataclass

from .builders import global_flat_hyperplane, global_polyline
from .complex import TorusGrid, torus_grid
from .geometric import GeoCochain, intersect_cochain


@dataclass
class Configuration:
    name: str
    grid: TorusGrid
    W: GeoCochain
    V: GeoCochain
    focus: int | None = None     # top cube of interest, if any

    @property
    def complex(self):
        return self.grid.complex


def edge_between(grid: TorusGrid, a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """The grid edge joining two adjacent grid vertices."""
    e = grid.complex.cube_with_vertices([grid.vertex_at[a], grid.vertex_at[b]])
    if e is None:
        raise ValueError(f"{a} and {b} are not joined by an edge")
    return e


def _oriented(grid: TorusGrid, points, edge: int) -> GeoCochain:
    """The polyline co-oriented so that it crosses ``edge`` positively."""
    W = global_polyline(grid, points, 1)
    value = intersect_cochain(W)[edge]
    if value not in (1, -1):
        raise ValueError(f"polyline crosses edge {edge} with total sign {value}")
    return W if value == 1 else global_polyline(grid, points, -1)


def figure1_configuration() -> Configuration:
    """The bent arc W cutting the lower-left corner and the horizontal segment V.

    Both live around the square with lower corner (1, 1) of the 3x3 torus grid.
    W runs from (0.3, 0) through (0.15, 0.15) to (0, 0.3) in that square's
    coordinates and V along height 0.6; each is extended slightly into the
    neighbouring squares so its endpoints avoid the grid walls.  W crosses the
    bottom edge positively and V the right edge positively.
    """
    grid = torus_grid((3, 3))
    W_pts = [(1.4, 0.85), (1.3, 1.0), (1.15, 1.15), (1.0, 1.3), (0.85, 1.4)]
    V_pts = [(0.8, 1.6), (2.2, 1.6)]
    W = _oriented(grid, W_pts, edge_between(grid, (1, 1), (2, 1)))
    V = _oriented(grid, V_pts, edge_between(grid, (2, 1), (2, 2)))
    return Configuration("figure1", grid, W, V, grid.top_at[(1, 1)])


def cycle_configuration() -> Configuration:
    """A vertical and a horizontal closed curve on the 3x3 torus, meeting once."""
    grid = torus_grid((3, 3))
    W = global_polyline(grid, [(1.5, 0.5), (1.5, 3.5)], 1)
    V = global_polyline(grid, [(0.5, 1.5), (3.5, 1.5)], 1)
    return Configuration("cycles", grid, W, V, grid.top_at[(1, 1)])


def torus3_configuration() -> Configuration:
    """A horizontal plane and a closed diagonal line in the 3x3x3 torus."""
    grid = torus_grid((3, 3, 3))
    W = global_flat_hyperplane(grid, 3, 1.4, 1)
    p = (0.2, 0.5, 0.75)
    V = global_polyline(grid, [p, tuple(c + 3.0 for c in p)], 1)
    return Configuration("torus3", grid, W, V)


CONFIGURATIONS = {
    "figure1": figure1_configuration,
    "cycles": cycle_configuration,
    "torus3": torus3_configuration,
}
