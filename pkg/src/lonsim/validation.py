"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .embedding import Footprint
from .exceptions import DimensionError, InvalidDimensionError
from .lon import LON, VARIANTS
from .problems import BitString, ProblemInstance


def check_instance(instance) -> ProblemInstance:
    """Return ``instance`` if it is a :class:`ProblemInstance`, else raise ``TypeError``."""
    if not isinstance(instance, ProblemInstance):
        raise TypeError(f"expected ProblemInstance, got {type(instance).__name__}")
    return instance


def check_instances(instances) -> list[ProblemInstance]:
    """Accept one instance or an iterable of them."""
    if isinstance(instances, ProblemInstance):
        return [instances]
    out = [check_instance(i) for i in instances]
    if not out:
        raise ValueError("no instances given")
    return out


def check_lon(lon, variant: str | None = None, min_nodes: int = 0) -> LON:
    """Check type, variant and size of a LON.

    Parameters
    ----------
    lon : LON
    variant : str, optional
        Required variant, one of ``RAW``, ``MONOTONIC``, ``CMLON``.
    min_nodes : int, default=0
    """
    if not isinstance(lon, LON):
        raise TypeError(f"expected LON, got {type(lon).__name__}")
    if variant is not None:
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        if lon.variant != variant:
            raise ValueError(f"expected a {variant} LON, got {lon.variant}")
    if lon.n_nodes < min_nodes:
        raise ValueError(f"LON has {lon.n_nodes} nodes, need at least {min_nodes}")
    return lon


def check_lons(lons, min_nodes: int = 0) -> list[LON]:
    if isinstance(lons, LON):
        return [check_lon(lons, min_nodes=min_nodes)]
    out = [check_lon(l, min_nodes=min_nodes) for l in lons]
    if not out:
        raise ValueError("no LONs given")
    return out


def check_bits(x, n: int) -> BitString:
    """Coerce a ``BitString``, ``0/1`` string or bit sequence of length ``n``."""
    if isinstance(x, str):
        x = BitString.from_str(x)
    elif not isinstance(x, BitString):
        x = BitString.from_bits(x)
    if x.n != n:
        raise DimensionError(f"solution has {x.n} bits, instance has {n}")
    return x


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_dimension(n) -> int:
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def check_footprints(footprints) -> np.ndarray:
    """Stack footprints (or raw vectors) into a finite 2-D float array."""
    rows = [f.vector if isinstance(f, Footprint) else np.asarray(f, dtype=np.float64) for f in footprints]
    if not rows:
        raise ValueError("no footprints given")
    dims = {r.shape for r in rows}
    if len(dims) != 1 or len(next(iter(dims))) != 1:
        raise DimensionError(f"footprints must be 1-D and of equal length, got shapes {sorted(dims)}")
    mat = np.vstack(rows)
    if not np.all(np.isfinite(mat)):
        raise ValueError("footprints contain non-finite values")
    return mat
