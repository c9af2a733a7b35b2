"""
Deterministic Sampling
Portable 64-bit linear congruential generator and grid builder for chart boxes
"""

from typing import Iterator, List, Sequence, Tuple

import numpy as np

MASK64 = (1 << 64) - 1
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
BOUNDARY_MARGIN = 0.01
STREAM_STRIDE = 0x9E3779B97F4A7C15


class LCG64:
    """state <- state * a + c (mod 2^64); uniforms use the top 53 bits"""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    @classmethod
    def stream(cls, seed: int, index: int) -> 'LCG64':
        """Independent generator for the index-th sample point"""
        return cls(seed + index * STREAM_STRIDE)

    def next_u64(self) -> int:
        self.state = (self.state * LCG_MULTIPLIER + LCG_INCREMENT) & MASK64
        return self.state

    def uniform(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def uniform_range(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def normal_like(self) -> float:
        """Symmetric draw in [-1, 1); used for random coefficients"""
        return 2.0 * self.uniform() - 1.0

    def vector(self, size: int) -> np.ndarray:
        return np.array([self.normal_like() for _ in range(size)])


def shrink_box(domain: Sequence[Tuple[float, float]],
               margin: float = BOUNDARY_MARGIN) -> List[Tuple[float, float]]:
    """Pull every interval in by a fraction of its width at both ends"""
    box = []
    for lo, hi in domain:
        pad = margin * (hi - lo)
        box.append((lo + pad, hi - pad))
    return box


def random_points(domain: Sequence[Tuple[float, float]], count: int,
                  seed: int) -> List[Tuple[float, ...]]:
    rng = LCG64(seed)
    box = shrink_box(domain)
    return [tuple(rng.uniform_range(lo, hi) for lo, hi in box) for _ in range(count)]


def parse_grid(spec: str, m: int) -> Tuple[int, ...]:
    """'32x32' -> (32, 32); the number of factors must match the chart dimension"""
    try:
        counts = tuple(int(part) for part in spec.lower().split('x'))
    except ValueError:
        raise ValueError(f"Invalid grid spec '{spec}'")
    if len(counts) != m or any(c < 1 for c in counts):
        raise ValueError(f"Grid spec '{spec}' does not match chart dimension {m}")
    return counts


def grid_points(domain: Sequence[Tuple[float, float]],
                counts: Sequence[int]) -> Iterator[Tuple[float, ...]]:
    """Evenly spaced points over the shrunk box, last axis varying fastest"""
    box = shrink_box(domain)
    axes = []
    for (lo, hi), count in zip(box, counts):
        if count == 1:
            axes.append([0.5 * (lo + hi)])
        else:
            axes.append([lo + (hi - lo) * i / (count - 1) for i in range(count)])
    for idx in np.ndindex(*counts):
        yield tuple(axes[k][i] for k, i in enumerate(idx))
