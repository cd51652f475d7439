"""Counter-based Gaussian noise keyed by (seed, agent, step).

Each standard normal is a pure function of its key, so simulations are
reproducible under any agent-parallel execution order and independent of
population size. The construction hashes the key with cascaded SplitMix64
finalizers and feeds two derived 53-bit uniforms through Box-Muller.
"""

from __future__ import annotations

import numpy as np

__all__ = ["counter_normals", "child_seed"]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_AGENT_TAG = np.uint64(0xA5A5A5A5A5A5A5A5)
_STEP_TAG = np.uint64(0xC3C3C3C3C3C3C3C3)


def _mix(z) -> np.ndarray:
    # uint64 arithmetic is modular by construction
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def _unit(word: np.ndarray) -> np.ndarray:
    # strictly inside (0, 1) so log() below stays finite
    return ((word >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def counter_normals(seed: int, agent_ids, step_ids) -> np.ndarray:
    """Standard normal matrix Z[step, agent] keyed by (seed, agent, step)."""
    agents = np.asarray(agent_ids, dtype=np.uint64)
    steps = np.asarray(step_ids, dtype=np.uint64)
    with np.errstate(over="ignore"):
        base = _mix(int(seed) & 0xFFFFFFFFFFFFFFFF)
        ha = _mix(base ^ (agents * _GOLDEN) ^ _AGENT_TAG)[None, :]
        h = _mix(_mix(ha ^ (steps[:, None] * _MIX1) ^ _STEP_TAG))
    u1 = _unit(h)
    u2 = _unit(_mix(h ^ _GOLDEN))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def child_seed(seed: int, index: int) -> int:
    """Derive an independent 64-bit seed, e.g. one per Monte-Carlo path."""
    with np.errstate(over="ignore"):
        word = _mix(_mix(int(seed) & 0xFFFFFFFFFFFFFFFF) ^ np.uint64(index))
    return int(word)
