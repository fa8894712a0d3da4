"""Named random substreams.

Every stream is a numpy ``Generator`` over the PCG64 bit generator, seeded by
``SeedSequence(entropy=seed, spawn_key=(crc32(name),))``. One user-facing seed
therefore forks into independent, reproducible streams such as ``"data"``,
``"init"`` and ``"shuffle"``.

Gaussian variates are produced with the Box-Muller transform applied to
``Generator.random`` uniforms rather than numpy's ziggurat sampler, so that
the stream is defined by PCG64 doubles plus two elementary formulas.
"""
import zlib

import numpy as np


def substream(seed: int, name: str) -> np.random.Generator:
    key = zlib.crc32(name.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(key,))
    return np.random.Generator(np.random.PCG64(ss))


def box_muller(u1, u2):
    """Two independent standard normals from two uniforms on ``[0, 1)``."""
    radius = np.sqrt(-2.0 * np.log1p(-np.asarray(u1)))
    angle = 2.0 * np.pi * np.asarray(u2)
    return radius * np.cos(angle), radius * np.sin(angle)
