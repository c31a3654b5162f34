"""
Instance families: the binary counter with an exponential run, the small named instances used throughout the tests,
and seeded random switch graphs for differential testing.
"""

from dataclasses import dataclass

from mip_arrival.constants import Defaults, Families
from mip_arrival.switch_graph import Instance


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Attributes
    ----------
    family : str
        One of Families.
    n : int
        Bit width for Families.COUNTER, vertex count for Families.RANDOM; ignored by the fixed instances.
    seed : int
        Seed of Families.RANDOM.
    """
    family: str
    n: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.family not in Families:
            raise ValueError(f"unknown family {self.family!r}, expected one of {', '.join(Families)}")
        if self.family == Families.COUNTER and not 1 <= self.n <= 62:
            raise ValueError(f"counter width must be between 1 and 62, got {self.n}")
        if self.family == Families.RANDOM and self.n < 2:
            raise ValueError(f"random instances need at least 2 vertices, got {self.n}")


def gen_counter(n: int) -> Instance:
    """
    Binary counter on n + 2 vertices o, v1..vn, d.

    The parities of v1..vn hold a counter. Each injection o -> v1 increments it: v_i flips from 0 to 1 and returns to
    o, or flips from 1 to 0 and carries to v_{i+1}. The carry out of vn reaches d, so the run counts from 0 to
    2^n - 1, resets the counter to 0 and terminates after 3 * 2^n - 2 steps.
    """
    if not 1 <= n <= 62:
        raise ValueError(f"counter width must be between 1 and 62, got {n}")
    bits = [f"v{i}" for i in range(1, n + 1)]
    even = {'o': 'v1', 'd': 'd'}
    odd = {'o': 'v1', 'd': 'd'}
    for i, v in enumerate(bits):
        even[v] = 'o'
        odd[v] = bits[i + 1] if i + 1 < n else 'd'
    return Instance(vertices=['o'] + bits + ['d'], even=even, odd=odd, origin='o', destination='d')


def gen_zigzag() -> Instance:
    """o -> w; w: even u, odd d; u -> w. Admits the run profile and a fake switching flow."""
    return Instance(vertices=['o', 'w', 'u', 'd'],
                    even={'o': 'w', 'w': 'u', 'u': 'w', 'd': 'd'},
                    odd={'o': 'w', 'w': 'd', 'u': 'w', 'd': 'd'},
                    origin='o', destination='d')


def gen_trap() -> Instance:
    """o -> t, t loops, and nothing enters d."""
    return Instance(vertices=['o', 't', 'd'],
                    even={'o': 't', 't': 't', 'd': 'd'},
                    odd={'o': 't', 't': 't', 'd': 'd'},
                    origin='o', destination='d')


def gen_direct() -> Instance:
    """The smallest legal instance, o -> d."""
    return Instance(vertices=['o', 'd'], even={'o': 'd', 'd': 'd'}, odd={'o': 'd', 'd': 'd'},
                    origin='o', destination='d')


def gen_gap() -> Instance:
    """
    o: even a, odd d; a: even b, odd t; b: even a, odd d; t and d loop.

    The run o -> a -> b -> a -> t enters the loop at t and cycles, so no switching flow exists; the real-valued
    relaxation is feasible, e.g. x(o,a) = x(o,d) = x(b,a) = x(b,d) = 1/2, x(a,b) = 1 and zero elsewhere.
    """
    return Instance(vertices=['o', 'a', 'b', 't', 'd'],
                    even={'o': 'a', 'a': 'b', 'b': 'a', 't': 't', 'd': 'd'},
                    odd={'o': 'd', 'a': 't', 'b': 'd', 't': 't', 'd': 'd'},
                    origin='o', destination='d')


class _Lcg:
    """s <- (a * s + c) mod 2^64; a draw advances once and returns (s >> 33) mod bound."""

    def __init__(self, seed: int) -> None:
        self.state = seed % 2 ** 64

    def draw(self, bound: int) -> int:
        self.state = (Defaults.LCG_MULTIPLIER * self.state + Defaults.LCG_INCREMENT) % 2 ** 64
        return (self.state >> 33) % bound


def gen_random(n: int, seed: int) -> Instance:
    """
    Random switch graph on x0..x_{n-1}, origin x0, destination x_{n-1}.

    Successors are drawn with the 64-bit linear congruential generator
    s <- (6364136223846793005 * s + 1442695040888963407) mod 2^64, s0 = seed mod 2^64, each draw returning
    (s >> 33) mod n; the draws go vertex by vertex, even successor first.
    """
    if n < 2:
        raise ValueError(f"random instances need at least 2 vertices, got {n}")
    lcg = _Lcg(seed)
    vertices = [f"x{i}" for i in range(n)]
    even, odd = {}, {}
    for v in vertices:
        even[v] = vertices[lcg.draw(n)]
        odd[v] = vertices[lcg.draw(n)]
    return Instance(vertices=vertices, even=even, odd=odd, origin=vertices[0], destination=vertices[-1])


def generate(spec: GeneratorSpec) -> Instance:
    if spec.family == Families.COUNTER:
        return gen_counter(spec.n)
    if spec.family == Families.RANDOM:
        return gen_random(spec.n, spec.seed)
    fixed = {
        Families.ZIGZAG: gen_zigzag,
        Families.TRAP: gen_trap,
        Families.DIRECT: gen_direct,
        Families.GAP: gen_gap,
    }
    return fixed[spec.family]()
