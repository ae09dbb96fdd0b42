"""Valuations of Q and Q(i): places, the product formula, and the orbit/prime table."""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass

from .errors import FactorizationFailed, ZeroInput

MAX_INPUT = 2**62
_SMALL_PRIMES_LIMIT = 1 << 16


# ----------------------------------------------------------------- integers

def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i:: i] = bytearray(len(sieve[i * i:: i]))
    return [i for i, flag in enumerate(sieve) if flag]


_PRIMES = _small_primes(_SMALL_PRIMES_LIMIT)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _PRIMES[:12]:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor_integer(n: int) -> dict[int, int]:
    """Prime factorization of |n| >= 1: trial division, then Pollard-Brent on the cofactor."""
    n = abs(n)
    if n == 0:
        raise ZeroInput("cannot factor 0")
    out: dict[int, int] = {}
    for p in _PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m)
        stack += [d, m // d]
    return dict(sorted(out.items()))


# --------------------------------------------------------- Gaussian integers

@dataclass(frozen=True, order=True)
class GaussianInt:
    re: int
    im: int

    def __add__(self, o):
        return GaussianInt(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return GaussianInt(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        if isinstance(o, int):
            return GaussianInt(self.re * o, self.im * o)
        return GaussianInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __pow__(self, e: int):
        out = GaussianInt(1, 0)
        for _ in range(e):
            out = out * self
        return out

    def conj(self) -> GaussianInt:
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def divmod(self, o: GaussianInt) -> tuple[GaussianInt, GaussianInt]:
        """Division with remainder of smaller norm (nearest-integer quotient)."""
        num = self * o.conj()
        n = o.norm()
        q = GaussianInt(_round_div(num.re, n), _round_div(num.im, n))
        return q, self - q * o

    def exact_div(self, o: GaussianInt) -> GaussianInt | None:
        q, r = self.divmod(o)
        return q if r.is_zero() else None

    def normalized(self) -> GaussianInt:
        """The associate with re > 0 and im >= 0."""
        z = self
        for _ in range(4):
            if z.re > 0 and z.im >= 0:
                return z
            z = z * GaussianInt(0, 1)
        return z

    def __complex__(self):
        return complex(self.re, self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"


def _imag_str(b: int) -> str:
    if b == 1:
        return "i"
    if b == -1:
        return "-i"
    return f"{b}i"


def _round_div(a: int, n: int) -> int:
    return (2 * a + n) // (2 * n)


def gaussian_gcd(a: GaussianInt, b: GaussianInt) -> GaussianInt:
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, r
    return a


def _sqrt_minus_one(p: int) -> int:
    for c in range(2, p):
        x = pow(c, (p - 1) // 4, p)
        if x * x % p == p - 1:
            return x
    raise FactorizationFailed(f"no square root of -1 modulo {p}")


def gaussian_primes_over(p: int) -> list[GaussianInt]:
    """Normalized Gaussian primes dividing the rational prime p."""
    if p == 2:
        return [GaussianInt(1, 1)]
    if p % 4 == 3:
        return [GaussianInt(p, 0)]
    x = _sqrt_minus_one(p)
    pi = gaussian_gcd(GaussianInt(p, 0), GaussianInt(x, 1)).normalized()
    return sorted({pi, pi.conj().normalized()})


def factor_gaussian(z: GaussianInt) -> tuple[GaussianInt, dict[GaussianInt, int]]:
    """(unit, {prime: exponent}) with z = unit * prod prime^exponent, checked exactly."""
    if z.is_zero():
        raise ZeroInput("cannot factor 0")
    rest = z
    factors: dict[GaussianInt, int] = {}
    for p in factor_integer(z.norm()):
        for pi in gaussian_primes_over(p):
            while True:
                q = rest.exact_div(pi)
                if q is None:
                    break
                rest = q
                factors[pi] = factors.get(pi, 0) + 1
    if rest.norm() != 1:
        raise FactorizationFailed(f"cofactor {rest} of {z} is not a unit")
    check = rest
    for pi, e in factors.items():
        check = check * pi**e
    if check != z:
        raise FactorizationFailed(f"factorization of {z} does not reconstruct it")
    return rest, dict(sorted(factors.items(), key=lambda kv: (kv[0].norm(), kv[0])))


# ------------------------------------------------------------------- places

@dataclass(frozen=True)
class Place:
    """A place of Q or Q(i): kind is 'finite', 'gaussian', 'real' or 'complex'."""

    kind: str
    prime: int | GaussianInt | None = None

    @property
    def is_finite(self) -> bool:
        return self.kind in ("finite", "gaussian")

    def __str__(self) -> str:
        if self.kind == "real":
            return "inf (real)"
        if self.kind == "complex":
            return "inf (complex)"
        return f"({self.prime})"


@dataclass(frozen=True)
class PlaceValuation:
    place: Place
    ord: int
    log_norm: float
    log_abs: float


def _finite_place(place: Place, order: int, norm: int) -> PlaceValuation:
    log_norm = math.log(norm)
    return PlaceValuation(place, order, log_norm, -order * log_norm)


def _check_size(value: int, what: str) -> None:
    if value == 0:
        raise ZeroInput(f"{what} must be nonzero")
    if abs(value) > MAX_INPUT:
        raise ValueError(f"{what} exceeds 2^62")


def rational_places(num: int, den: int = 1) -> list[PlaceValuation]:
    """All places of Q where num/den has nonzero order, plus the real place."""
    _check_size(num, "numerator")
    _check_size(den, "denominator")
    g = math.gcd(num, den)
    num, den = num // g, den // g
    fn, fd = factor_integer(num), factor_integer(den)
    out = []
    for p in sorted(set(fn) | set(fd)):
        order = fn.get(p, 0) - fd.get(p, 0)
        out.append(_finite_place(Place("finite", p), order, p))
    log_abs = math.log(abs(num)) - math.log(abs(den))
    out.append(PlaceValuation(Place("real"), 0, 0.0, log_abs))
    return out


def gaussian_places(num: GaussianInt, den: GaussianInt = GaussianInt(1, 0)) -> list[PlaceValuation]:
    """All places of Q(i) where num/den has nonzero order, plus the complex place.

    The complex place uses |x|^2, the normalization under which the product
    formula holds.
    """
    for z, what in ((num, "numerator"), (den, "denominator")):
        if z.is_zero():
            raise ZeroInput(f"{what} must be nonzero")
        if z.norm() > MAX_INPUT:
            raise ValueError(f"{what} norm exceeds 2^62")
    _, fn = factor_gaussian(num)
    _, fd = factor_gaussian(den)
    orders: dict[GaussianInt, int] = {}
    for pi, e in fn.items():
        orders[pi] = orders.get(pi, 0) + e
    for pi, e in fd.items():
        orders[pi] = orders.get(pi, 0) - e
    out = []
    for pi in sorted(orders, key=lambda q: (q.norm(), q)):
        if orders[pi]:
            out.append(_finite_place(Place("gaussian", pi), orders[pi], pi.norm()))
    log_abs = math.log(num.norm()) - math.log(den.norm())
    out.append(PlaceValuation(Place("complex"), 0, 0.0, log_abs))
    return out


def product_formula_residual(places: list[PlaceValuation]) -> float:
    finite = sorted((v for v in places if v.place.is_finite), key=lambda v: v.log_norm)
    infinite = [v for v in places if not v.place.is_finite]
    total = 0.0
    for v in finite + infinite:
        total += v.log_abs
    return abs(total)


def ord_vector(places: list[PlaceValuation]) -> dict[Place, int]:
    return {v.place: v.ord for v in places if v.place.is_finite and v.ord}


# ------------------------------------------------------------------ parsing

_GAUSS_RE = re.compile(r"^\s*([+-]?\d+)?\s*(?:([+-])\s*(\d*)\s*i)?\s*$")
_PURE_IMAG_RE = re.compile(r"^\s*([+-]?)\s*(\d*)\s*i\s*$")


def parse_gaussian(text: str) -> GaussianInt:
    """Parse '3+4i', '-2i', 'i', '5' and similar."""
    m = _PURE_IMAG_RE.match(text)
    if m:
        b = int(m.group(2) or 1)
        return GaussianInt(0, -b if m.group(1) == "-" else b)
    m = _GAUSS_RE.match(text)
    if not m or (m.group(1) is None and m.group(2) is None):
        raise ValueError(f"not a Gaussian integer: {text!r}")
    a = int(m.group(1) or 0)
    b = 0
    if m.group(2):
        b = int(m.group(3) or 1)
        if m.group(2) == "-":
            b = -b
    return GaussianInt(a, b)


def parse_gaussian_fraction(text: str) -> tuple[GaussianInt, GaussianInt]:
    num, _, den = text.partition("/")
    return parse_gaussian(num), parse_gaussian(den) if den else GaussianInt(1, 0)


def parse_rational(text: str) -> tuple[int, int]:
    num, _, den = text.partition("/")
    return int(num), int(den) if den else 1


# ------------------------------------------------------------ analogy table

def analogy_table(report, f_places: list[PlaceValuation] | None = None) -> str:
    """Closed orbits (length, order) beside finite places (log norm, order).

    Rows are paired by position only; nothing is claimed about which orbit
    corresponds to which prime.
    """
    orbits = list(getattr(report, "orbits", []) or [])
    finite = [v for v in (f_places or []) if v.place.is_finite]
    left_head = f"{'orbit':<8}{'n':>4}{'l(orbit)':>14}{'ord':>6}"
    right_head = f"{'place':<14}{'log N':>12}{'ord':>6}"
    sides = [left_head]
    if f_places is not None:
        sides.append(right_head)
    lines = [" | ".join(sides), "-+-".join("-" * len(s) for s in sides)]
    for i in range(max(len(orbits), len(finite))):
        if i < len(orbits):
            o = orbits[i]
            left = f"{'g' + str(i + 1):<8}{o.period_n:>4}{o.length_l:>14.10f}{o.order:>+6d}"
        else:
            left = " " * len(left_head)
        row = [left]
        if f_places is not None:
            if i < len(finite):
                v = finite[i]
                row.append(f"{str(v.place):<14}{v.log_norm:>12.8f}{v.ord:>+6d}")
            else:
                row.append("")
        lines.append(" | ".join(row).rstrip())
    if orbits:
        lines.append(f"sum l*ord = {sum(o.length_l * o.order for o in orbits):.3e}")
    if f_places is not None:
        lines.append(f"sum log|f|_v = {product_formula_residual(f_places):.3e} (in absolute value)")
    return "\n".join(lines)
