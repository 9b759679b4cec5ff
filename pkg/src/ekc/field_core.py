"""Imaginary quadratic fields K = Q(sqrt(d)) and their integral elements.

Elements of O_K are stored as integer pairs (x, y) meaning x + y*omega, where
omega = (1 + sqrt(d))/2 if d = 1 mod 4 and omega = sqrt(d) otherwise.  omega
satisfies omega^2 = trace*omega - norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

INT128_MAX = 2**127 - 1

# supported |d_K| range; class groups and ray class groups stay cheap below it
MAX_ABS_DISC = 10**4


def _check128(*values: int) -> None:
    for v in values:
        if v > INT128_MAX or v < -INT128_MAX - 1:
            raise OverflowError(f"integer {v} leaves the signed 128-bit range")


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class ImagQuadField:
    """The field K = Q(sqrt(d)) for squarefree d < 0.

    ``h_K`` and ``rho_K`` stay ``None`` until :func:`ekc.class_groups.class_group`
    finalizes the field; ``rho_K`` is the residue of zeta_K at s = 1.
    """

    d: int
    d_K: int
    omega_trace: int
    omega_norm: int
    mu_count: int
    h_K: int | None = None
    rho_K: float | None = None

    @property
    def abs_disc(self) -> int:
        return -self.d_K

    def finalize(self, h_K: int) -> "ImagQuadField":
        rho = 2.0 * math.pi * h_K / (self.mu_count * math.sqrt(self.abs_disc))
        return replace(self, h_K=h_K, rho_K=rho)

    def __str__(self) -> str:
        return f"Q(sqrt({self.d}))"


@dataclass(frozen=True)
class FieldElement:
    x: int
    y: int

    def __iter__(self):
        yield self.x
        yield self.y


def make_field(d: int) -> ImagQuadField:
    d = int(d)
    if d >= 0:
        raise ValueError(f"d must be negative, got {d}")
    if not is_squarefree(d):
        raise ValueError(f"d must be squarefree, got {d}")
    if d % 4 == 1:
        d_K, trace, nrm = d, 1, (1 - d) // 4
    else:
        d_K, trace, nrm = 4 * d, 0, -d
    if -d_K > MAX_ABS_DISC:
        raise ValueError(f"|d_K| = {-d_K} exceeds the supported range {MAX_ABS_DISC}")
    mu = 6 if d_K == -3 else 4 if d_K == -4 else 2
    return ImagQuadField(d=d, d_K=d_K, omega_trace=trace, omega_norm=nrm, mu_count=mu)


def field_from_discriminant_or_d(value: int) -> ImagQuadField:
    """Accept either a squarefree d or a fundamental discriminant d_K."""
    value = int(value)
    if value < 0 and is_squarefree(value):
        return make_field(value)
    if value < 0 and value % 4 == 0 and (value // 4) % 4 in (2, 3) and is_squarefree(value // 4):
        return make_field(value // 4)
    raise ValueError(f"{value} is neither a squarefree negative d nor a fundamental discriminant")


def norm(K: ImagQuadField, e) -> int:
    x, y = e
    n = x * x + K.omega_trace * x * y + K.omega_norm * y * y
    _check128(x, y, n)
    return n


def mul(K: ImagQuadField, a, b) -> FieldElement:
    x1, y1 = a
    x2, y2 = b
    yy = y1 * y2
    out = FieldElement(x1 * x2 - K.omega_norm * yy, x1 * y2 + x2 * y1 + K.omega_trace * yy)
    _check128(out.x, out.y)
    return out


def add(a, b) -> FieldElement:
    return FieldElement(a[0] + b[0], a[1] + b[1])


def conj(K: ImagQuadField, e) -> FieldElement:
    # conj(omega) = trace - omega
    x, y = e
    return FieldElement(x + K.omega_trace * y, -y)


def units(K: ImagQuadField) -> list[FieldElement]:
    if K.d_K == -4:
        # omega = i
        return [FieldElement(1, 0), FieldElement(0, 1), FieldElement(-1, 0), FieldElement(0, -1)]
    if K.d_K == -3:
        # zeta_6 = omega = (1 + sqrt(-3))/2; powers cycle through all six units
        out, z = [], FieldElement(1, 0)
        for _ in range(6):
            out.append(z)
            z = mul(K, z, FieldElement(0, 1))
        return out
    return [FieldElement(1, 0), FieldElement(-1, 0)]


def embed(K: ImagQuadField, e) -> tuple[float, float]:
    """Minkowski embedding x + y*omega -> (Re, Im) under sqrt(d) = i*sqrt(|d|)."""
    x, y = e
    s = math.sqrt(-K.d)
    if K.omega_trace == 1:
        return (x + 0.5 * y, 0.5 * y * s)
    return (float(x), y * s)


def residue_bounds(K: ImagQuadField) -> tuple[float, float]:
    """Lower and upper bounds for rho_K valid for imaginary quadratic K."""
    D = K.abs_disc
    return math.pi / (3.0 * math.sqrt(D)), 6.0 * (2.0 * math.pi**2 / 5.0) ** 2 * D**0.25
