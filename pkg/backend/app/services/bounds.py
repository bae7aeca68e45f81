"""
Closed-form coding delays, the cut-set lower bound and gap diagnostics.

All values are exact Fractions in units of F/m slots. Between corner
points (where the integrality conditions hold) achievable delays follow
memory sharing: the straight line between adjacent corners.
"""

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

from app.models.schemas import PartitionProfile
from app.utils.exceptions import DomainError, InfiniteGap, InvalidProfile
from app.utils.helpers import to_fraction
from app.utils.validators import ScenarioValidator

Corner = tuple[Fraction, Fraction]


def _cache_size(M: Fraction | int | str, N: int) -> Fraction:
    return ScenarioValidator.validate_cache_size(M, N)


def memory_sharing(corners: Sequence[Corner], M: Fraction) -> Fraction:
    """
    Delay at M on the piecewise-linear curve through the corners.

    Raises:
        DomainError: If M lies outside the corners' memory range
    """
    points = sorted(corners)
    if not points or M < points[0][0] or M > points[-1][0]:
        low = points[0][0] if points else None
        high = points[-1][0] if points else None
        raise DomainError(
            message="M outside the achievable range",
            detail=f"M={M} not in [{low}, {high}]"
        )
    for m0, t0 in points:
        if m0 == M:
            return t0
    for (m0, t0), (m1, t1) in zip(points, points[1:]):
        if m0 < M < m1:
            return t0 + (t1 - t0) * (M - m0) / (m1 - m0)
    raise DomainError(message="M outside the achievable range", detail=f"M={M}")


def single_server_corners(K: int, N: int) -> list[Corner]:
    return [(Fraction(t * N, K), Fraction(K - t, 1 + t)) for t in range(K + 1)]


def single_server_delay(K: int, M: Fraction | int | str, N: int) -> Fraction:
    """K(1 - M/N)/(1 + KM/N)."""
    return memory_sharing(single_server_corners(K, N), _cache_size(M, N))


def padded_users(K: int, L: int) -> int:
    """K' = L * ceil(K/L)."""
    return L * math.ceil(K / L)


def dedicated_corners(K: int, L: int, N: int) -> list[Corner]:
    Kp = padded_users(K, L)
    g = Kp // L
    return [
        (Fraction(t * N, g), Fraction(Kp * (g - t), g) / min(Kp, L * (1 + t)))
        for t in range(g + 1)
    ]


def dedicated_delay(K: int, L: int, M: Fraction | int | str, N: int) -> Fraction:
    """K'(1 - M/N)/min(K', L + K'M/N)."""
    return memory_sharing(dedicated_corners(K, L, N), _cache_size(M, N))


def linear_corners(K: int, L: int, N: int) -> list[Corner]:
    return [(Fraction(t * N, K), Fraction(K - t, min(K, L + t))) for t in range(K + 1)]


def linear_delay(K: int, L: int, M: Fraction | int | str, N: int) -> Fraction:
    """K(1 - M/N)/min(K, L + KM/N)."""
    return memory_sharing(linear_corners(K, L, N), _cache_size(M, N))


def _check_profile(K: int, L: int, profile: PartitionProfile) -> None:
    if profile.K != K or profile.L != L:
        raise InvalidProfile(
            message="Profile does not match (K, L)",
            detail=f"{profile} describes K={profile.K}, L={profile.L}; expected K={K}, L={L}"
        )


def flexible_pair(K: int, L: int, N: int, profile: PartitionProfile) -> Corner:
    """
    The achievable (M, T) of one partition profile:
    T = 1 / sum p_i/(K-p_i+1) and
    M = (N/K) sum p_i(p_i-1)/(K-p_i+1) / sum p_i/(K-p_i+1).
    """
    _check_profile(K, L, profile)
    served = sum((Fraction(p, K - p + 1) for p in profile.p), Fraction(0))
    cached = sum((Fraction(p * (p - 1), K - p + 1) for p in profile.p), Fraction(0))
    return Fraction(N, K) * cached / served, 1 / served


def _nonincreasing(budget: int, parts: int, largest: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        yield ()
        return
    for first in range(min(largest, budget - 2 * (parts - 1)), 1, -1):
        for rest in _nonincreasing(budget - first, parts - 1, first):
            yield (first,) + rest


def partition_profiles(K: int, L: int) -> list[PartitionProfile]:
    """Every profile with L classes of size >= 2 and sum <= K, as multisets."""
    return [PartitionProfile(p=p, Q=K - sum(p)) for p in _nonincreasing(K, L, K)]


@dataclass(frozen=True)
class FlexibleCorner:
    profile: PartitionProfile
    M: Fraction
    delay: Fraction
    on_envelope: bool = False


def _cross(o: Corner, a: Corner, b: Corner) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_envelope(points: Sequence[Corner]) -> list[Corner]:
    """
    Points on the lower convex hull that no other point dominates.
    Collinear points stay on the envelope.
    """
    hull: list[Corner] = []
    for point in sorted(set(points)):
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) < 0:
            hull.pop()
        hull.append(point)
    return [
        p for p in hull
        if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in points)
    ]


def flexible_corner_set(K: int, L: int, N: int) -> list[FlexibleCorner]:
    """
    All distinct (M, T) pairs over the profiles of (K, L), ordered by M,
    with a flag for points on the lower convex envelope (which, together
    with the straight lines between them, is achievable).
    """
    pairs: dict[Corner, PartitionProfile] = {}
    for profile in partition_profiles(K, L):
        pairs.setdefault(flexible_pair(K, L, N, profile), profile)
    envelope = set(lower_envelope(list(pairs)))
    return [
        FlexibleCorner(profile=profile, M=M, delay=T, on_envelope=(M, T) in envelope)
        for (M, T), profile in sorted(pairs.items(), key=lambda item: item[0])
    ]


def flexible_Mstar(K: int, L: int, N: int) -> Fraction:
    """Smallest M at which T = 1 - M/N is reached (minimum over Q = 0 profiles)."""
    candidates = [flexible_pair(K, L, N, p)[0] for p in partition_profiles(K, L) if p.Q == 0]
    if not candidates:
        raise DomainError(
            message="No flexible profile without idle users",
            detail=f"need K >= 2L, got K={K}, L={L}"
        )
    return min(candidates)


def flexible_delay(K: int, L: int, M: Fraction | int | str, N: int) -> Fraction:
    """
    Memory-sharing delay over the envelope of all corners plus (N, 0).

    Raises:
        DomainError: below the smallest corner memory or when K < 2L
    """
    M = _cache_size(M, N)
    corners = [(c.M, c.delay) for c in flexible_corner_set(K, L, N)]
    if not corners:
        raise DomainError(message="No flexible profile for (K, L)", detail=f"need K >= 2L, got K={K}, L={L}")
    return memory_sharing(lower_envelope(corners + [(Fraction(N), Fraction(0))]), M)


def order_optimal_profile(K: int, L: int, M: Fraction | int | str, N: int) -> PartitionProfile:
    """
    Profile used to bound the flexible delay within a constant of the
    cut-set bound when L divides K: classes of size t+1 with the rest idle
    below M = (N/K)(K/L - 1), classes of size K/L at or above it.

    Raises:
        DomainError: If L does not divide K or no valid profile exists at M
        NonIntegralT: If KM/N is not an integer
    """
    M = _cache_size(M, N)
    if K % L:
        raise DomainError(message="L must divide K", detail=f"K={K}, L={L}")
    group = K // L
    threshold = Fraction(N, K) * (group - 1)
    if M >= threshold:
        if group < 2:
            raise DomainError(message="Classes of size K/L are too small", detail=f"K/L={group}")
        return PartitionProfile(p=(group,) * L, Q=0)
    t = ScenarioValidator.integral_t(K, M, N)
    if t < 1:
        raise DomainError(
            message="No flexible profile caches nothing",
            detail="classes of size t+1 need t >= 1"
        )
    return PartitionProfile(p=(t + 1,) * L, Q=K - (t + 1) * L)


def cutset_bound_detail(K: int, L: int, M: Fraction | int | str, N: int) -> tuple[Fraction, int]:
    """
    max over s of (s - s*M/floor(N/s)) / min(s, L), floored at 0,
    together with the first maximizing s.
    """
    M = _cache_size(M, N)
    best, best_s = Fraction(0), 1
    for s in range(1, K + 1):
        value = (s - s * M / (N // s)) / min(s, L)
        if value > best:
            best, best_s = value, s
    return best, best_s


def cutset_bound(K: int, L: int, M: Fraction | int | str, N: int) -> Fraction:
    return cutset_bound_detail(K, L, M, N)[0]


def gap_ratio(achievable: Fraction | int | str, bound: Fraction | int | str) -> Fraction:
    """
    Raises:
        InfiniteGap: If the bound is not positive
    """
    achievable, bound = to_fraction(achievable), to_fraction(bound)
    if bound <= 0:
        raise InfiniteGap(
            message="Gap ratio against a zero lower bound",
            detail=f"achievable {achievable} over bound {bound}"
        )
    return achievable / bound
