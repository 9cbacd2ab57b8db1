"""
Hyperfine dipole coefficients for the cesium D2 line.

Coefficients follow the Wigner-Eckart decomposition

    <F m| d_{-q} |F' m+q> ∝ (-1)^{2F'+J+I+m} sqrt((2F+1)(2F'+1)(2J+1))
                             ( F'  1   F ) { J  J' 1 }
                             ( m+q -q -m ) { F' F  I }

and are rescaled so the stretched cycling transition has unit strength.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import Rational
from sympy.physics.wigner import wigner_3j, wigner_6j

__all__ = ["CS_J", "CS_J_PRIME", "CS_I", "GROUND_F", "EXCITED_F", "clebsch_gordan",
           "dipole_element"]

CS_J = Fraction(1, 2)
CS_J_PRIME = Fraction(3, 2)
CS_I = Fraction(7, 2)
GROUND_F = (3, 4)
EXCITED_F = (2, 3, 4, 5)


def _rat(x) -> Rational:
    x = Fraction(x)
    return Rational(x.numerator, x.denominator)


def _validate(F, F_prime, m_F, q):
    if F not in GROUND_F:
        raise ValueError(f"ground F must be one of {GROUND_F}, got {F}")
    if F_prime not in EXCITED_F:
        raise ValueError(f"excited F' must be one of {EXCITED_F}, got {F_prime}")
    if q not in (-1, 0, 1):
        raise ValueError(f"q must be -1, 0 or +1, got {q}")
    if int(m_F) != m_F or abs(m_F) > F:
        raise ValueError(f"m_F={m_F} invalid for F={F}")
    if abs(m_F + q) > F_prime:
        raise ValueError(f"m_F + q = {m_F + q} invalid for F'={F_prime}")


@lru_cache(maxsize=None)
def dipole_element(F: int, F_prime: int, m_F: int, q: int) -> float:
    """Unnormalized ``<F m_F| d |F' m_F+q>`` in units of the reduced J element."""
    _validate(F, F_prime, m_F, q)
    J, Jp, I = _rat(CS_J), _rat(CS_J_PRIME), _rat(CS_I)
    sign = (-1) ** int(2 * F_prime + J + I + m_F)
    pref = ((2 * F + 1) * (2 * F_prime + 1) * (2 * J + 1)) ** Rational(1, 2)
    val = sign * pref * wigner_3j(F_prime, 1, F, m_F + q, -q, -m_F) \
        * wigner_6j(J, Jp, 1, F_prime, F, I)
    return float(val)


@lru_cache(maxsize=None)
def clebsch_gordan(F: int, F_prime: int, m_F: int, q: int) -> float:
    """Coefficient of ``|F, m_F><F', m_F + q|`` in the polarization-``q`` dipole operator.

    Normalized so that ``clebsch_gordan(4, 5, ±4, ±1) == 1``.
    """
    return dipole_element(F, F_prime, m_F, q) / dipole_element(4, 5, 4, 1)
