"""Reference values computed once with mpmath at 30 digits.

Bessel values: ``mpmath.besselk``.  Tail integral: closed form
(1/pi^2) [U^2 (K1^2 - K0^2) - U K0 K1] at U = 2r, cross-checked with
``mpmath.quad``.  Transcendent: ``mpmath.odefun`` (Taylor series, tol 1e-22)
on the deviation u = 1 - eta, started from the same Bessel asymptote at
x = 12, run forward in t = -x.
"""

K0_AT_1 = 0.421024438240708333335627379213
K1_AT_1 = 0.601907230197234574737540001536

TAIL_INTEGRAL_R6 = -2.36251672614574512050340126549e-13

ETA_AT_1 = 0.93003628909361603917
ETA_PRIME_AT_1 = 0.16578769596310003557
ETA_AT_2 = 0.99292068111041537493
ETA_PRIME_AT_2 = 0.015782132106423340579
DEVIATION_AT_4 = 9.3241799793237275116e-5
DEVIATION_AT_6 = 1.4010879819392391586e-6
DEVIATION_AT_8 = 2.227794632110659983e-8
