"""High-precision evaluation of the closed-form flip-probability coefficients.

The Rust tests pin the values printed here. Run with `python3 scripts/closed_form_oracle.py`.
"""
from mpmath import cos, exp, mp, mpf, pi, quad, sin, sqrt

mp.dps = 40

mu0 = mpf("1.25663706212e-6")
gamma_e = mpf("-1.76085963023e11")
gamma_n = mpf("1.2500612e7")
mu_e = mpf("9.2847677043e-24")
mu_n = mpf("1.97723e-27")
radius = mpf("275e-12")
z_a = mpf("105e-6")
speed = mpf(800)
b_r = mpf("42e-6")

b_e = 5 * mu0 * mu_e / (16 * pi * radius**3)
b_n = 5 * mu0 * mu_n / (16 * pi * radius**3)
theta = 5 * pi / 8
axial = b_r + b_n * cos(theta)
transverse = b_n * sin(theta)

c_r0 = abs(gamma_e) * 2 * pi**2 * z_a**2 / (mu0 * speed) * axial**2
c_rs = abs(gamma_e) * pi * z_a / speed * transverse
c_rr = mu0**3 * gamma_e**2 * gamma_n / (32 * pi * speed**3) * b_e * transverse**5 / axial**6

print("B_e  ", b_e)
print("B_n  ", b_n)
print("c_r0 ", c_r0)
print("c_rs ", c_rs)
print("c_rr ", c_rr)
for current in ["0.01", "0.02", "0.05", "0.1", "0.2", "0.3", "0.5"]:
    i = mpf(current)
    print("W", current, exp(-sqrt((c_r0 / i) ** 2 + c_rs**2) - c_rr * i**3))

mean = quad(lambda t: t * (1 - cos(t)) / (4 * pi) * sin(t) * 2 * pi, [0, pi])
print("mean theta_n", mean)
