"""50-digit reference values frozen into the Rust test suite.

Every quantity is computed from scratch with mpmath: covariance blocks,
determinants, symplectic eigenvalues (as eigenvalue moduli of i*Omega*sigma),
conditioning, entropies. Run with `python3 golden.py`.
"""
from mpmath import mp, mpf, sqrt, log, matrix, eig, mpc

mp.dps = 50
I = matrix([[1, 0], [0, 1]])
Z = matrix([[1, 0], [0, -1]])
OMEGA = matrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])


def g(nu, base=2):
    nu = mpf(nu)
    if nu <= 1:
        return mpf(0)
    x, y = (nu + 1) / 2, (nu - 1) / 2
    return x * log(x, base) - y * log(y, base)


def assemble(a, b, c):
    m = matrix(4, 4)
    for i in range(2):
        for j in range(2):
            m[i, j] = a[i, j]
            m[i + 2, j + 2] = b[i, j]
            m[i, j + 2] = c[i, j]
            m[j + 2, i] = c[i, j]
    return m


def spectrum(m):
    ev, _ = eig(mpc(0, 1) * OMEGA * m)
    mods = sorted(abs(e) for e in ev)
    return mods[3], mods[0]


def entropy(m, base=2):
    p, q = spectrum(m)
    return g(p, base) + g(q, base)


def det2(m):
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def discord(alpha, beta, gamma, base=2):
    a, b, c = alpha * I, beta * I, gamma * Z
    s = assemble(a, b, c)
    i1, i2, i3, i4 = det2(a), det2(b), det2(c), mp.det(s)
    if (i4 - i1 * i2) ** 2 <= i3 ** 2 * (i2 + 1) * (i1 + i4):
        e = (2 * i3**2 + (i2 - 1) * (i4 - i1)
             + 2 * abs(i3) * sqrt(i3**2 + (i2 - 1) * (i4 - i1))) / (i2 - 1) ** 2
    else:
        e = (i1 * i2 - i3**2 + i4
             - sqrt(i3**4 + (i4 - i1 * i2) ** 2 - 2 * i3**2 * (i4 + i1 * i2))) / (2 * i2)
    p, q = spectrum(s)
    return g(sqrt(i2), base) - g(q, base) - g(p, base) + g(sqrt(e), base), e


def channel(kind, var, T, W):
    var, T, W = mpf(var), mpf(T), mpf(W)
    gamma = var - 1 if kind == "discord" else sqrt(var**2 - 1)
    va, vb, gp = var, T * var + (1 - T) * W, sqrt(T) * gamma
    ev, phi = (1 - T) * var + T * W, sqrt(T * (W**2 - 1))
    sigma_e = assemble(ev * I, W * I, phi * Z)
    d_dr = (sqrt(1 - T) * gamma, mpf(0))
    d_rr = (sqrt(T * (1 - T)) * (W - var), sqrt((1 - T) * (W**2 - 1)))
    return dict(va=va, vb=vb, gp=gp, sigma_e=sigma_e, d_dr=d_dr, d_rr=d_rr)


def d_matrix(d):
    zeta, eta = d
    m = matrix(4, 2)
    m[0, 0] = zeta
    m[1, 1] = zeta
    m[2, 0] = eta
    m[3, 1] = -eta
    return m


def condition_hom(sigma_e, d, v):
    dm = d_matrix(d)
    pi = matrix([[1, 0], [0, 0]])
    return sigma_e - dm * pi * dm.T / v


def condition_het(sigma_e, d, v):
    dm = d_matrix(d)
    return sigma_e - dm * dm.T / (v + 1)


def key_rate(kind, var, T, W, det, rec):
    ch = channel(kind, var, T, W)
    va, vb, gp = ch["va"], ch["vb"], ch["gp"]
    if det == "hom":
        i_ab = log(vb / (vb - gp**2 / va), 2) / 2
    else:
        vam = (va + 1) / 2
        vbam = vb - (gp**2 / 2) / vam
        i_ab = log(((vb + 1) / 2) / ((vbam + 1) / 2), 2)
    d, v = (ch["d_dr"], va) if rec == "dr" else (ch["d_rr"], vb)
    cond = condition_hom if det == "hom" else condition_het
    se = entropy(ch["sigma_e"])
    sc = entropy(cond(ch["sigma_e"], d, v))
    return i_ab, se - sc, i_ab - (se - sc)


def show(name, x):
    print(f"{name:40s} {mp.nstr(x, 20)}")


if __name__ == "__main__":
    show("g(sqrt3) bits", g(sqrt(3)))
    show("g(20.5) bits", g(mpf("20.5")))
    for v in (1, 39):
        dv, e = discord(mpf(v + 1), mpf(v + 1), mpf(v))
        show(f"discord V={v} bits", dv)
        show(f"E_min V={v}", e)
        show(f"discord V={v} nats", discord(mpf(v + 1), mpf(v + 1), mpf(v), mp.e)[0])
    ch = channel("discord", 40, mpf("0.5"), 1)
    for label, m in [
        ("hom dr", condition_hom(ch["sigma_e"], ch["d_dr"], ch["va"])),
        ("hom rr", condition_hom(ch["sigma_e"], ch["d_rr"], ch["vb"])),
        ("het rr", condition_het(ch["sigma_e"], ch["d_rr"], ch["vb"])),
    ]:
        show(f"sigma_E|{label} [0,0]", m[0, 0])
        show(f"sigma_E|{label} [1,1]", m[1, 1])
        p, q = spectrum(m)
        show(f"sigma_E|{label} nu+", p)
        show(f"sigma_E|{label} nu-", q)
    for det in ("hom", "het"):
        for rec in ("dr", "rr"):
            i_ab, i_e, k = key_rate("discord", 40, mpf("0.5"), 1, det, rec)
            show(f"VD=40 T=0.5 {det} {rec} i_ab", i_ab)
            show(f"VD=40 T=0.5 {det} {rec} i_eve", i_e)
    for det in ("hom", "het"):
        show(f"VD=40 T=0.9 {det} i_ab", key_rate("discord", 40, mpf("0.9"), 1, det, "rr")[0])
    i_ab, i_e, k = key_rate("discord", 40, mpf("0.9"), 1, "het", "rr")
    show("eval VD=40 T=0.9 het rr i_ab", i_ab)
    show("eval VD=40 T=0.9 het rr i_eve", i_e)
    show("eval VD=40 T=0.9 het rr key_rate", k)
    for T in ("0.3", "0.7"):
        for rec in ("dr", "rr"):
            show(f"VD=40 T={T} W=1.5 het {rec} K", key_rate("discord", 40, mpf(T), mpf("1.5"), "het", rec)[2])
    show("EPR VE=40 T=0.8 W=1.2 hom rr K", key_rate("epr", 40, mpf("0.8"), mpf("1.2"), "hom", "rr")[2])
