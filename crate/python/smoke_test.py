"""Smoke test for the discord_qkd extension module.

Build and install first, e.g. `pip install maturin && maturin develop -m crates/py/Cargo.toml`.
"""

import math

import discord_qkd as dq


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    # vacuum entropy and g(sqrt 3)
    assert dq.entropy_g(1.0) == 0.0
    assert close(dq.entropy_g(math.sqrt(3.0)), 1.1454210973, 1e-9)

    # discord state at V_D = 2 in nats
    d = dq.discord_state(2.0)
    assert close(d.discord(nats=True), 0.11666, 1e-4)
    assert d.ppt() >= 1.0 - 1e-9, "discord state must be separable"

    e = dq.epr_state(40.0)
    nu_plus, nu_minus = e.spectrum()
    assert close(nu_plus, 1.0, 1e-9) and close(nu_minus, 1.0, 1e-9)
    o_plus, o_minus = e.spectrum_oracle()
    assert close(o_plus, nu_plus, 1e-9) and close(o_minus, nu_minus, 1e-9)
    assert e.ppt() < 1.0
    assert close(e.invariants()["i1"], 1600.0, 1e-9)

    c = dq.Covariance(e.matrix())
    assert c.matrix() == e.matrix()

    r = dq.key_rate("discord", 40.0, 0.9, det="hom", rec="rr")
    assert r.key_rate == r.i_ab - r.i_eve
    assert r.key_rate > 0

    t_star = dq.transmission_threshold("discord", 40.0, "het", "rr")
    assert close(t_star, 0.538, 1e-3)

    v_d, disc = dq.discord_threshold(0.75, "het", "dr")
    assert close(disc, 0.22, 0.02), (v_d, disc)

    rows = dq.sweep("t", 0.0, 1.0, 11, state="discord", variance=40.0, det="hom", rec="rr")
    assert len(rows) == 11 and rows[-1]["T"] == 1.0
    assert all(row["error"] is None for row in rows)

    columns, table = dq.figure("fig2", points=21)
    assert columns[0] == "V_D" and len(table) == 21

    try:
        dq.discord_state(0.5)
    except dq.DiscordQkdError as err:
        print("rejected V_D = 0.5:", err)
    else:
        raise AssertionError("V_D < 1 accepted")

    try:
        dq.transmission_threshold("discord", 40.0, "het", "rr", lo=0.9, hi=0.99)
    except dq.NoSignChangeError as err:
        print("no crossing:", err)
    else:
        raise AssertionError("expected NoSignChangeError")

    print(r)
    print("smoke test OK")


if __name__ == "__main__":
    main()
