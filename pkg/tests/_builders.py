"""Shared network builders and oracles used across the test modules."""

import math

import numpy as np

from qzap import Activation, ApGenerator, HopfieldSpec, IntDelay, no_delays

SQRT2 = math.sqrt(2.0)


def scalar_tanh_spec(c=0.5, a=0.2, b=0.1, inp=0.1, q=2.0):
    """One tanh neuron with constant coefficients."""
    gen = ApGenerator.scalar
    gamma, omega, v = no_delays(1)
    return HopfieldSpec(
        m=1, q=q,
        c_hat=(gen(c),),
        a_hat=((gen(a),),),
        b_hat=(((gen(b),),),),
        I_hat=(gen(inp),),
        activations=(Activation.tanh(),),
        gamma=gamma, omega=omega, v_delays=v,
    )


def scalar_fixed_point_oracle(c=0.5, a=0.2, b=0.1, inp=0.1, iters=200):
    """Bisection root of c x = a tanh x + b tanh^2 x + inp on [0, 2]."""
    def h(x):
        return c * x - (a * np.tanh(x) + b * np.tanh(x) ** 2 + inp)

    lo, hi = 0.0, 2.0
    assert h(lo) < 0 < h(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _grid(m, default, entries):
    """m x m generator grid: zero except the (i, j) -> gen entries."""
    return tuple(
        tuple(entries.get((i, j), default) for j in range(m)) for i in range(m)
    )


def _cube(m, default, entries):
    return tuple(
        tuple(tuple(entries.get((i, j, l), default) for l in range(m))
              for j in range(m))
        for i in range(m)
    )


def three_neuron_spec(freq1=1.0, freq2=SQRT2, q=2.0):
    """Three tanh neurons, two-frequency coefficients, mixed delays.

    With the default irrational pair the coefficients are genuinely almost
    periodic; rational multiples of 2*pi (see ``three_neuron_periodic_spec``)
    make everything share one integer period.
    """
    gen = ApGenerator.scalar
    zero = gen(0.0)
    c_hat = (
        gen(0.5),
        gen(0.55, [(0.03, freq2, 0.3)]),
        gen(0.6, [(0.02, freq1, 1.1)]),
    )
    a_hat = _grid(3, zero, {
        (0, 0): gen(0.03),
        (0, 1): gen(0.0, [(0.02, freq1, 0.5)]),
        (1, 0): gen(0.0, [(0.02, freq2, 1.2)]),
        (1, 1): gen(0.02),
        (2, 1): gen(0.0, [(0.015, freq1, 2.0)]),
        (2, 2): gen(0.025),
    })
    b_hat = _cube(3, zero, {
        (0, 0, 1): gen(0.01),
        (1, 2, 0): gen(0.0, [(0.01, freq2, 0.7)]),
        (2, 1, 1): gen(0.008),
    })
    I_hat = (
        gen(0.05, [(0.07, freq1, 0.0), (0.06, freq2, 0.4)]),
        gen(0.04, [(0.06, freq1, 1.0), (0.05, freq2, 2.0)]),
        gen(0.06, [(0.07, freq2, 0.9)]),
    )
    zero_d = IntDelay.const(0)
    gamma = tuple(
        tuple(
            IntDelay.cycle([0, 1, 2]) if (i, j) == (0, 1)
            else IntDelay.const(1) if (i, j) == (1, 0)
            else zero_d
            for j in range(3)
        )
        for i in range(3)
    )
    omega = tuple(
        tuple(
            tuple(IntDelay.const(2) if (i, j, l) == (0, 0, 1) else zero_d
                  for l in range(3))
            for j in range(3)
        )
        for i in range(3)
    )
    v = tuple(
        tuple(
            tuple(IntDelay.cycle([1, 0]) if (i, j, l) == (1, 2, 0) else zero_d
                  for l in range(3))
            for j in range(3)
        )
        for i in range(3)
    )
    return HopfieldSpec(
        m=3, q=q, c_hat=c_hat, a_hat=a_hat, b_hat=b_hat, I_hat=I_hat,
        activations=(Activation.tanh(),) * 3,
        gamma=gamma, omega=omega, v_delays=v,
    )


PERIOD = 12


def three_neuron_periodic_spec():
    """Same network with frequencies 2*pi/12 and 2*pi*5/12: period 12."""
    return three_neuron_spec(
        freq1=2.0 * math.pi / PERIOD,
        freq2=2.0 * math.pi * 5.0 / PERIOD,
    )
