"""Randomized closure and boundedness properties of the translation test."""

import numpy as np

from qzap import ApGenerator, translate
from qzap.apgen import (
    check_composition_closure,
    check_product_closure,
    check_quotient_closure,
    check_sum_closure,
    check_uniform_limit_closure,
    sup_translation_diff,
)

WINDOW = (-80, 80)


def random_generator(rng, offset_span=0.5, amp_hi=1.0):
    n_terms = int(rng.integers(1, 4))
    terms = [
        (rng.uniform(0.1, amp_hi), rng.uniform(0.3, 3.0), rng.uniform(0.0, 6.28))
        for _ in range(n_terms)
    ]
    return ApGenerator.scalar(rng.uniform(-offset_span, offset_span), terms)


def premise_epsilon(*sups):
    return max(sups) * (1.0 + 1e-9) + 1e-12


def test_sum_and_product_closures_randomized():
    rng = np.random.default_rng(42)
    for _ in range(150):
        f = random_generator(rng)
        g = random_generator(rng)
        tau = int(rng.integers(-50, 51))
        eps = premise_epsilon(
            sup_translation_diff(f, tau, WINDOW),
            sup_translation_diff(g, tau, WINDOW),
        )
        s = check_sum_closure(f, g, tau, eps, WINDOW)
        assert s.premise_ok and s.holds
        p = check_product_closure(f, g, tau, eps, WINDOW)
        assert p.premise_ok and p.holds


def test_quotient_closure_randomized():
    rng = np.random.default_rng(43)
    for _ in range(150):
        g = ApGenerator.scalar(
            rng.uniform(2.0, 3.0),
            [(rng.uniform(0.05, 0.3), rng.uniform(0.3, 3.0), rng.uniform(0.0, 6.28))],
        )
        m_lower = 1.5
        tau = int(rng.integers(-50, 51))
        sup_g = sup_translation_diff(g, tau, WINDOW)
        eps = sup_g * (1.0 + 1e-9) / m_lower**2 + 1e-12
        qch = check_quotient_closure(g, tau, eps, m_lower, WINDOW)
        assert qch.premise_ok and qch.holds


def test_composition_closure_randomized():
    rng = np.random.default_rng(44)
    for _ in range(150):
        f = random_generator(rng)
        tau = int(rng.integers(-50, 51))
        eps = premise_epsilon(sup_translation_diff(f, tau, WINDOW))
        c1 = check_composition_closure(f, np.tanh, 1.0, tau, eps, WINDOW)
        assert c1.premise_ok and c1.holds
        c2 = check_composition_closure(
            f, lambda u: 3.0 * u + 1.0, 3.0, tau, eps, WINDOW
        )
        assert c2.premise_ok and c2.holds


def test_uniform_limit_closure_randomized():
    rng = np.random.default_rng(45)
    for _ in range(150):
        f = random_generator(rng)
        tau = int(rng.integers(-50, 51))
        eps = 3.0 * premise_epsilon(sup_translation_diff(f, tau, WINDOW))
        bump_term = (eps / 12.0, rng.uniform(0.3, 3.0), rng.uniform(0.0, 6.28))
        limit = ApGenerator.scalar(
            f.components[0][0], f.components[0][1] + (bump_term,)
        )
        u = check_uniform_limit_closure(limit, f, tau, eps, WINDOW)
        assert u.premise_ok and u.holds


def test_sampled_sup_never_exceeds_analytic_bound():
    rng = np.random.default_rng(46)
    for _ in range(100):
        f = random_generator(rng, offset_span=2.0, amp_hi=1.5)
        bound = f.sup_bound()[0]
        sampled = float(np.max(np.abs(f.sample(-500, 500))))
        assert sampled <= bound * (1.0 + 1e-12)


def test_translate_semigroup_on_random_generators():
    rng = np.random.default_rng(47)
    for _ in range(100):
        f = random_generator(rng)
        a = int(rng.integers(-300, 301))
        b = int(rng.integers(-300, 301))
        lhs = translate(f, a + b)
        rhs = translate(translate(f, b), a)
        assert lhs == rhs
        ns = rng.integers(-50, 51, size=5)
        for n in ns:
            assert lhs.at(int(n))[0] == rhs.at(int(n))[0]
