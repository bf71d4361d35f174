"""Shared random-model generators.

Every generator takes an explicit numpy Generator so failures reproduce
from the printed seed. Separation floors are enforced by rejection
sampling; draws are cheap at these sizes.
"""

import numpy as np
import pytest

from pronykit import channel, confluent, dynamical


def min_circle_gap(freqs) -> float:
    """Smallest pairwise distance of frequencies on the unit circle R/Z."""
    f = np.sort(np.asarray(freqs, dtype=float) % 1.0)
    if f.size < 2:
        return 1.0
    gaps = np.diff(f)
    wrap = 1.0 - f[-1] + f[0]
    return float(min(gaps.min(), wrap))


def draw_separated_frequencies(rng, n, min_sep):
    while True:
        f = rng.uniform(0.0, 1.0, n)
        if min_circle_gap(f) >= min_sep:
            return np.sort(f)


def random_coefficients(rng, n, lo=0.1, hi=10.0):
    modulus = np.exp(rng.uniform(np.log(lo), np.log(hi), n))
    phase = rng.uniform(0.0, 2.0 * np.pi, n)
    return modulus * np.exp(1j * phase)


def random_classic_model(rng, kappa, min_sep=1e-3):
    freqs = draw_separated_frequencies(rng, kappa, min_sep)
    return freqs, random_coefficients(rng, kappa)


def random_confluent_modes(rng, n_nodes, D, min_sep=0.1):
    # the floor keeps the Hankel's smallest signal singular value well
    # above roundoff even when every node carries a full-degree block
    freqs = draw_separated_frequencies(rng, n_nodes, min_sep)
    modes = []
    for f in freqs:
        deg = int(rng.integers(0, D + 1))
        q = random_coefficients(rng, deg + 1, lo=0.3, hi=3.0)
        modes.append(confluent.PolynomialMode(float(f), q))
    return modes


def random_channel_model(rng, n_paths, min_sep=0.05):
    while True:
        pts = rng.uniform(0.0, 1.0, (n_paths, 2))
        ok = all(
            channel.torus_distance(tuple(pts[i]), tuple(pts[j])) >= min_sep
            for i in range(n_paths) for j in range(i + 1, n_paths))
        if ok:
            break
    gains = random_coefficients(rng, n_paths)
    return channel.ChannelModel(
        tuple(((float(t), float(nu)), complex(g))
              for (t, nu), g in zip(pts, gains)))


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    # fix the phase ambiguity so the columns are reproducible
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_dynamical_problem(rng, d=16, min_arc=0.2, beta=1.0):
    """Diagonalizable generator, spectrum on the imaginary axis.

    Eigenvalues are i*theta with theta separated on [0, 2pi) so the
    symbols exp(beta*lam) stay pairwise distinct. Samples live in the
    standard basis; I grows from {0} until the problem is observable.
    """
    freqs = draw_separated_frequencies(rng, d, min_arc / (2.0 * np.pi))
    lams = 2j * np.pi * freqs
    q = random_unitary(rng, d)
    A = (q * lams) @ q.conj().T
    entries = tuple((complex(lams[n]), (q[:, n].copy(),)) for n in range(d))
    basis = dynamical.GeneralizedEigenbasis(entries)
    sample_basis = np.eye(d, dtype=np.complex128)
    I = [0]
    while True:
        prob = dynamical.DynamicalProblem(A=A, basis=basis,
                                          sample_basis=sample_basis,
                                          I=tuple(I), beta=beta)
        if dynamical.check_observability(prob):
            return prob
        I.append(len(I))


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)
