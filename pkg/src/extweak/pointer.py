"""Brute-force von Neumann pointer on a grid.

A Gaussian pointer wavefunction is coupled to a two-level observable with
``O² = 1`` through ``exp(-i g p O)``, the system is post-selected, and the
pointer moments are read off numerically.  This never touches the closed
forms in :mod:`extweak.theory`; it only needs the weak value to pick the
pre/post-selection amplitudes.
"""

from __future__ import annotations

import numpy as np


def selection_amplitudes(w: complex) -> tuple[complex, complex]:
    """Products ``<f|±><±|i>`` (up to scale) realizing weak value ``w`` for ``O = σz``."""
    w = complex(w)
    return 0.5 * (1.0 + w), 0.5 * (1.0 - w)


def simulate_pointer(s: float, w: complex, n: int = 4096, span: float = 10.0,
                     sigma_q: float = 1.0) -> tuple[float, float]:
    """Return ``(<q>'/g, g<p>')`` for strength ``s`` and weak value ``w``.

    The grid covers ``q ∈ [-span σq, span σq)`` with ``n`` points.  The
    shift ``exp(-i g p λ)`` for eigenvalue ``λ = ±1`` is applied as a phase
    in the FFT momentum representation.
    """
    if s <= 0.0:
        raise ValueError("the oracle needs s > 0 to define g")
    # s = 2 g² <p²> and <p²> = 1 / (4 σq²)
    g = sigma_q * np.sqrt(2.0 * s)
    q = np.linspace(-span * sigma_q, span * sigma_q, n, endpoint=False)
    dq = q[1] - q[0]
    psi0 = np.exp(-(q**2) / (4.0 * sigma_q**2)).astype(complex)
    psi0 /= np.sqrt(np.sum(np.abs(psi0) ** 2) * dq)

    p = 2.0 * np.pi * np.fft.fftfreq(n, d=dq)
    phi0 = np.fft.fft(psi0)
    plus = np.fft.ifft(phi0 * np.exp(-1j * g * p))
    minus = np.fft.ifft(phi0 * np.exp(1j * g * p))

    a, b = selection_amplitudes(w)
    out = a * plus + b * minus

    dens = np.abs(out) ** 2
    norm = np.sum(dens) * dq
    q_mean = np.sum(q * dens) * dq / norm

    phi_out = np.fft.fft(out)
    pdens = np.abs(phi_out) ** 2
    p_mean = np.sum(p * pdens) / np.sum(pdens)
    return float(q_mean / g), float(g * p_mean)
