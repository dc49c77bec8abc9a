"""Conversions between laboratory units and the internal SI / angular units.

Internally every frequency is an angular frequency in rad/s and every time
is in seconds. Configuration files and output tables use ordinary
frequencies (Hz, kHz, MHz) and microseconds; all conversions go through
this module.
"""

import math

TWO_PI = 2.0 * math.pi


def hz(value):
    """Ordinary frequency in Hz -> angular frequency in rad/s."""
    return TWO_PI * float(value)


def khz(value):
    """Ordinary frequency in kHz -> angular frequency in rad/s."""
    return TWO_PI * 1e3 * float(value)


def mhz(value):
    """Ordinary frequency in MHz -> angular frequency in rad/s."""
    return TWO_PI * 1e6 * float(value)


def to_khz(omega):
    """Angular frequency in rad/s -> ordinary frequency in kHz."""
    return omega / (TWO_PI * 1e3)


def to_hz(omega):
    return omega / TWO_PI


def us(value):
    """Microseconds -> seconds."""
    return 1e-6 * float(value)


def to_us(seconds):
    return seconds * 1e6
