import math

import numpy as np
import pytest

import quantcalc as qc
from quantcalc.distributions import QuantileModel, Support
from quantcalc.numerics import find_root


def class_d_catalog():
    """One representative per class-D catalog family."""
    return [
        qc.exponential(1.0),
        qc.uniform(2.0),
        qc.power_unit(2.0),
        qc.power_scale(2.0, 3.0),
        qc.lomax(2.0, 1.0),
        qc.rayleigh(1.0),
        qc.geo_max_exp(1.0, 0.5),
        qc.frechet_type(1.0, 2.0),
    ]


def scaled_sibling(model):
    """A same-family model that dominates `model` in the usual order."""
    table = {
        "exp(1)": lambda: qc.exponential(0.5),
        "uniform(0,2)": lambda: qc.uniform(3.0),
        "powerunit(2)": lambda: qc.power_scale(1.5, 2.0),
        "powerscale(2,3)": lambda: qc.power_scale(3.0, 3.0),
        "lomax(2,1)": lambda: qc.lomax(2.0, 2.0),
        "rayleigh(1)": lambda: qc.rayleigh(0.25),
        "geomax(1,0.5)": lambda: qc.geo_max_exp(0.5, 0.5),
        "frechet(1,2)": lambda: qc.frechet_type(4.0, 2.0),
        "pareto1(1,2)": lambda: qc.pareto1(1.5, 2.0),
    }
    return table[model.name]()


def make_max_exp_model(rate1=1.0, rate2=2.0):
    """Maximum of two independent exponentials with distinct rates.

    Increasing failure rate on average (hence new-better-than-used) but not
    IFR; the quantile function is obtained by numeric inversion of the
    product cdf, everything else is closed-form.
    """

    def cdf(x):
        x = np.asarray(x, dtype=float)
        return -np.expm1(-rate1 * x) * np.expm1(-rate2 * x) * -1.0

    def pdf(x):
        x = np.asarray(x, dtype=float)
        g1 = -np.expm1(-rate1 * x)
        g2 = -np.expm1(-rate2 * x)
        return rate1 * np.exp(-rate1 * x) * g2 + rate2 * np.exp(-rate2 * x) * g1

    def quantile_scalar(u):
        hi = 1.0
        while float(cdf(hi)) < u:
            hi *= 2.0
        return find_root(lambda x: float(cdf(x)) - u, 0.0, hi, tol=1e-14)

    quantile = np.vectorize(quantile_scalar, otypes=[float])

    def quantile_density(u):
        return 1.0 / pdf(quantile(u))

    mean = 1.0 / rate1 + 1.0 / rate2 - 1.0 / (rate1 + rate2)
    return QuantileModel(
        name=f"maxexp({rate1:g},{rate2:g})",
        quantile=quantile,
        quantile_density=quantile_density,
        cdf=cdf,
        pdf=pdf,
        mean=mean,
        support=Support(0.0, math.inf),
        class_d=True,
    )


@pytest.fixture(scope="session")
def catalog():
    return class_d_catalog()


@pytest.fixture(scope="session")
def g_suite():
    return [
        qc.power_function(1.0),
        qc.power_function(2.0),
        qc.power_function(3.0),
        qc.exp_function(),
    ]
