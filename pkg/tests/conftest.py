import math

import pytest

from iqiperf.iqi import SCENARIOS, Side, build_sinr_model, coefficients_from_irr, db2lin

PHI_3 = math.radians(3.0)
TX_20 = coefficients_from_irr(20.0, PHI_3, Side.TX)
RX_20 = coefficients_from_irr(20.0, PHI_3, Side.RX)


def model(carrier, impairment, snr_db, tx=TX_20, rx=RX_20, normalize=True):
    """Scenario model at IRR 20 dB / 3 degrees on both sides unless overridden."""
    return build_sinr_model(carrier, impairment, tx, rx, db2lin(snr_db), normalize=normalize)


def scenario_id(sc):
    carrier, imp = sc
    return "ideal" if imp.value == "ideal" else f"{carrier.value}-{imp.value}"


@pytest.fixture(params=SCENARIOS, ids=scenario_id)
def scenario(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    from _acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
