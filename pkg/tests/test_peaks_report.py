from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from errors import ConfigError
from peaks_report import (
    PeakReport,
    deviation_percent,
    format_table,
    plot_script_path,
    read_spectrum_csv,
    report,
    write_plot_script,
    write_spectrum_csv,
)
from spectrum import SpectrumCurve


def _parabola_curve(vertex: float, step: float = 2.5) -> SpectrumCurve:
    masses = np.arange(vertex - 15.0, vertex + 15.0, step)
    return SpectrumCurve.from_densities(masses, 1000.0 - (masses - vertex) ** 2)


@pytest.mark.parametrize(
    ("mass", "reference", "expected"),
    [
        (103.13, 105.7, "2.43"),
        (1746.9, 1777.0, "1.69"),
        (89425.0, 91187.6, "1.93"),
    ],
)
def test_deviation_percent_matches_known_values(mass: float, reference: float, expected: str) -> None:
    assert f"{deviation_percent(mass, reference):.2f}" == expected


def test_report_attaches_deviation_to_every_peak() -> None:
    peak_report = report(_parabola_curve(103.13), reference=105.7)

    assert peak_report.reference == 105.7
    assert len(peak_report.peaks) == 1
    assert peak_report.peaks[0].mass == pytest.approx(103.13, abs=1e-9)
    assert peak_report.deviation_percent == pytest.approx(100.0 * 2.57 / 105.7, rel=1e-9)
    assert "2.43%" in format_table(peak_report)
    assert "reference mass: 105.7 MeV" in format_table(peak_report)


def test_report_without_reference_omits_deviation() -> None:
    peak_report = report(_parabola_curve(50.0))

    assert peak_report.reference is None
    assert peak_report.deviation_percent is None
    assert peak_report.peaks[0].deviation_percent is None
    row = format_table(peak_report).splitlines()[1]
    assert row.rstrip().endswith("-")


def test_empty_report_formats_placeholder() -> None:
    peak_report = report(SpectrumCurve.from_densities([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]))

    assert peak_report == PeakReport(peaks=(), reference=None)
    assert peak_report.deviation_percent is None
    assert format_table(peak_report) == "No peaks found."


def test_spectrum_csv_round_trip_reproduces_peak_table(tmp_path: Path) -> None:
    curve = _parabola_curve(105.7)
    peak_report = report(curve, reference=105.7)
    csv_path = tmp_path / "out" / "muon.csv"

    write_spectrum_csv(csv_path, curve, peak_report)

    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "m_prime,sigma"
    peak_row = lines[-1].split(",")
    assert peak_row[0] == "#peak"
    assert float(peak_row[1]) == pytest.approx(105.7, abs=1e-9)
    assert float(peak_row[4]) == pytest.approx(0.0, abs=1e-9)
    assert not csv_path.with_suffix(".csv.tmp").exists()

    loaded = read_spectrum_csv(csv_path)
    assert loaded.masses == curve.masses
    assert loaded.densities == curve.densities
    assert format_table(report(loaded, reference=105.7)) == format_table(peak_report)


def test_csv_values_use_round_trip_precision(tmp_path: Path) -> None:
    curve = SpectrumCurve.from_densities([0.1, 0.2], [1.0 / 3.0, 2.0 / 3.0])
    csv_path = tmp_path / "precise.csv"

    write_spectrum_csv(csv_path, curve, report(curve))

    assert csv_path.read_text(encoding="utf-8").splitlines()[1] == "0.10000000000000001,0.33333333333333331"
    assert read_spectrum_csv(csv_path).densities == (1.0 / 3.0, 2.0 / 3.0)


def test_read_spectrum_csv_errors(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        read_spectrum_csv(tmp_path / "missing.csv")

    wrong_header = tmp_path / "wrong.csv"
    wrong_header.write_text("mass,value\n1,2\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="not a spectrum CSV"):
        read_spectrum_csv(wrong_header)

    malformed = tmp_path / "malformed.csv"
    malformed.write_text("m_prime,sigma\n1,abc\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="malformed row 2"):
        read_spectrum_csv(malformed)

    unordered = tmp_path / "unordered.csv"
    unordered.write_text("m_prime,sigma\n2,1\n1,1\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="increasing"):
        read_spectrum_csv(unordered)


def test_plot_script_is_written_next_to_csv(tmp_path: Path) -> None:
    csv_path = tmp_path / "spectrum.csv"

    script_path = write_plot_script(csv_path, title="qed-lepton integral mass spectrum")

    assert script_path == plot_script_path(csv_path) == tmp_path / "spectrum.csv.plot"
    text = script_path.read_text(encoding="utf-8")
    assert "import matplotlib.pyplot as plt" in text
    assert "with_name('spectrum.csv')" in text
    assert "f\"{mass:.2f} MeV\"" in text
    compile(text, str(script_path), "exec")
