"""Peak tables for integral mass spectra, plus the CSV and plot-script files."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from errors import ConfigError, DomainError
from spectrum import Peak, SpectrumCurve, find_peaks

CSV_HEADER = ("m_prime", "sigma")
PEAK_PREFIX = "#peak"


@dataclass(frozen=True)
class PeakRow:
    mass: float
    height: float
    prominence: float
    bin_mass: float
    deviation_percent: float | None = None


@dataclass(frozen=True)
class PeakReport:
    peaks: tuple[PeakRow, ...]
    reference: float | None = None

    @property
    def deviation_percent(self) -> float | None:
        """Deviation of the dominant peak from the reference, if both exist."""
        if not self.peaks:
            return None
        return self.peaks[0].deviation_percent


def deviation_percent(mass: float, reference: float) -> float:
    if reference <= 0.0:
        raise DomainError(f"Reference mass must be positive, got {reference}")
    return 100.0 * abs(mass - reference) / reference


def _row(peak: Peak, reference: float | None) -> PeakRow:
    return PeakRow(
        mass=peak.mass,
        height=peak.height,
        prominence=peak.prominence,
        bin_mass=peak.bin_mass,
        deviation_percent=None if reference is None else deviation_percent(peak.mass, reference),
    )


def report(curve: SpectrumCurve, min_prominence: float = 0.0, reference: float | None = None) -> PeakReport:
    peaks = find_peaks(curve, min_prominence)
    return PeakReport(peaks=tuple(_row(peak, reference) for peak in peaks), reference=reference)


def format_table(peak_report: PeakReport) -> str:
    if not peak_report.peaks:
        return "No peaks found."

    lines = [f"{'#':>2}  {'mass [MeV]':>14}  {'bin [MeV]':>14}  {'height':>12}  {'prominence':>12}  deviation"]
    for rank, row in enumerate(peak_report.peaks, start=1):
        deviation = "-" if row.deviation_percent is None else f"{row.deviation_percent:.2f}%"
        lines.append(
            f"{rank:>2}  {row.mass:>14.4f}  {row.bin_mass:>14.4f}  "
            f"{row.height:>12.5e}  {row.prominence:>12.5e}  {deviation}"
        )
    if peak_report.reference is not None:
        lines.append(f"reference mass: {peak_report.reference:g} MeV")
    return "\n".join(lines)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = path.with_suffix(path.suffix + ".tmp")
    temp_path.write_text(text, encoding="utf-8")
    temp_path.replace(path)


def _number(value: float) -> str:
    return f"{value:.17g}"


def write_spectrum_csv(path: Path, curve: SpectrumCurve, peak_report: PeakReport) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for mass, density in curve.bins:
        writer.writerow([_number(mass), _number(density)])
    for row in peak_report.peaks:
        deviation = "" if row.deviation_percent is None else _number(row.deviation_percent)
        writer.writerow(
            [PEAK_PREFIX, _number(row.mass), _number(row.height), _number(row.prominence), deviation]
        )
    _atomic_write(path, buffer.getvalue())


def read_spectrum_csv(path: Path) -> SpectrumCurve:
    if not path.exists():
        raise FileNotFoundError(f"Spectrum file not found: {path}")

    with path.open("r", encoding="utf-8", newline="") as file:
        rows = [row for row in csv.reader(file) if row and not row[0].startswith("#")]

    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ConfigError(f"{path} is not a spectrum CSV (expected header {','.join(CSV_HEADER)})")

    masses: list[float] = []
    densities: list[float] = []
    for line_number, row in enumerate(rows[1:], start=2):
        try:
            mass, density = (float(value) for value in row)
        except ValueError as exc:
            raise ConfigError(f"{path}: malformed row {line_number}: {row!r}") from exc
        masses.append(mass)
        densities.append(density)

    try:
        return SpectrumCurve.from_densities(masses, densities)
    except DomainError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


PLOT_SCRIPT = '''"""Plot the integral mass spectrum stored in {csv_name}."""

import csv
from pathlib import Path

import matplotlib.pyplot as plt

CSV_PATH = Path(__file__).with_name({csv_name!r})

masses, sigma, peaks = [], [], []
with CSV_PATH.open(encoding="utf-8", newline="") as file:
    for row in csv.reader(file):
        if not row or row[0] == "m_prime":
            continue
        if row[0] == "#peak":
            peaks.append((float(row[1]), float(row[2])))
            continue
        masses.append(float(row[0]))
        sigma.append(float(row[1]))

fig, ax = plt.subplots(figsize=(8, 5))
ax.plot(masses, sigma, marker="o", label={title!r})
for mass, height in peaks:
    ax.axvline(mass, color="tab:red", linestyle="--", linewidth=0.8)
    ax.annotate(f"{{mass:.2f}} MeV", (mass, height), textcoords="offset points", xytext=(5, 5))
ax.set_xlabel({xlabel!r})
ax.set_ylabel("integral mass spectrum")
ax.legend()
fig.tight_layout()
plt.show()
'''


def plot_script_path(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.name + ".plot")


def write_plot_script(csv_path: Path, title: str, mass_symbol: str = "m_prime") -> Path:
    """Write ``<csv>.plot``, a standalone matplotlib script for the spectrum CSV."""
    script_path = plot_script_path(csv_path)
    _atomic_write(
        script_path,
        PLOT_SCRIPT.format(csv_name=csv_path.name, title=title, xlabel=f"{mass_symbol} [MeV]"),
    )
    return script_path
