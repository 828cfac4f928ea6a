"""
Campaign reports (CSV / JSON / plot script), SNR-gap interpolation and the leaf-node census.
"""

import csv
import json
import logging
import math
import os
from typing import Dict, List, Optional, Sequence, Tuple

from errors import InvalidArgumentError
from fsl_decoder import plan_segmentation
from fsl_nodes import FslParams, SegmentMode, census
from polar_core import CodeSpec
from schemas import BlerPoint, CampaignConfig, ReportFormat
from syndrome_tables import table_footprint, tables_for_segmentation

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("snr_db", "frames", "errors", "bler")

# reference leaf-node counts for N=1024, K=512, PW, B_max=32
REFERENCE_CENSUS = {
    "4b-ml": {"R0": 30, "Rep": 0, "ML": 154, "Gen": 0, "SPC": 0, "R1": 0, "Total": 184},
    "fast-sscl": {"R0": 21, "Rep": 23, "ML": 0, "Gen": 0, "SPC": 23, "R1": 24, "Total": 91},
    "fsl8": {"R0": 15, "Rep": 0, "ML": 26, "Gen": 5, "SPC": 11, "R1": 13, "Total": 70},
    "fsl16": {"R0": 7, "Rep": 0, "ML": 14, "Gen": 11, "SPC": 5, "R1": 9, "Total": 46},
}


# ---------------- Writers ----------------
def write_csv(points: Sequence[BlerPoint], path: str) -> str:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for p in points:
            writer.writerow([repr(p.snr_db), p.frames, p.block_errors, repr(p.bler)])
    return path


def write_json(points: Sequence[BlerPoint], path: str, config: Optional[CampaignConfig] = None,
               label: Optional[str] = None) -> str:
    doc = {
        "label": label or (config.describe() if config else None),
        "config": config.model_dump() if config else None,
        "points": [p.model_dump() for p in points],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
    return path


def write_plotscript(curves: Dict[str, Sequence[BlerPoint]], path: str, title: str = "BLER") -> str:
    """A standalone matplotlib script drawing every curve on a log-scale BLER axis."""
    data = {label: [(p.snr_db, p.bler) for p in points if p.bler > 0 and math.isfinite(p.snr_db)]
            for label, points in curves.items()}
    lines = [
        "import matplotlib.pyplot as plt",
        "",
        f"CURVES = {json.dumps(data, indent=4)}",
        "",
        "for label, points in CURVES.items():",
        "    snr = [p[0] for p in points]",
        "    bler = [p[1] for p in points]",
        "    plt.semilogy(snr, bler, marker='o', label=label)",
        "",
        "plt.xlabel('SNR (dB)')",
        "plt.ylabel('BLER')",
        f"plt.title({title!r})",
        "plt.grid(True, which='both', linestyle=':')",
        "plt.legend()",
        "plt.savefig(__file__.rsplit('.', 1)[0] + '.png', dpi=150)",
        "plt.show()",
        "",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
    return path


def emit_report(points: Sequence[BlerPoint], fmt: ReportFormat, path: str,
                config: Optional[CampaignConfig] = None, label: Optional[str] = None,
                extra_curves: Optional[Dict[str, Sequence[BlerPoint]]] = None) -> str:
    fmt = ReportFormat(fmt)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    if fmt == ReportFormat.csv:
        written = write_csv(points, path)
    elif fmt == ReportFormat.json:
        written = write_json(points, path, config, label)
    else:
        curves = {label or (config.describe() if config else "campaign"): points}
        curves.update(extra_curves or {})
        written = write_plotscript(curves, path)
    logger.info(f"[CAMPAIGN] wrote {fmt.value} report {written}")
    return written


def load_report(path: str) -> Tuple[Optional[str], List[BlerPoint]]:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        return doc.get("label"), [BlerPoint(**p) for p in doc["points"]]
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidArgumentError(f"{path} is not a campaign JSON report: {e}") from e


# ---------------- Curve comparison ----------------
def snr_at_bler(points: Sequence[BlerPoint], target: float) -> Optional[float]:
    """SNR where the curve crosses `target`, interpolating linearly in log10(BLER)."""
    usable = sorted((p.snr_db, p.bler) for p in points if p.bler > 0 and math.isfinite(p.snr_db))
    for (s0, b0), (s1, b1) in zip(usable, usable[1:]):
        if b0 >= target >= b1 and b0 != b1:
            frac = (math.log10(b0) - math.log10(target)) / (math.log10(b0) - math.log10(b1))
            return s0 + frac * (s1 - s0)
        if b0 == target:
            return s0
    if usable and usable[-1][1] == target:
        return usable[-1][0]
    return None


def snr_gap_at_bler(points_a: Sequence[BlerPoint], points_b: Sequence[BlerPoint], target: float = 1e-2) -> float:
    """SNR(b) - SNR(a) at the target BLER; positive when curve b needs more SNR."""
    snr_a, snr_b = snr_at_bler(points_a, target), snr_at_bler(points_b, target)
    if snr_a is None or snr_b is None:
        raise InvalidArgumentError(f"both curves must bracket BLER {target:g}")
    return snr_b - snr_a


# ---------------- Node census ----------------
def census_modes() -> List[Tuple[str, FslParams, Optional[SegmentMode]]]:
    return [
        ("4b-ml", FslParams.preset(16), SegmentMode.four_bit_ml),
        ("fast-sscl", FslParams.preset(16), SegmentMode.fast_sscl),
        ("fsl8", FslParams.preset(8), None),
        ("fsl16", FslParams.preset(16), None),
    ]


def census_report(spec: CodeSpec) -> Dict[str, Dict]:
    """Our leaf counts per segmentation mode, the reference counts and the table footprint."""
    report = {}
    for name, params, mode in census_modes():
        nodes = plan_segmentation(spec, params, mode)
        tables = tables_for_segmentation(nodes, params)
        report[name] = {
            "counts": census(nodes),
            "reference": REFERENCE_CENSUS[name],
            "table_words": table_footprint(tables),
        }
    return report


def format_census(report: Dict[str, Dict]) -> str:
    kinds = ("R0", "Rep", "ML", "Gen", "SPC", "R1", "Total")
    lines = [f"{'decoder':<10}" + "".join(f"{k:>12}" for k in kinds) + f"{'LUT words':>12}"]
    for name, row in report.items():
        cells = "".join(f"{row['counts'][k]:>6}({row['reference'][k]:>3}) " for k in kinds)
        lines.append(f"{name:<10}{cells}{row['table_words']:>11}")
    lines.append("counts shown as ours(reference)")
    return "\n".join(lines)
