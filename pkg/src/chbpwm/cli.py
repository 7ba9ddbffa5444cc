"""``chbpwm`` command line: verify-table1, synthesize, sweep-k, compare, predict-acoustics.

Each command reads an optional YAML experiment file (see README for the key
reference), writes CSV and JSON under ``--out`` and prints a short table.
On failure a JSON error record goes to stderr and the exit status is 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from . import experiments as ex
from .acoustic import DEFAULT_K_MAX, DEFAULT_THRESHOLD, PREDICT_SIDEBAND_ORDER, MotorGeometry, predict
from .config import ModulationConfig, Strategy
from .inverter import ChbTopology
from .pipeline import POLICIES
from .reporting import (
    ACOUSTIC_HEADER,
    SPECTRUM_HEADER,
    acoustic_payload,
    acoustic_rows,
    fmt,
    spectrum_payload,
    spectrum_rows,
    write_csv,
    write_json,
    write_waveform_csv,
)
from .spectral import DEFAULT_N_MAX
from .synthesis import DEFAULT_SAMPLES_PER_PERIOD

DEFAULT_K_LIST = (0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8)
TABLE1_K_LIST = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
DEFAULT_STRATEGIES = (
    {"name": "SPWM1"},
    {"name": "SPWM2"},
    {"name": "SPWM3"},
    {"name": "HIPWM_FMTCT", "k_trunc": 0.45},
)


class ConfigError(ValueError):
    pass


@dataclass
class Experiment:
    fundamental_hz: float = 50.0
    m_bar: int = 15
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD
    n_max: int = DEFAULT_N_MAX
    export_orders: int = 200
    target_fundamental_rms: float | None = 220.0
    topology: ChbTopology = field(default_factory=ChbTopology)
    policy: str = "dc_link"
    amplitude_index: float = 1.0
    voltage: str = "line"
    strategy: dict = field(default_factory=lambda: {"name": "HIPWM_FMTCT", "k_trunc": 0.5})
    strategies: list = field(default_factory=lambda: [dict(s) for s in DEFAULT_STRATEGIES])
    k_list: list = field(default_factory=lambda: list(DEFAULT_K_LIST))
    motor: MotorGeometry = field(default_factory=MotorGeometry)
    k_max: int = DEFAULT_K_MAX
    sideband_order: int = PREDICT_SIDEBAND_ORDER
    threshold: float = DEFAULT_THRESHOLD
    waveform_stride: int = 1
    jobs: int = 1

    def modulation(self, entry: dict) -> ModulationConfig:
        entry = dict(entry)
        try:
            name = entry.pop("name")
        except KeyError:
            raise ConfigError("strategy entry needs a 'name'") from None
        injection = entry.pop("injection", None)
        if injection is not None:
            injection = tuple((int(h), float(c)) for h, c in injection)
        known = {"k_trunc", "amplitude_index", "m_bar"}
        unknown = set(entry) - known
        if unknown:
            raise ConfigError(f"unknown strategy keys: {sorted(unknown)}")
        return ModulationConfig.for_strategy(
            Strategy(name),
            fundamental_hz=self.fundamental_hz,
            m_bar=int(entry.get("m_bar", self.m_bar)),
            k_trunc=float(entry.get("k_trunc", 0.5)),
            amplitude_index=float(entry.get("amplitude_index", self.amplitude_index)),
            injection=injection,
            topology=self.topology,
            target_fundamental_rms=self.target_fundamental_rms,
            samples_per_period=self.samples_per_period,
        )


_SCALARS = {
    "fundamental_hz": float, "m_bar": int, "samples_per_period": int, "n_max": int,
    "export_orders": int, "k_max": int, "sideband_order": int, "threshold": float,
    "waveform_stride": int, "jobs": int,
}


def load_experiment(path: str | Path | None) -> Experiment:
    exp = Experiment()
    if path is None:
        return exp
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ConfigError("experiment file must hold a mapping")
    exp = _parse(exp, raw)
    if exp.policy not in POLICIES:
        raise ConfigError(f"normalization policy must be one of {POLICIES}, got {exp.policy!r}")
    return exp


def _parse(exp: Experiment, raw: dict) -> Experiment:
    for key, value in raw.items():
        if key in _SCALARS:
            setattr(exp, key, _SCALARS[key](value))
        elif key == "target_fundamental_rms":
            exp.target_fundamental_rms = None if value is None else float(value)
        elif key == "topology":
            exp.topology = ChbTopology(**{**_topology_dict(exp.topology), **value})
        elif key == "normalization":
            unknown = set(value) - {"policy", "amplitude_index", "voltage"}
            if unknown:
                raise ConfigError(f"unknown normalization keys: {sorted(unknown)}")
            exp.policy = str(value.get("policy", exp.policy))
            exp.amplitude_index = float(value.get("amplitude_index", exp.amplitude_index))
            exp.voltage = str(value.get("voltage", exp.voltage))
        elif key == "motor":
            exp.motor = MotorGeometry(**value)
        elif key == "strategy":
            exp.strategy = dict(value)
        elif key == "strategies":
            exp.strategies = [dict(v) for v in value]
        elif key == "k_list":
            exp.k_list = [float(k) for k in value]
        else:
            raise ConfigError(f"unknown experiment key {key!r}")
    return exp


def _topology_dict(t: ChbTopology) -> dict:
    return {"cells_per_phase": t.cells_per_phase, "vdc_per_cell": t.vdc_per_cell, "dead_time_s": t.dead_time_s}


def _apply_overrides(exp: Experiment, args) -> Experiment:
    if getattr(args, "samples_per_period", None):
        exp.samples_per_period = args.samples_per_period
    if getattr(args, "n_max", None):
        exp.n_max = args.n_max
    if getattr(args, "dead_time", None) is not None:
        exp.topology = replace(exp.topology, dead_time_s=args.dead_time)
    if getattr(args, "policy", None):
        exp.policy = args.policy
    if getattr(args, "jobs", None):
        exp.jobs = args.jobs
    return exp


def _print_table(header, rows, out=None) -> None:
    out = out or sys.stdout
    cells = [[fmt(v) for v in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)), file=out)
    for r in cells:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)), file=out)


def _slug(label: str) -> str:
    return label.replace("HIPWM-FMTCt K=", "HIPWM_FMTCt_K").replace(".", "p").replace(" ", "_")


# --------------------------------------------------------------------------
# commands


def cmd_verify_table1(exp: Experiment, out: Path, m_bar: int | None = None, k_list=None) -> list[dict]:
    m_bar = m_bar or exp.m_bar
    rows = ex.table1(m_bar, k_list or TABLE1_K_LIST, exp.fundamental_hz)
    header = ["K", "m_bar", "A_M", "A_M_quadrature", "A_M_rel_diff", "t1_ms", "A_M_1_minus_K", "disagreement"]
    table = [[r[h] for h in header] for r in rows]
    write_csv(out / "table1.csv", header, table)
    write_json(out / "table1.json", {"rows": rows})
    _print_table(header, table)
    for r in rows:
        if r["disagreement"]:
            print(f"WARNING: closed form and quadrature disagree at K={r['K']}", file=sys.stderr)
    return rows


def cmd_synthesize(exp: Experiment, out: Path) -> dict:
    syn, summary = ex.run_config(exp.modulation(exp.strategy), exp.n_max, exp.voltage, exp.policy)
    stride = max(1, exp.waveform_stride)
    v = syn.voltages
    cols = {
        "phase_a_V": v.phase[0].samples, "phase_b_V": v.phase[1].samples, "phase_c_V": v.phase[2].samples,
        "line_ab_V": v.line[0].samples, "line_bc_V": v.line[1].samples, "line_ca_V": v.line[2].samples,
    }
    write_waveform_csv(out / "waveform.csv", v.line[0].time[::stride], {k: c[::stride] for k, c in cols.items()})
    orders = min(exp.export_orders, syn.config.samples_per_period // 2)
    ps, ls = syn.phase_spectrum(orders), syn.line_spectrum(orders)
    write_csv(out / "spectrum.csv", SPECTRUM_HEADER, spectrum_rows(ps, ls))
    write_json(out / "spectrum.json", {"summary": summary, "spectrum": spectrum_payload(ps, ls)})
    _print_table(["quantity", "value"], [[k, summary[k]] for k in sorted(summary)])
    return summary


def cmd_sweep_k(exp: Experiment, out: Path) -> ex.SweepReport:
    report = ex.sweep_k(
        exp.k_list, exp.m_bar, exp.topology, exp.target_fundamental_rms,
        n_max=exp.n_max, samples_per_period=exp.samples_per_period,
        fundamental_hz=exp.fundamental_hz, policy=exp.policy, amplitude_index=exp.amplitude_index,
        jobs=exp.jobs,
    )
    header, rows = report.table()
    write_csv(out / "sweep_k.csv", header, rows)
    write_json(out / "sweep_k.json", {"metadata": report.metadata, "columns": header, "rows": rows,
                                      "argmin_K_thd_line": report.argmin_k()})
    _print_table(header, rows)
    return report


COMPARE_HEADER = ("strategy", "amplitude_index", "vdc_per_cell_V", "fundamental_rms_line_V", "total_rms_line_V",
                  "fundamental_rms_phase_V", "total_rms_phase_V", "thd_line_pct", "thd_phase_pct",
                  "thd_line_nyquist_pct", "pulse_count", "status")


def cmd_compare(exp: Experiment, out: Path) -> list[ex.ComparisonEntry]:
    configs = [exp.modulation(s) for s in exp.strategies]
    entries = ex.compare(
        configs, exp.target_fundamental_rms, geometry=exp.motor, n_max=exp.n_max,
        export_orders=exp.export_orders, k_max=exp.k_max, sideband_order=exp.sideband_order,
        threshold=exp.threshold, policy=exp.policy,
    )
    rows, merged = [], {"target_fundamental_rms_V": exp.target_fundamental_rms, "n_max": exp.n_max,
                        "normalization": exp.policy, "topology": _topology_dict(exp.topology), "strategies": []}
    keys = COMPARE_HEADER[1:-1]
    for e in entries:
        if e.error:
            rows.append([e.label, *([None] * len(keys)), f"error: {e.error}"])
            merged["strategies"].append({"label": e.label, "status": f"error: {e.error}"})
            continue
        rows.append([e.label, *(e.summary[k] for k in keys), "ok"])
        slug = _slug(e.label)
        write_csv(out / f"spectrum_{slug}.csv", SPECTRUM_HEADER, spectrum_rows(e.phase_spectrum, e.line_spectrum))
        write_csv(out / f"acoustic_{slug}.csv", ACOUSTIC_HEADER, acoustic_rows(e.prediction))
        merged["strategies"].append({"label": e.label, "status": "ok", "summary": e.summary,
                                     "acoustic": acoustic_payload(e.prediction)})
    write_csv(out / "compare.csv", COMPARE_HEADER, rows)
    write_csv(out / "measured_reference.csv", (*ex.MEASURED_REFERENCE_HEADER, "note"),
              [(*r, ex.MEASURED_REFERENCE_LABEL) for r in ex.MEASURED_REFERENCE])
    merged["measured_reference"] = {"note": ex.MEASURED_REFERENCE_LABEL, "columns": list(ex.MEASURED_REFERENCE_HEADER),
                                        "rows": [list(r) for r in ex.MEASURED_REFERENCE]}
    write_json(out / "compare.json", merged)
    _print_table(COMPARE_HEADER, rows)
    return entries


def cmd_predict_acoustics(exp: Experiment, out: Path, sine_supply: bool = False):
    f = exp.fundamental_hz
    if sine_supply:
        pred = predict(exp.motor, None, f, None, k_max=exp.k_max)
    else:
        syn, _ = ex.run_config(exp.modulation(exp.strategy), exp.n_max, exp.voltage, exp.policy)
        pred = predict(exp.motor, syn.line_spectrum(exp.n_max), f, syn.config.carrier.switching_hz,
                       k_max=exp.k_max, order_max=exp.sideband_order, threshold=exp.threshold)
    rows = acoustic_rows(pred)
    write_csv(out / "acoustic.csv", ACOUSTIC_HEADER, rows)
    write_json(out / "acoustic.json", acoustic_payload(pred))
    _print_table(ACOUSTIC_HEADER[:2], [r[:2] for r in rows])
    return pred


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chbpwm", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="YAML experiment file")
    common.add_argument("-o", "--out", default=".", help="output directory (default: .)")
    common.add_argument("--samples-per-period", type=int, help="override sampling (must be divisible by 6)")
    common.add_argument("--n-max", type=int, help=f"THD harmonic range (default {DEFAULT_N_MAX})")
    common.add_argument("--dead-time", type=float, help="dead time in seconds")
    common.add_argument("--policy", choices=POLICIES,
                        help="equal-fundamental protocol: search Ma, or keep Ma and scale vdc (default dc_link)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-table1", parents=[common], help="A_M / t1 table, closed form vs quadrature")
    p.add_argument("--m-bar", type=int)
    p.add_argument("--k", type=float, nargs="+", help="K values")
    sub.add_parser("synthesize", parents=[common], help="waveform and spectrum files for one strategy")
    p = sub.add_parser("sweep-k", parents=[common], help="HIPWM-FMTCt sweep over K")
    p.add_argument("--jobs", type=int, help="worker processes")
    sub.add_parser("compare", parents=[common], help="strategy comparison at equal fundamental RMS")
    p = sub.add_parser("predict-acoustics", parents=[common], help="acoustic line catalog")
    p.add_argument("--sine-supply", action="store_true", help="ignore the inverter (balanced sine feed)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        exp = _apply_overrides(load_experiment(args.config), args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "verify-table1":
            cmd_verify_table1(exp, out, args.m_bar, args.k)
        elif args.command == "synthesize":
            cmd_synthesize(exp, out)
        elif args.command == "sweep-k":
            cmd_sweep_k(exp, out)
        elif args.command == "compare":
            cmd_compare(exp, out)
        else:
            cmd_predict_acoustics(exp, out, args.sine_supply)
    except Exception as exc:  # noqa: BLE001 - every failure becomes an error record
        record = {
            "error": type(exc).__name__,
            "module": type(exc).__module__,
            "command": args.command,
            "message": str(exc),
        }
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
