"""Regenerate the packaged scenario grids and model documents under src/vart2/data."""
import json
from pathlib import Path

import numpy as np

from vart2.var_model import VarModel, save_model

DATA = Path(__file__).resolve().parents[1] / "src" / "vart2" / "data"

RHOS = (0.0, 0.3, 0.9)
NS = [3, 7, 15]
DELTAS = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0]


def equicorrelated(v, rho):
    s = np.full((v, v), rho)
    np.fill_diagonal(s, 1.0)
    return s


def lag_matrix(v, diag, off):
    m = np.full((v, v), off)
    np.fill_diagonal(m, diag)
    return m


PHIS = {
    "phi0": (0.0, 0.0),
    "phi_cross01": (0.0, 0.1),
    "phi_diag03": (0.3, 0.0),
    "phi_diag03_cross01": (0.3, 0.1),
    "phi_diag07": (0.7, 0.0),
}


def table_grid(v, name):
    scenarios = []
    for rho in RHOS:
        for phi_id, (diag, off) in PHIS.items():
            sid = f"rho{rho:g}_{phi_id}"
            ref = f"models/{name}_{sid}.json"
            save_model(VarModel(np.zeros(v), (lag_matrix(v, diag, off),), equicorrelated(v, rho)), DATA / ref)
            scenarios.append({"id": sid, "model": ref})
    doc = {"alpha": 0.0027, "mode": "observations", "n": NS, "deltas": DELTAS, "scenarios": scenarios}
    (DATA / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


def cases():
    layout = [
        ("I", 2, 0.0, 0.1, 0.0), ("II", 2, 0.7, 0.0, 0.0), ("III", 2, 0.0, 0.1, 0.9), ("IV", 2, 0.7, 0.0, 0.9),
        ("V", 3, 0.0, 0.1, 0.0), ("VI", 3, 0.7, 0.0, 0.0), ("VII", 3, 0.0, 0.1, 0.9), ("VIII", 3, 0.7, 0.0, 0.9),
    ]
    scenarios = []
    for label, v, diag, off, rho in layout:
        ref = f"models/case_{label}.json"
        save_model(VarModel(np.zeros(v), (lag_matrix(v, diag, off),), equicorrelated(v, rho)), DATA / ref)
        scenarios.append({"id": label, "model": ref})
    doc = {"alpha": 0.0027, "mode": "observations", "n": NS,
           "deltas": [round(0.1 * k, 1) for k in range(21)], "scenarios": scenarios}
    (DATA / "cases_I_VIII.json").write_text(json.dumps(doc, indent=2) + "\n")


def steel():
    # third diagonal entry 0.25: the value consistent with the reported
    # covariance, correlation and eigenvalue displays
    phi = np.array([[0.7, 0.15, 0.15], [0.15, 0.7, 0.15], [0.15, 0.15, 0.25]])
    sig = np.full((3, 3), 0.7)
    np.fill_diagonal(sig, 1.0)
    save_model(VarModel(np.full(3, 5.0), (phi,), sig, ("x1", "x2", "x3")), DATA / "steel.json")


def chemical():
    # rounded published parameters of the VAR(3) fit to chemical.csv
    phis = (
        [[0.690, -0.043], [0.049, 0.633]],
        [[0.010, 0.091], [-0.016, 0.270]],
        [[-0.006, -0.017], [1.125, -0.317]],
    )
    sig = [[0.011, -0.001], [-0.001, 0.012]]
    save_model(VarModel(np.zeros(2), phis, sig, ("viscosity", "temperature")), DATA / "chemical.json")


if __name__ == "__main__":
    (DATA / "models").mkdir(parents=True, exist_ok=True)
    table_grid(2, "table1")
    table_grid(3, "table2")
    cases()
    steel()
    chemical()
