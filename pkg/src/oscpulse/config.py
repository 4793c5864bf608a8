"""Experiment configuration: flat key = value files with section headers,
parsed by configparser.  Command-line flags override file values; every
numeric field is validated by the owning module when used.
"""

import configparser
from pathlib import Path

from .oscillator import OscParams

DEFAULTS = {
    "oscillator": {
        "eps": "0.2",
        "Omega": "1.0",
        "omega": "3.0",
        "A": "1.0",
        "nu": "0.1",
        "delta": "1.0",
    },
    "integration": {
        "method": "rk4",
        # 600 steps per drive period 2 pi
        "step": "0.010471975511965976",
        "horizon": "2000.0",
        "store_every": "10",
    },
    "stability": {
        "q_min": "25.0",
        "q_max": "49.0",
        "r_min": "0.0",
        "r_max": "64.0",
        "grid_step": "0.25",
        "section_q": "36.0",
        "mu": "0.1",
        "monodromy_steps": "8000",
    },
    "envelope": {
        "h0": "0.07957747154594767",  # 1/(4 pi)
        "sweep_min": "0.07",
        "sweep_max": "0.5",
        "sweep_count": "55",
        "flow_step_divisor": "1000",
    },
    "output": {
        "directory": "out",
    },
}


class ExperimentConfig:
    """Typed view over the section/key table."""

    def __init__(self, table):
        self.table = table

    @classmethod
    def load(cls, path=None, overrides=None):
        """Build from defaults, then an optional file, then overrides.

        overrides is a {(section, key): value} mapping from CLI flags.
        """
        parser = configparser.ConfigParser()
        # keys are case sensitive: Omega (forcing) and omega (natural
        # frequency) are different parameters
        parser.optionxform = str
        parser.read_dict(DEFAULTS)
        if path is not None:
            read = parser.read(path)
            if not read:
                raise FileNotFoundError(f"config file not found: {path}")
        if overrides:
            for (section, key), value in overrides.items():
                if value is None:
                    continue
                if not parser.has_section(section):
                    parser.add_section(section)
                parser.set(section, key, str(value))
        table = {s: dict(parser.items(s)) for s in parser.sections()}
        return cls(table)

    def get(self, section, key):
        return self.table[section][key]

    def getfloat(self, section, key):
        return float(self.table[section][key])

    def getint(self, section, key):
        return int(self.table[section][key])

    def osc_params(self):
        o = self.table["oscillator"]
        return OscParams(eps=float(o["eps"]), Omega=float(o["Omega"]),
                         omega=float(o["omega"]), A=float(o["A"]),
                         nu=float(o["nu"]), delta=float(o["delta"]))

    def outdir(self):
        d = Path(self.table["output"]["directory"])
        d.mkdir(parents=True, exist_ok=True)
        return d
