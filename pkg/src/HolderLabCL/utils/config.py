import configparser
import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError


def read_config_file():
    # read JSON config file
    config_file = Path(__file__).parent.parent.absolute() / "config" / "config.json"
    with open(config_file) as json_data_file:
        config_data = json.load(json_data_file)

    return config_data


class Config:
    """Package defaults, read once from ``config/config.json``."""

    __config_data = read_config_file()

    def __init__(self, debug=False):
        self.debug = debug
        self.defaults = copy.deepcopy(Config.__config_data)

    def get_section(self, section):
        """
        Returns a copy of one section of the defaults.
        """
        if section not in self.defaults:
            raise ConfigurationError(f"Unknown configuration section [{section}]")

        return dict(self.defaults[section])


def _coerce(section, key, raw, default):
    """Parses an INI string using the type of the matching JSON default."""
    try:
        if isinstance(default, bool):
            lowered = raw.strip().lower()
            if lowered not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return lowered in ("true", "1", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, list):
            return [float(item) for item in raw.split(",") if item.strip()]
        return raw.strip()
    except ValueError:
        raise ConfigurationError(
            f"Value {raw!r} for [{section}] {key} does not parse as {type(default).__name__}"
        )


@dataclass
class ExperimentConfig:
    """Experiment description consumed by the pipeline and the CLI subcommands.

    Attributes
    ----------
    sections : dict
        Section name to ``{key: value}``; every key always has a value, the JSON
        defaults fill whatever the experiment file leaves out.
    source : pathlib.Path or None
        File the overrides were read from.
    """

    sections: dict = field(default_factory=lambda: Config().defaults)
    source: Path = None

    @classmethod
    def from_file(cls, path=None, out=None, seed=None):
        """Builds a config from a flat key/value INI file.

        Parameters
        ----------
        path : pathlib.Path, optional
            INI file with sections; ``None`` runs the reference experiment.
        out : pathlib.Path, optional
            Overrides ``[experiment] out``.
        seed : int, optional
            Overrides ``[experiment] seed``.

        Returns
        -------
        ExperimentConfig

        Raises
        ------
        ConfigurationError
            Unknown section or key, unparsable value, or unreadable file.
        """
        sections = Config().defaults
        if path is not None:
            parser = configparser.ConfigParser()
            try:
                with open(path) as fp:
                    parser.read_file(fp)
            except (OSError, configparser.Error) as e:
                raise ConfigurationError(f"Couldn't read config file {path}: {e}")
            for section in parser.sections():
                if section not in sections:
                    raise ConfigurationError(f"Unknown configuration section [{section}]")
                for key, raw in parser.items(section):
                    if key not in sections[section]:
                        raise ConfigurationError(f"Unknown key {key!r} in [{section}]")
                    sections[section][key] = _coerce(
                        section, key, raw, sections[section][key]
                    )

        if out is not None:
            sections["experiment"]["out"] = str(out)
        if seed is not None:
            sections["experiment"]["seed"] = int(seed)

        return cls(sections=sections, source=path)

    def __getitem__(self, section):
        return self.sections[section]

    @property
    def name(self):
        return self.sections["experiment"]["name"]

    @property
    def seed(self):
        return self.sections["experiment"]["seed"]

    @property
    def out(self):
        return Path(self.sections["experiment"]["out"])
