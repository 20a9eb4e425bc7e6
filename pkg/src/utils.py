import os
import copy
import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import yaml

from .errors import ValidationError

DEFAULT_CONFIG: Dict[str, Any] = {
    "oracle": {
        "grid": 48,
        "search_grid": 24,
        "refine_tol": 1e-7
    },
    "criteria": {
        "tau_points": 10000,
        "tau_s_min": 1e-6,
        "tau_xatol": 1e-10,
        "r2_scan_points": 2000,
        "m9_normalization": "auto"
    },
    "optimizer": {
        "multistarts": 200,
        "seed": 7,
        "step_tol": 1e-6,
        "polish_top": 5,
        "scan_multistarts": 24,
        "scan_grid": 60
    },
    "tolerances": {
        "probability": 1e-12,
        "product": 1e-14,
        "applicability": 1e-12
    },
    "parallel": {
        "threads": None
    }
}


def setup_logger(name: str, debug: bool = False) -> logging.Logger:
    """
    Set up and return a logger

    Args:
        name: Logger name
        debug: Lower the console level to DEBUG

    Returns:
        Configured logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)

    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    # Handlers are attached once per process
    if not logger.handlers:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        log_dir = os.path.expanduser("~/.local/share/ghzwl/logs")
        try:
            os.makedirs(log_dir, exist_ok=True)
            file_handler = logging.FileHandler(os.path.join(log_dir, f"{name}.log"))
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError as e:
            logger.warning(f"File logging disabled: {e}")

    for handler in logger.handlers:
        if type(handler) is logging.StreamHandler:
            handler.setLevel(logging.DEBUG if debug else logging.INFO)

    return logger


def get_config_path() -> str:
    """
    Get the path to the configuration file

    Returns:
        Path to configuration file
    """
    # Check XDG_CONFIG_HOME first
    xdg_config = os.environ.get("XDG_CONFIG_HOME")
    if xdg_config:
        config_dir = os.path.join(xdg_config, "ghzwl")
    else:
        config_dir = os.path.expanduser("~/.config/ghzwl")

    return os.path.join(config_dir, "config.yml")


def update_dict_recursive(target: Dict[str, Any], source: Dict[str, Any]) -> None:
    """Merge source into target in place, descending into nested dicts"""
    for key, value in source.items():
        if isinstance(value, dict) and isinstance(target.get(key), dict):
            update_dict_recursive(target[key], value)
        else:
            target[key] = value


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration from file

    Args:
        config_path: Path to configuration file; the XDG location when omitted

    Returns:
        Configuration dictionary (defaults merged with the file)
    """
    logger = logging.getLogger("ghzwl.config")
    config = copy.deepcopy(DEFAULT_CONFIG)

    if not config_path:
        config_path = get_config_path()

    if os.path.exists(config_path):
        try:
            with open(config_path, "r") as f:
                file_config = yaml.safe_load(f)

            if file_config:
                update_dict_recursive(config, file_config)
            logger.debug(f"Loaded config from {config_path}")
        except (OSError, yaml.YAMLError) as e:
            logger.error(f"Error loading config from {config_path}: {e}")
    else:
        logger.debug(f"No config at {config_path}, using defaults")

    return config


def thread_count(config: Optional[Dict[str, Any]] = None) -> int:
    """
    Worker threads for parallel sections

    GHZWL_THREADS wins over the config file; the fallback is the CPU count.
    """
    env = os.environ.get("GHZWL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logging.getLogger("ghzwl.config").warning(f"Ignoring GHZWL_THREADS={env!r}")
    configured = (config or {}).get("parallel", {}).get("threads")
    if configured:
        return max(1, int(configured))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Tolerances:
    probability: float = 1e-12
    product: float = 1e-14
    applicability: float = 1e-12

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "Tolerances":
        section = config.get("tolerances", {})
        return cls(
            probability=float(section.get("probability", cls.probability)),
            product=float(section.get("product", cls.product)),
            applicability=float(section.get("applicability", cls.applicability)),
        )


def read_json(path: str) -> Dict[str, Any]:
    """
    Read a JSON document

    Raises:
        ValidationError: File missing or not valid JSON
    """
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"No such file: {path}")
    except json.JSONDecodeError as e:
        raise ValidationError(f"Malformed JSON in {path}: {e}")


def write_text(text: str, path: Optional[str] = None) -> None:
    """Write text to path, or to stdout when path is None"""
    if path is None:
        print(text, end="" if text.endswith("\n") else "\n")
        return
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w") as f:
        f.write(text)
