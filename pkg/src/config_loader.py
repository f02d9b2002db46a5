#!/usr/bin/env python3
"""
Configuration loader for grpcoho.
Handles YAML loading with template substitution for environment variables.
"""

import os
import re
import yaml
from pathlib import Path
from typing import Dict, List, Any, Optional, Tuple
from dataclasses import dataclass, field
import logging

from errors import UnsupportedInputError

logger = logging.getLogger(__name__)


@dataclass
class EngineConfig:
    """Engine caps and resource bounds."""

    max_degree: int = 8
    max_bar_degree: int = 3
    max_bar_rank: int = 27
    homotopy_top_degree: int = 8
    periodic_min_periods: int = 2
    k_theory_max_power: int = 32
    k_theory_max_bits: int = 4096
    lower_bound_fallback: bool = True
    max_workers: int = 1

    def __post_init__(self):
        for name in ("max_degree", "max_bar_degree", "max_bar_rank", "homotopy_top_degree",
                     "periodic_min_periods", "k_theory_max_power", "max_workers"):
            if getattr(self, name) < 1:
                raise UnsupportedInputError(f"Engine setting {name} must be positive, got {getattr(self, name)}")


@dataclass
class ModuleEntry:
    """One named member of the test-module family."""

    kind: str
    name: Optional[str] = None
    modulus: Any = None
    unit: Any = None

    def as_dict(self) -> Dict[str, Any]:
        entry: Dict[str, Any] = {"kind": self.kind}
        if self.modulus is not None:
            entry["modulus"] = self.modulus
        if self.unit is not None:
            entry["unit"] = self.unit
        return entry


@dataclass
class ModuleFamilyConfig:
    """Ordered family of coefficient modules spot-checked for every group."""

    name: str
    entries: List[ModuleEntry] = field(default_factory=list)

    def as_dicts(self) -> List[Dict[str, Any]]:
        return [entry.as_dict() for entry in self.entries]


@dataclass
class LoggingConfig:
    """Logging configuration data class."""

    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    metrics: bool = True


@dataclass
class CorpusEntry:
    """Cyclic homomorphism t -> s^d from Z/n to Z/m."""

    name: str
    n: int
    m: int
    d: int = 1


@dataclass
class CorpusConfig:
    """Named homomorphisms used by `survey` and the regression tests."""

    entries: List[CorpusEntry] = field(default_factory=list)

    def triples(self) -> List[Tuple[int, int, int]]:
        return [(e.n, e.m, e.d) for e in self.entries]


class ConfigLoader:
    """Load and validate configuration from YAML files with template substitution."""

    def __init__(self, config_dir: str):
        self.config_dir = Path(config_dir)
        self.configs = {}

        # Configuration MUST exist - fail fast if missing
        if not os.path.exists(config_dir):
            raise FileNotFoundError(f"Configuration directory '{config_dir}' not found. Configuration is required.")

        for file in sorted(os.listdir(config_dir)):
            if file.endswith((".yaml", ".yml")):
                file_path = Path(config_dir) / file
                config_name = file.replace(".yml", "").replace(".yaml", "")
                self.configs[config_name] = self._load_yaml_with_substitution(file_path) or {}
                setattr(self, config_name, self.configs[config_name])

    def get_engine_config(self) -> EngineConfig:
        """Get engine caps; missing keys fall back to the dataclass defaults."""
        if "engine" not in self.configs:
            raise ValueError("Engine configuration not found")

        engine_data = self.configs["engine"].get("engine", {}) or {}
        known = EngineConfig.__dataclass_fields__.keys()
        unknown = set(engine_data) - set(known)
        if unknown:
            logger.warning(f"Ignoring unknown engine settings: {', '.join(sorted(unknown))}")
        values = {k: self._coerce(v) for k, v in engine_data.items() if k in known}
        return EngineConfig(**values)

    def get_logging_config(self) -> LoggingConfig:
        """Get logging configuration (section `logging` of engine.yml)."""
        data = self.configs.get("engine", {}).get("logging", {}) or {}
        defaults = LoggingConfig()
        return LoggingConfig(
            level=str(data.get("level", defaults.level)).upper(),
            format=data.get("format", defaults.format),
            metrics=self._coerce(data.get("metrics", defaults.metrics)),
        )

    def get_module_family(self, name: Optional[str] = None) -> ModuleFamilyConfig:
        """Get a named module family; the first declared family is the default."""
        if "modules" not in self.configs:
            raise ValueError("Module family configuration not found")

        families = self.configs["modules"].get("families", {}) or {}
        if not families:
            raise ValueError("No module families declared")
        family_name = name or self.configs["modules"].get("default_family") or next(iter(families))
        if family_name not in families:
            raise ValueError(f"Module family '{family_name}' not found")

        entries = []
        for entry_data in families[family_name].get("modules", []):
            entries.append(
                ModuleEntry(
                    kind=entry_data["kind"],
                    name=entry_data.get("name"),
                    modulus=self._coerce(entry_data.get("modulus")),
                    unit=self._coerce(entry_data.get("unit")),
                )
            )
        return ModuleFamilyConfig(name=family_name, entries=entries)

    def get_corpus(self) -> CorpusConfig:
        """Get the survey corpus of cyclic homomorphisms."""
        if "corpus" not in self.configs:
            raise ValueError("Corpus configuration not found")

        entries = []
        for item in self.configs["corpus"].get("homomorphisms", []):
            entries.append(
                CorpusEntry(
                    name=item.get("name", f"Z{item['n']}->Z{item['m']}"),
                    n=int(item["n"]),
                    m=int(item["m"]),
                    d=int(item.get("d", 1)),
                )
            )
        return CorpusConfig(entries=entries)

    @staticmethod
    def _coerce(value: Any) -> Any:
        """Substituted placeholders arrive as strings; turn numeric and boolean text back into values."""
        if not isinstance(value, str):
            return value
        if re.fullmatch(r"-?\d+", value.strip()):
            return int(value)
        if value.strip().lower() in ("true", "false"):
            return value.strip().lower() == "true"
        return value

    def _load_yaml_with_substitution(self, file_path: Path) -> Dict[str, Any]:
        """Load YAML file with environment variable substitution."""
        with open(file_path, "r") as f:
            content = f.read()

        # Find all ${VARIABLE} patterns and replace with env var values
        def replace_env_var(match):
            var_expr = match.group(1)

            # Check if there's a default value (e.g., ${VAR:-default})
            if ":-" in var_expr:
                var_name, default_value = var_expr.split(":-", 1)
                value = os.environ.get(var_name)
                if value is None:
                    logger.debug(f"Using default value '{default_value}' for '{var_name}'")
                    return default_value
                return value
            else:
                var_name = var_expr
                value = os.environ.get(var_name)
                if value is None:
                    logger.warning(f"Environment variable '{var_name}' not found, keeping placeholder")
                    # Keep the original ${VARIABLE} if not found
                    return match.group(0)
                return value

        pattern = r"\$\{([^}]+)\}"
        substituted_content = re.sub(pattern, replace_env_var, content)

        return yaml.safe_load(substituted_content)
