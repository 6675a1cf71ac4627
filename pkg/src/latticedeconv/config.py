"""Shared JSON configuration format for the command-line tools.

One schema describes everything a run needs: field model, noise, kernel,
region sequence, bandwidth rule, evaluation points, replicate count and
seed.  Parsing is strict — unknown model tags and violated invariants
raise ConfigError with the failed condition named, and the CLI maps
those to exit code 2.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .asymptotics import BandwidthSchedule
from .deconv import kernel_from_dict, kernel_to_dict
from .fields import field_spec_from_dict, field_spec_to_dict, noise_from_dict, noise_to_dict
from .harness import ExperimentConfig
from .lattice import region_from_dict, region_to_dict

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
    return parse_config(raw)


def parse_config(raw: dict) -> ExperimentConfig:
    """Build and validate an ExperimentConfig from its JSON form."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    version = raw.get("schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
    try:
        spec = field_spec_from_dict(raw["field"])
        noise = noise_from_dict(raw.get("noise", {"tag": "none"}))
        kernel = kernel_from_dict(raw.get("kernel", {"tag": "polynomial", "order": 3}))
        regions_raw = raw.get("regions")
        if regions_raw is None and "region" in raw:
            regions_raw = [raw["region"]]
        if not regions_raw:
            raise ConfigError("config needs a 'regions' list (or a single 'region')")
        regions = tuple(region_from_dict(r) for r in regions_raw)
        bw = raw.get("bandwidth", {})
        schedule = BandwidthSchedule(c=float(bw.get("c", 1.0)), gamma=float(bw.get("gamma", 0.125)))
        config = ExperimentConfig(
            field_spec=spec,
            noise=noise,
            kernel=kernel,
            regions=regions,
            schedule=schedule,
            eval_points=tuple(raw.get("eval_points", (0.0,))),
            replicates=int(raw.get("replicates", 500)),
            base_seed=int(raw.get("seed", 0)),
            theorem=raw.get("theorem", "mixing"),
            threads=int(raw.get("threads", 1)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e
    return config


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "field": field_spec_to_dict(config.field_spec),
        "noise": noise_to_dict(config.noise),
        "kernel": kernel_to_dict(config.kernel),
        "regions": [region_to_dict(r) for r in config.regions],
        "bandwidth": {"c": config.schedule.c, "gamma": config.schedule.gamma},
        "eval_points": list(config.eval_points),
        "replicates": config.replicates,
        "seed": config.base_seed,
        "theorem": config.theorem,
        "threads": config.threads,
    }


def config_digest(raw: dict) -> str:
    """Content hash of a config dict, stable under key reordering."""
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written alongside every command's outputs."""

    config_digest: str
    tool_version: str
    base_seed: int
    timestamp: str
    outputs: tuple = field(default_factory=tuple)

    def to_json(self) -> str:
        return json.dumps(
            {
                "config_digest": self.config_digest,
                "tool_version": self.tool_version,
                "base_seed": self.base_seed,
                "timestamp": self.timestamp,
                "outputs": list(self.outputs),
            },
            indent=2,
            sort_keys=True,
        )

    def write(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_json() + "\n")
