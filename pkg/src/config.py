"""
Configuration management module
Handles loading and validation of application configuration
"""

import yaml
from pathlib import Path
from typing import List, Optional
from pydantic import BaseModel, Field, validator


class ApplicationConfig(BaseModel):
    """Application-level configuration"""
    name: str = "foliation-quotients"
    log_level: str = "INFO"
    log_file: Optional[str] = None


class SearchConfig(BaseModel):
    """Degree bounds for kernel searches and overlap recognition"""
    degree_bound: int = Field(default=4, ge=0)
    d_alg: int = Field(default=3, ge=1)
    localizer_degree: int = Field(default=2, ge=0)
    max_degree_escalations: int = Field(default=2, ge=0)


class ProbeConfig(BaseModel):
    """Randomized probe settings"""
    closedness_samples: int = Field(default=200, ge=1)
    closedness_dmax: int = Field(default=2, ge=1)
    seed: int = 0


class PlotConfig(BaseModel):
    """Phase portrait settings"""
    window: List[float] = Field(default_factory=lambda: [-2.0, 2.0, -2.0, 2.0])
    density: int = Field(default=15, ge=2, le=200)
    levels: int = Field(default=7, ge=1)

    @validator('window')
    def validate_window(cls, v):
        """Validate window is x0, x1, y0, y1 with x0 < x1 and y0 < y1"""
        if len(v) != 4 or v[0] >= v[1] or v[2] >= v[3]:
            raise ValueError("window must be x0,x1,y0,y1 with x0 < x1 and y0 < y1")
        return v


class Config(BaseModel):
    """Main configuration model"""
    application: ApplicationConfig = Field(default_factory=ApplicationConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    probes: ProbeConfig = Field(default_factory=ProbeConfig)
    plot: PlotConfig = Field(default_factory=PlotConfig)

    @validator('application')
    def validate_log_level(cls, v):
        """Validate log level"""
        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if v.log_level.upper() not in valid_levels:
            raise ValueError(f"log_level must be one of {valid_levels}")
        return v


def load_config(config_path: str = "config.yaml") -> Config:
    """
    Load and validate configuration from YAML file

    Args:
        config_path: Path to configuration file

    Returns:
        Validated Config object

    Raises:
        FileNotFoundError: If config file doesn't exist
        ValueError: If configuration is invalid
    """
    path = Path(config_path)

    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with path.open('r') as f:
        config_dict = yaml.safe_load(f) or {}

    return Config(**config_dict)
