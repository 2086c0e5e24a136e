"""Configuration-driven command line."""

from .commands import cmd_algebra_check, cmd_evolve, cmd_kinematics_check, cmd_limit_study
from .config import ConfigError, RunConfig
from .main import main
