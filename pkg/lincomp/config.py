"""Configuration values for library defaults and CLI runtime."""

import os
from typing import Optional

from dotenv import load_dotenv


def _float(name: str, default: str) -> float:
    return float(os.getenv(name, default))


class LincompConfig:
    LOG_LEVEL = os.getenv('LINCOMP_LOG_LEVEL', 'WARNING').upper()
    LOG_JSON = os.getenv('LINCOMP_LOG_JSON', '1') == '1'

    SEQUENCE_WINDOW = int(os.getenv('LINCOMP_SEQUENCE_WINDOW', '8'))

    STOCHASTIC_TOL = _float('LINCOMP_STOCHASTIC_TOL', '1e-12')
    COLUMN_MASS_TOL = _float('LINCOMP_COLUMN_MASS_TOL', '1e-9')

    DEFAULT_SEED = int(os.getenv('LINCOMP_DEFAULT_SEED', '0'))
    DEFAULT_SAMPLES = int(os.getenv('LINCOMP_DEFAULT_SAMPLES', '10000'))

    RENDER_RANGE = _float('LINCOMP_RENDER_RANGE', '1.0')
    DATAFLOW_WORKERS = int(os.getenv('LINCOMP_DATAFLOW_WORKERS', '1'))

    @classmethod
    def reload(cls, dotenv_path: Optional[str] = None) -> 'LincompConfig':
        """Re-read the environment, after loading a .env file if one exists."""
        load_dotenv(dotenv_path=dotenv_path, override=False)
        cls.LOG_LEVEL = os.getenv('LINCOMP_LOG_LEVEL', cls.LOG_LEVEL).upper()
        cls.LOG_JSON = os.getenv('LINCOMP_LOG_JSON', '1' if cls.LOG_JSON else '0') == '1'
        cls.SEQUENCE_WINDOW = int(os.getenv('LINCOMP_SEQUENCE_WINDOW', str(cls.SEQUENCE_WINDOW)))
        cls.STOCHASTIC_TOL = _float('LINCOMP_STOCHASTIC_TOL', repr(cls.STOCHASTIC_TOL))
        cls.COLUMN_MASS_TOL = _float('LINCOMP_COLUMN_MASS_TOL', repr(cls.COLUMN_MASS_TOL))
        cls.DEFAULT_SEED = int(os.getenv('LINCOMP_DEFAULT_SEED', str(cls.DEFAULT_SEED)))
        cls.DEFAULT_SAMPLES = int(os.getenv('LINCOMP_DEFAULT_SAMPLES', str(cls.DEFAULT_SAMPLES)))
        cls.RENDER_RANGE = _float('LINCOMP_RENDER_RANGE', repr(cls.RENDER_RANGE))
        cls.DATAFLOW_WORKERS = int(os.getenv('LINCOMP_DATAFLOW_WORKERS', str(cls.DATAFLOW_WORKERS)))
        return cls
