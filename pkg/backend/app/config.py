import math

from pydantic import BaseModel, Field, field_validator


# Reference fidelity of the two-cbit classical protocol, to the printed precision
GISIN_FIDELITY = 0.872


class Settings(BaseModel):
    # Physical tolerances
    eps_ball: float = 1e-12
    eps_psd: float = 1e-10
    unit_tol: float = 1e-12
    boundary_tol: float = 1e-12

    # Optimizer
    beta_grid_size: int = Field(default=2001, ge=3)
    beta_max: float = math.pi / 2
    golden_tol: float = 1e-10
    kink_drop: float = 0.1
    kink_bracket: float = 1e-4

    # Reference lines
    gisin_fidelity: float = GISIN_FIDELITY

    # Output
    csv_digits: int = 10
    svg_width: int = 800
    svg_height: int = 600

    # Verification defaults
    default_seed: int = 42
    default_mc_samples: int = 200_000
    verify_configs: int = 50

    @field_validator("beta_max")
    @classmethod
    def _beta_max_in_range(cls, value: float) -> float:
        if not 0.0 < value <= math.pi:
            raise ValueError("beta_max must lie in (0, pi]")
        return value


def get_settings() -> Settings:
    return Settings()
