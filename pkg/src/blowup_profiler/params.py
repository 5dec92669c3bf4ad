"""Parameter records shared by all modules."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ProfileParams:
    """Parameters (d, sigma, eps, delta, kappa, omega) of one profile problem.

    d is the space dimension, sigma the nonlinearity strength, eps and
    delta the dissipation parameters, kappa and omega the self-similar
    rates.  The supercritical condition 2/d < sigma is assumed
    throughout; ``validate`` enforces it together with kappa > 0.
    """

    d: int
    sigma: float
    eps: float
    delta: float
    kappa: float
    omega: float

    def validate(self) -> None:
        if self.d not in (1, 2, 3):
            raise ValueError(f"d must be 1, 2 or 3, got {self.d}")
        if not 2.0 / self.d < self.sigma:
            raise ValueError(
                f"supercritical condition 2/d < sigma violated: "
                f"2/{self.d} >= {self.sigma}"
            )
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.eps < 0 or self.delta < 0:
            raise ValueError("eps and delta must be nonnegative")

    def with_rates(self, kappa: float, omega: float) -> "ProfileParams":
        return replace(self, kappa=kappa, omega=omega)

    def with_eps(self, eps: float, delta: float) -> "ProfileParams":
        return replace(self, eps=eps, delta=delta)
