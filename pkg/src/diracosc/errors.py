"""Exception types shared across the solver suite."""


class DiracOscError(Exception):
    """Base class for all diracosc errors."""


class ProfileDomainError(DiracOscError):
    """Profile evaluated outside its tabulated range."""


class ProfileSingularityError(DiracOscError):
    """Derivative requested at a point where the profile is not differentiable."""


class SupercriticalError(DiracOscError):
    """Couplings at or beyond the critical electric-field strength.

    Carries the critical value sqrt(kappa_f^2 + kappa_m^2) so callers can
    report how far over the line the request was.
    """

    def __init__(self, kappa_v, critical):
        self.kappa_v = kappa_v
        self.critical = critical
        super().__init__(
            f"|kappa_v| = {abs(kappa_v):g} is not below the critical field "
            f"{critical:g}; the reduced problem is degenerate or complex"
        )


class DegenerateSpinorError(DiracOscError):
    """A spinor component relation divides by (numerically) zero."""


class ConstraintError(DiracOscError):
    """Closed-form family parameters violate a stated constraint."""


class ZeroOutputError(DiracOscError):
    """The spinor-reconstruction operator annihilated its input.

    Happens for the zero-energy supersymmetric ground state; the caller
    should build that state directly from the first-order equation instead.
    """


class ConstructionFailedError(DiracOscError):
    """A zero-mode construction found no eigenvalue where one was required.

    The offending spectrum is attached for diagnosis.
    """

    def __init__(self, message, spectrum=None):
        self.spectrum = spectrum
        super().__init__(message)


class ConfigError(DiracOscError):
    """Malformed or inconsistent run configuration."""
