"""Exception hierarchy shared by every abspec module.

Each exception carries the process exit code the command line front end
reports when it escapes a subcommand: 2 for usage and configuration
problems, 3 for violated mathematical preconditions and 4 for numerical
failures.
"""


class AbspecError(Exception):
    """Base class of all abspec errors."""
    exit_code = 4


############### CONFIGURATION ###############


class ConfigurationError(AbspecError, ValueError):
    """Invalid user parameter (circulation, lists, mesh knobs...)."""
    exit_code = 2


class DomainError(AbspecError):
    """Invalid planar domain (self-intersecting, origin outside...)."""
    exit_code = 2


############### GEOMETRY ###############


class MeshError(AbspecError):
    """Mesh generation or validation failure."""


class PoleOutsideDomainError(MeshError):
    """Pole on, outside or too close to the domain boundary."""
    exit_code = 2


class DegenerateElementError(MeshError):
    """Triangle with (numerically) zero area.

    Args:
        element_id (int): Index of the offending triangle.
        message (str): Human readable explanation.
    """

    def __init__(self, element_id, message=None):
        self.element_id = element_id
        super().__init__(
            message or 'degenerate triangle %d after grading' % element_id)


class OutOfDomainError(AbspecError):
    """Field evaluated outside the mesh it lives on."""


############### GAUGE ###############


class SingularityError(AbspecError):
    """Evaluation at the pole (or at the origin for origin-centered angles)."""


class CutError(AbspecError):
    """Evaluation of the gauge phase on the open segment between 0 and a."""


############### ASSEMBLY / EIGENSOLVE ###############


class AssemblyError(AbspecError):
    """Mesh and pole mismatch or quadrature point at the pole."""


class EigenSolverError(AbspecError):
    """Eigensolver did not reach the requested residual.

    Args:
        message (str): Explanation.
        residuals (array-like): Best relative residuals reached.
    """

    def __init__(self, message, residuals=None):
        self.residuals = residuals
        super().__init__(message)


class MassMatrixError(EigenSolverError):
    """Mass matrix is not positive definite."""


class SimplicityError(AbspecError):
    """Target eigenvalue is not simple.

    Args:
        message (str): Explanation.
        abs_a (float): Pole distance of the failing sample.
    """
    exit_code = 3

    def __init__(self, message, abs_a=None):
        self.abs_a = abs_a
        super().__init__(message)


class PhaseAmbiguityError(AbspecError):
    """Overlap integral too small to fix an eigenfunction phase."""
    exit_code = 3


############### ORACLE ###############


class OracleError(AbspecError):
    """Bessel evaluation outside the supported range."""


class BracketError(OracleError):
    """No sign change found while bracketing a Bessel zero."""


############### SPECTRAL / ALMGREN ###############


class UnderResolvedError(AbspecError):
    """Circle radius below the local mesh resolution."""


class BetaSpreadError(AbspecError):
    """beta_j(R) depends on R beyond tolerance."""


class DegenerateFieldError(AbspecError):
    """No Fourier mode above the detection threshold."""


class WindowError(AbspecError, ValueError):
    """Radius grid outside the admissible window."""
    exit_code = 2


class PositivityError(AbspecError):
    """H(u, r) fell below the positivity floor."""


############### ASYMPTOTICS ###############


class RateFitError(AbspecError):
    """Not enough usable samples for a rate fit."""
    exit_code = 2


class ProfileTruncationError(AbspecError):
    """Limit-profile tail does not decrease when the truncation doubles."""


class QuadratureError(AbspecError):
    """Quadrature produced an inconsistent result (e.g. non-monotone F)."""
