import math
import numbers
from fractions import Fraction
import BootAgg
from .Exceptions import DomainError
from .SpecialFunctions import SpecialFunctions, BetaParams

class CoverageSpec:
    """
    Number of sample images and significance level used for inference
    about a predetermined region.

    :param n: Number of sample images, a positive integer.
    :param alpha: Significance level in the open interval (0, 1).
    """
    DEFAULT_ALPHA = 0.05

    def __init__(self, n, alpha=DEFAULT_ALPHA):
        self.n = Coverage.check_count(n)
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1), got "+repr(alpha))
        self.alpha = alpha


class RegionInferenceResult:
    """
    Result of Jeffreys inference on the proportion of sample images
    that leave a predetermined region empty.
    """
    def __init__(self, z, n, alpha, jeffreys_lower, jeffreys_mean, jeffreys_upper):
        self.z              = z
        self.n              = n
        self.alpha          = alpha
        self.jeffreys_lower = jeffreys_lower
        self.jeffreys_mean  = jeffreys_mean
        self.jeffreys_upper = jeffreys_upper

    def __repr__(self):
        return "<RegionInferenceResult z="+str(self.z)+" n="+str(self.n)+" lower="+repr(self.jeffreys_lower)+" mean="+repr(self.jeffreys_mean)+">"


class Coverage:
    """
    Distribution-free coverage arithmetic. The range of *n* exchangeable
    continuous draws covers a fresh draw with probability (n-1)/(n+1),
    and the proportion of images that leave a region empty can be
    bounded with a Jeffreys interval.

    The Jeffreys bounds are only valid for regions chosen before looking
    at the aggregate image. Nothing here can check that; it is up to the
    caller.
    """

    @staticmethod
    def check_count(n):
        if isinstance(n, bool) or not isinstance(n, numbers.Integral):
            if isinstance(n, float) and n.is_integer():
                n = int(n)
            else:
                raise DomainError("The number of images must be an integer, got "+repr(n))
        n = int(n)
        if n < 1:
            raise DomainError("The number of images must be at least 1, got "+str(n))
        return n

    @staticmethod
    def implied_coverage(n):
        """
        :param n: Number of sample images.
        :returns: The exact coverage (n-1)/(n+1) of the observed range as a ``fractions.Fraction``.
        """
        n = Coverage.check_count(n)
        return Fraction(n - 1, n + 1)

    @staticmethod
    def required_n(c):
        """
        Smallest number of images whose range reaches coverage *c*.

        The computation is carried out on the exact decimal value of *c*,
        so coverages like 0.9 or 0.95 where (c+1)/(1-c) is an integer
        return that integer rather than the next one up.

        :param c: Target coverage in [0, 1).
        :returns: ceil((c+1)/(1-c)) as an *int*.
        """
        if isinstance(c, Fraction):
            exact = c
        else:
            try:
                if isinstance(c, float) and not math.isfinite(c):
                    raise ValueError()
                exact = Fraction(str(c))
            except (ValueError, TypeError):
                raise DomainError("Coverage must be a real number, got "+repr(c))

        if exact < 0 or exact >= 1:
            raise DomainError("Coverage must lie in [0, 1), got "+str(c))

        bound = (exact + 1) / (1 - exact)
        return max(1, math.ceil(bound))

    @staticmethod
    def jeffreys_mean(n):
        """
        :returns: The posterior mean (n+1/2)/(n+1) of the full-occupancy proportion.
        """
        n = Coverage.check_count(n)
        return (n + 0.5) / (n + 1.0)

    @staticmethod
    def jeffreys_interval(z, spec):
        """
        Jeffreys inference for the proportion of images in which a
        predetermined region stays empty, from the Beta(z+1/2, n-z+1/2)
        posterior.

        When *z* equals *n* the interval is [Q_Beta(n, alpha), 1], the
        case that matters for aggregate images. When *z* is 0 the lower
        bound is pinned to 0, as in the modified Jeffreys interval.

        :param z: Number of images with an empty region.
        :param spec: A :ref:`BootAgg.CoverageSpec<api-coveragespec>` instance.
        :returns: A :ref:`BootAgg.RegionInferenceResult<api-regioninferenceresult>`.
        """
        if isinstance(z, bool) or not isinstance(z, numbers.Integral):
            raise DomainError("z must be an integer, got "+repr(z))
        z = int(z)
        n = spec.n
        if z < 0 or z > n:
            raise DomainError("z must lie in [0, "+str(n)+"], got "+str(z))

        posterior = BetaParams(z + 0.5, n - z + 0.5)
        if z == 0:
            lower = 0.0
        else:
            lower = SpecialFunctions.beta_quantile(spec.alpha, posterior)

        if z == n:
            upper = 1.0
        else:
            upper = SpecialFunctions.beta_quantile(1.0 - spec.alpha, posterior)

        mean = (z + 0.5) / (n + 1.0)
        BootAgg.log("Jeffreys interval for z="+str(z)+", n="+str(n)+": ["+repr(lower)+", "+repr(upper)+"]", BootAgg.LOG_DEBUG)

        return RegionInferenceResult(z, n, spec.alpha, lower, mean, upper)

    @staticmethod
    def table_row(n, alpha=CoverageSpec.DEFAULT_ALPHA):
        """
        :returns: A *dict* with the sample size, implied coverage, Jeffreys mean and Jeffreys lower bound at full occupancy.
        """
        spec = CoverageSpec(n, alpha)
        return {
            "n": spec.n,
            "implied_coverage": Coverage.implied_coverage(spec.n),
            "jeffreys_mean": Coverage.jeffreys_mean(spec.n),
            "jeffreys_lower": Coverage.jeffreys_interval(spec.n, spec).jeffreys_lower,
            "alpha": spec.alpha,
        }
