import sys
import math
import BootAgg
from .Exceptions import DomainError, ConvergenceError

class BetaParams:
    """
    Shape parameters of a Beta distribution.

    :param a: First shape parameter, a positive real.
    :param b: Second shape parameter, a positive real.
    """
    def __init__(self, a, b):
        a = float(a)
        b = float(b)
        if not a > 0 or not b > 0 or math.isinf(a) or math.isinf(b):
            raise DomainError("Beta shape parameters must be positive and finite, got a="+str(a)+", b="+str(b))
        self.a = a
        self.b = b

    def reflected(self):
        return BetaParams(self.b, self.a)

    def __eq__(self, other):
        return isinstance(other, BetaParams) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return "BetaParams(a="+repr(self.a)+", b="+repr(self.b)+")"


class SpecialFunctions:
    """
    The numeric kernel behind the intensity transform and the Jeffreys
    bounds: the regularized incomplete beta function and its inverse.
    All methods are pure and may be called from any thread.
    """

    EPSILON        = sys.float_info.epsilon
    FPMIN          = sys.float_info.min / EPSILON
    CF_MAX_TERMS   = 10000
    CF_TOLERANCE   = 1e-15

    QUANTILE_TOLERANCE  = 1e-10
    QUANTILE_MAX_ITER   = 200
    # Residual at which the quantile search stops early. Kept well
    # below QUANTILE_TOLERANCE so round trips stay comfortably inside it.
    QUANTILE_RESIDUAL   = 1e-13

    @staticmethod
    def log_beta(params):
        """
        :param params: A :ref:`BootAgg.BetaParams<api-betaparams>` instance.
        :returns: The natural logarithm of the complete Beta function B(a, b).
        """
        return math.lgamma(params.a) + math.lgamma(params.b) - math.lgamma(params.a + params.b)

    @staticmethod
    def reg_inc_beta(x, params):
        """
        Evaluates the regularized incomplete beta function I_x(a, b), the
        CDF of the Beta(a, b) distribution at *x*.

        :param x: A real number in the closed interval [0, 1].
        :param params: A :ref:`BootAgg.BetaParams<api-betaparams>` instance.
        :returns: I_x(a, b) as a *float* in [0, 1].
        :raises: ``BootAgg.DomainError`` if *x* lies outside [0, 1].
        """
        x = SpecialFunctions.__check_unit(x, "x")
        if not isinstance(params, BetaParams):
            raise DomainError("Expected BetaParams, got "+str(type(params)))

        if x == 0.0:
            return 0.0
        if x == 1.0:
            return 1.0

        a = params.a
        b = params.b
        y = 1.0 - x

        # The continued fraction converges rapidly only below the
        # mean-ish split point; above it, evaluate the reflected
        # function I_{1-x}(b, a) instead.
        front = math.exp(SpecialFunctions.__log_prefactor(a, b, x, y, params))
        if x < (a + 1.0) / (a + b + 2.0):
            value = front * SpecialFunctions.__continued_fraction(a, b, x) / a
        else:
            value = 1.0 - front * SpecialFunctions.__continued_fraction(b, a, y) / b

        return min(1.0, max(0.0, value))

    @staticmethod
    def beta_pdf(x, params):
        x = SpecialFunctions.__check_unit(x, "x")
        a = params.a
        b = params.b
        if x == 0.0:
            if a < 1.0:
                return math.inf
            return 1.0 / math.exp(SpecialFunctions.log_beta(params)) if a == 1.0 else 0.0
        if x == 1.0:
            if b < 1.0:
                return math.inf
            return 1.0 / math.exp(SpecialFunctions.log_beta(params)) if b == 1.0 else 0.0

        return math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - SpecialFunctions.log_beta(params))

    @staticmethod
    def beta_quantile(p, params):
        """
        Inverts the Beta CDF. Uses Newton steps on the CDF, safeguarded by
        a shrinking bisection bracket, so every iteration either takes a
        Newton step that stays inside the bracket or halves it.

        :param p: Probability in the closed interval [0, 1].
        :param params: A :ref:`BootAgg.BetaParams<api-betaparams>` instance.
        :returns: x such that I_x(a, b) = p within 1e-10.
        :raises: ``BootAgg.DomainError`` for invalid *p*, ``BootAgg.ConvergenceError`` if the iteration budget is exhausted.
        """
        p = SpecialFunctions.__check_unit(p, "p")
        if not isinstance(params, BetaParams):
            raise DomainError("Expected BetaParams, got "+str(type(params)))

        if p == 0.0:
            return 0.0
        if p == 1.0:
            return 1.0

        lo = 0.0
        hi = 1.0
        x = params.a / (params.a + params.b)
        best_x = x
        best_residual = math.inf

        for iteration in range(SpecialFunctions.QUANTILE_MAX_ITER):
            residual = SpecialFunctions.reg_inc_beta(x, params) - p
            if abs(residual) < best_residual:
                best_residual = abs(residual)
                best_x = x

            if abs(residual) <= SpecialFunctions.QUANTILE_RESIDUAL:
                return x

            if residual < 0.0:
                lo = x
            else:
                hi = x

            if hi - lo <= 2.0 * SpecialFunctions.EPSILON * hi:
                # The bracket has collapsed to adjacent floats, no
                # representable x does better than the best seen.
                if best_residual <= SpecialFunctions.QUANTILE_TOLERANCE:
                    return best_x
                break

            density = SpecialFunctions.beta_pdf(x, params)
            candidate = None
            if density > 0.0 and math.isfinite(density):
                candidate = x - residual / density

            if candidate == None or not (lo < candidate < hi):
                candidate = 0.5 * (lo + hi)

            x = candidate

        if best_residual <= SpecialFunctions.QUANTILE_TOLERANCE:
            return best_x

        raise ConvergenceError(
            "Beta quantile did not converge for p="+repr(p)+" and "+repr(params)+
            " after "+str(SpecialFunctions.QUANTILE_MAX_ITER)+" iterations (residual "+repr(best_residual)+")"
        )

    @staticmethod
    def __check_unit(value, name):
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise DomainError(name+" must be a real number, got "+repr(value))
        if math.isnan(value) or value < 0.0 or value > 1.0:
            raise DomainError(name+" must lie in [0, 1], got "+repr(value))
        return value

    @staticmethod
    def __log_prefactor(a, b, x, y, params):
        # log( x^a * (1-x)^b / B(a,b) ), kept in log space so the
        # large-shape Jeffreys posteriors do not overflow.
        return a * math.log(x) + b * math.log(y) - SpecialFunctions.log_beta(params)

    @staticmethod
    def __continued_fraction(a, b, x):
        # Modified Lentz evaluation of the incomplete beta continued
        # fraction.
        fpmin = SpecialFunctions.FPMIN
        qab = a + b
        qap = a + 1.0
        qam = a - 1.0

        c = 1.0
        d = 1.0 - qab * x / qap
        if abs(d) < fpmin:
            d = fpmin
        d = 1.0 / d
        h = d

        for m in range(1, SpecialFunctions.CF_MAX_TERMS + 1):
            m2 = 2 * m

            aa = m * (b - m) * x / ((qam + m2) * (a + m2))
            d = 1.0 + aa * d
            if abs(d) < fpmin:
                d = fpmin
            c = 1.0 + aa / c
            if abs(c) < fpmin:
                c = fpmin
            d = 1.0 / d
            h *= d * c

            aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
            d = 1.0 + aa * d
            if abs(d) < fpmin:
                d = fpmin
            c = 1.0 + aa / c
            if abs(c) < fpmin:
                c = fpmin
            d = 1.0 / d
            delta = d * c
            h *= delta

            if abs(delta - 1.0) <= SpecialFunctions.CF_TOLERANCE:
                return h

        BootAgg.log("Incomplete beta continued fraction exhausted "+str(SpecialFunctions.CF_MAX_TERMS)+" terms for a="+repr(a)+", b="+repr(b)+", x="+repr(x), BootAgg.LOG_ERROR)
        raise ConvergenceError("Continued fraction for the incomplete beta function did not converge for a="+repr(a)+", b="+repr(b)+", x="+repr(x))
