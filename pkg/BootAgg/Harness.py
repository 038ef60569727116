import math
import numbers
import numpy as np
import BootAgg
from scipy import stats
from concurrent.futures import ThreadPoolExecutor
from .Coverage import Coverage, CoverageSpec
from .Resampling import Resampling, Dataset
from .Raster import RenderSpec
from .Aggregation import Aggregation, ImageStack
from .Renderers.Renderer import Renderer
from .Exceptions import DomainError

class ScalarDistribution:
    """
    The law of a scalar statistic used to drive coverage simulations,
    backed by a frozen ``scipy.stats`` distribution. Create instances
    with the family constructors :func:`normal`, :func:`uniform`,
    :func:`exponential`, :func:`discrete` and :func:`point`.
    """
    NORMAL      = "normal"
    UNIFORM     = "uniform"
    EXPONENTIAL = "exponential"
    DISCRETE    = "discrete"

    PROBABILITY_TOLERANCE = 1e-9

    def __init__(self, kind, parameters, law):
        self.kind = kind
        self.parameters = parameters
        self.law = law

    @staticmethod
    def normal(mu=0.0, sigma=1.0):
        mu, sigma = float(mu), float(sigma)
        if not (math.isfinite(mu) and math.isfinite(sigma) and sigma > 0):
            raise DomainError("Normal distribution needs finite mu and positive sigma, got "+repr((mu, sigma)))
        return ScalarDistribution(ScalarDistribution.NORMAL, {"mu": mu, "sigma": sigma}, stats.norm(loc=mu, scale=sigma))

    @staticmethod
    def uniform(a=0.0, b=1.0):
        a, b = float(a), float(b)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise DomainError("Uniform distribution needs finite a < b, got "+repr((a, b)))
        return ScalarDistribution(ScalarDistribution.UNIFORM, {"a": a, "b": b}, stats.uniform(loc=a, scale=b - a))

    @staticmethod
    def exponential(rate=1.0):
        rate = float(rate)
        if not (math.isfinite(rate) and rate > 0):
            raise DomainError("Exponential distribution needs a positive rate, got "+repr(rate))
        return ScalarDistribution(ScalarDistribution.EXPONENTIAL, {"rate": rate}, stats.expon(scale=1.0 / rate))

    @staticmethod
    def discrete(values, probs):
        values = np.array(values, dtype=np.float64)
        probs = np.array(probs, dtype=np.float64)
        if len(values) == 0 or values.shape != probs.shape:
            raise DomainError("Discrete distribution needs one probability per value")
        if not np.all(np.isfinite(values)) or np.any(probs < 0) or abs(probs.sum() - 1.0) > ScalarDistribution.PROBABILITY_TOLERANCE:
            raise DomainError("Discrete probabilities must be non-negative and sum to 1, got "+str(probs.tolist()))
        order = np.argsort(values, kind="stable")
        values, probs = values[order], probs[order] / probs.sum()

        # scipy discrete laws live on the integers, so the law is over
        # positions into the sorted values.
        law = stats.rv_discrete(values=(np.arange(len(values)), probs))
        return ScalarDistribution(ScalarDistribution.DISCRETE, {"values": values, "probs": probs}, law)

    @staticmethod
    def point(value):
        return ScalarDistribution.discrete([value], [1.0])

    @property
    def continuous(self):
        return self.kind != ScalarDistribution.DISCRETE

    def sample(self, generator, size):
        """
        :param generator: A ``numpy.random.Generator``.
        :returns: *size* independent draws as a float64 array.
        """
        draws = self.law.rvs(size=size, random_state=generator)
        if self.continuous:
            return np.asarray(draws, dtype=np.float64)
        return self.parameters["values"][np.asarray(draws, dtype=np.intp)]

    def cdf(self, x):
        """
        :returns: P(X <= x).
        """
        x = float(x)
        if self.continuous:
            return float(self.law.cdf(x))
        position = int(np.searchsorted(self.parameters["values"], x, side="right")) - 1
        return 0.0 if position < 0 else float(min(1.0, self.law.cdf(position)))

    def ppf(self, q):
        """
        :returns: The smallest x with P(X <= x) >= q.
        """
        q = float(q)
        if not 0.0 <= q <= 1.0:
            raise DomainError("Quantile level must lie in [0, 1], got "+repr(q))
        if self.continuous:
            return float(self.law.ppf(q))
        values = self.parameters["values"]
        position = int(self.law.ppf(max(0.0, q - ScalarDistribution.PROBABILITY_TOLERANCE)))
        return float(values[min(max(position, 0), len(values) - 1)])

    def __repr__(self):
        if self.kind == ScalarDistribution.DISCRETE:
            return "<ScalarDistribution discrete values="+str(self.parameters["values"].tolist())+">"
        return "<ScalarDistribution "+self.kind+" "+str(self.parameters)+">"


class CoverageReport:
    """
    Empirical coverage of the observed range over simulated trials.
    """
    def __init__(self, n, trials, hits, scenario="range"):
        if hits > trials:
            raise DomainError("Hits "+str(hits)+" exceed trials "+str(trials))
        self.scenario     = scenario
        self.n            = n
        self.trials       = trials
        self.hits         = hits
        self.estimate     = hits / trials
        self.theoretical  = float(Coverage.implied_coverage(n))
        self.mc_std_error = math.sqrt(self.estimate * (1.0 - self.estimate) / trials)

    def as_lines(self):
        """
        :returns: A *list* of ``name=value`` strings, one metric per line.
        """
        return [
            "scenario="+self.scenario,
            "n="+str(self.n),
            "trials="+str(self.trials),
            "hits="+str(self.hits),
            "estimate="+repr(self.estimate),
            "theoretical="+repr(self.theoretical),
            "mc_std_error="+repr(self.mc_std_error),
        ]

    def as_table(self):
        header = ["n", "trials", "hits", "estimate", "theoretical", "mc_std_error"]
        values = [
            str(self.n), str(self.trials), str(self.hits),
            BootAgg.prettyfraction(self.estimate), BootAgg.prettyfraction(self.theoretical),
            BootAgg.prettyfraction(self.mc_std_error, 5),
        ]
        return Harness.format_table(header, [values])

    def __repr__(self):
        return "<CoverageReport "+self.scenario+" n="+str(self.n)+" estimate="+repr(self.estimate)+">"


class RegionInferenceReport:
    """
    Frequentist check of the Jeffreys lower bound for the probability
    that a predetermined region stays empty.

    ``frequency`` is the share of all trials whose lower bound did not
    exceed the true probability. The trials in which every image left
    the region empty are counted in ``full_trials``, with their share of
    valid bounds in ``full_frequency``. ``exact_coverage`` is the exact
    Binomial coverage the simulated ``frequency`` estimates.
    """
    def __init__(self, n, alpha, trials, valid, full_trials, full_valid, p_true, lower_at_full, exact_coverage):
        self.n              = n
        self.alpha          = alpha
        self.trials         = trials
        self.valid          = valid
        self.frequency      = valid / trials
        self.mc_std_error   = math.sqrt(self.frequency * (1.0 - self.frequency) / trials)
        self.full_trials    = full_trials
        self.full_valid     = full_valid
        self.full_frequency = full_valid / full_trials if full_trials > 0 else None
        self.p_true         = p_true
        self.lower_at_full  = lower_at_full
        self.exact_coverage = exact_coverage

    def as_lines(self):
        return [
            "scenario=region",
            "n="+str(self.n),
            "alpha="+repr(self.alpha),
            "trials="+str(self.trials),
            "valid="+str(self.valid),
            "frequency="+repr(self.frequency),
            "mc_std_error="+repr(self.mc_std_error),
            "full_trials="+str(self.full_trials),
            "full_valid="+str(self.full_valid),
            "full_frequency="+("none" if self.full_frequency == None else repr(self.full_frequency)),
            "p_true="+repr(self.p_true),
            "lower_at_full="+repr(self.lower_at_full),
            "exact_coverage="+repr(self.exact_coverage),
        ]

    def as_table(self):
        header = ["n", "alpha", "trials", "frequency", "exact", "full_trials", "lower_at_full", "p_true"]
        values = [
            str(self.n), str(self.alpha), str(self.trials),
            BootAgg.prettyfraction(self.frequency), BootAgg.prettyfraction(self.exact_coverage),
            str(self.full_trials), BootAgg.prettyfraction(self.lower_at_full), BootAgg.prettyfraction(self.p_true),
        ]
        return Harness.format_table(header, [values])


class Harness:
    """
    Monte Carlo validation of the coverage guarantees, both for plain
    scalar statistics and for the full resample, render and aggregate
    pipeline.

    Every trial draws from its own stream derived from the seed and the
    trial index, so results do not depend on the number of workers or
    the order in which trials finish.
    """
    RANGE    = "range"
    PIPELINE = "pipeline"
    REGION   = "region"
    SCENARIOS = [RANGE, PIPELINE, REGION]

    DEFAULT_SAMPLE_SIZE = 30

    @staticmethod
    def check_trials(trials):
        if isinstance(trials, bool) or not isinstance(trials, numbers.Integral) or trials < 1:
            raise DomainError("The number of trials must be a positive integer, got "+repr(trials))
        return int(trials)

    @staticmethod
    def __run_trials(trial, trials, workers):
        if workers > 1 and trials > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                return list(executor.map(trial, range(trials)))
        return [trial(t) for t in range(trials)]

    @staticmethod
    def simulate_range_coverage(dist, n, trials, rng, workers=1):
        """
        Draws *n* values per trial, forms the closed range [min, max] and
        checks whether one further independent draw falls inside it.

        :param dist: A :ref:`BootAgg.ScalarDistribution<api-scalardistribution>`.
        :param n: Number of draws forming the range, at least 2.
        :param rng: A :ref:`BootAgg.SeededRng<api-seededrng>`.
        :returns: A :ref:`BootAgg.CoverageReport<api-coveragereport>`.
        """
        if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 2:
            raise DomainError("The range needs at least 2 draws, got "+repr(n))
        trials = Harness.check_trials(trials)

        def trial(t):
            draws = dist.sample(rng.derive(t), n + 1)
            return bool(draws[:n].min() <= draws[n] <= draws[:n].max())

        hits = sum(Harness.__run_trials(trial, trials, workers))
        report = CoverageReport(n, trials, hits, Harness.RANGE)
        BootAgg.log("Range coverage for n="+str(n)+": "+str(hits)+"/"+str(trials), BootAgg.LOG_VERBOSE)
        return report

    @staticmethod
    def simulate_pipeline_coverage(generator, n, trials, frame, spec, rng, sample_size=DEFAULT_SAMPLE_SIZE, workers=1):
        """
        Runs the whole pipeline per trial: synthesizes a dataset from
        *generator*, draws n+1 bootstrap resamples, renders the first *n*
        and reads the observed interval of mark centres off the stack.
        The last resample plays the fresh draw, and the trial is a hit
        when its mark centre column lies inside the interval.

        :param generator: A :ref:`BootAgg.ScalarDistribution<api-scalardistribution>` for the synthetic data.
        :param frame: The :ref:`BootAgg.PlotFrame<api-plotframe>`.
        :param spec: A point estimate :ref:`BootAgg.RenderSpec<api-renderspec>`.
        :param sample_size: Rows per synthesized dataset.
        :returns: A :ref:`BootAgg.CoverageReport<api-coveragereport>`.
        """
        if spec.kind != RenderSpec.POINT_ESTIMATE:
            raise DomainError("Pipeline coverage needs a point estimate renderer, got \""+str(spec.kind)+"\"")
        if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 2:
            raise DomainError("The range needs at least 2 images, got "+repr(n))
        if sample_size < 1:
            raise DomainError("Sample size must be positive, got "+str(sample_size))
        trials = Harness.check_trials(trials)

        renderer = Renderer.for_spec(frame, spec)
        radius = spec.mark_size - 1

        def trial(t):
            trial_rng = rng.spawn(t)
            values = generator.sample(trial_rng.derive(0), sample_size)
            data = Dataset.from_columns({spec.column: values.tolist()})
            resamples = Resampling.resample_stream(data, n + 1, trial_rng.spawn(1))

            try:
                lo, hi = Aggregation.observed_interval(renderer.render_stack(resamples[:n], data), Aggregation.HORIZONTAL, frame.background)
                fresh_lo, fresh_hi = Aggregation.observed_interval(ImageStack([renderer.render(resamples[n], data)]), Aggregation.HORIZONTAL, frame.background)
            except DomainError:
                BootAgg.log("Marks of trial "+str(t)+" fell outside the frame, counted as a miss", BootAgg.LOG_DEBUG)
                return False

            fresh = (fresh_lo + fresh_hi) // 2
            return lo + radius <= fresh <= hi - radius

        hits = sum(Harness.__run_trials(trial, trials, workers))
        BootAgg.log("Pipeline coverage for n="+str(n)+": "+str(hits)+"/"+str(trials), BootAgg.LOG_VERBOSE)
        return CoverageReport(n, trials, hits, Harness.PIPELINE)

    @staticmethod
    def simulate_region_inference(dist, n, threshold, trials, rng, alpha=CoverageSpec.DEFAULT_ALPHA, workers=1):
        """
        Treats "statistic > threshold" as a predetermined region. An
        image leaves it empty when its statistic is at most *threshold*,
        so Z counts such draws among *n*. Each trial computes the Jeffreys
        lower bound for Z and checks it against the true probability
        P(statistic <= threshold).

        :returns: A :ref:`BootAgg.RegionInferenceReport<api-regioninferencereport>`.
        """
        spec = CoverageSpec(n, alpha)
        trials = Harness.check_trials(trials)
        p_true = dist.cdf(threshold)
        lowers = Harness.jeffreys_lowers(spec)

        def trial(t):
            z = int(np.count_nonzero(dist.sample(rng.derive(t), spec.n) <= threshold))
            return z, lowers[z] <= p_true

        outcomes = Harness.__run_trials(trial, trials, workers)
        valid = sum(1 for z, ok in outcomes if ok)
        full_trials = sum(1 for z, ok in outcomes if z == spec.n)
        full_valid = sum(1 for z, ok in outcomes if z == spec.n and ok)

        report = RegionInferenceReport(
            spec.n, spec.alpha, trials, valid, full_trials, full_valid, p_true,
            lowers[spec.n], Harness.exact_jeffreys_coverage(spec.n, p_true, spec.alpha)
        )
        BootAgg.log("Region inference for n="+str(spec.n)+": "+str(valid)+"/"+str(trials)+" valid bounds", BootAgg.LOG_VERBOSE)
        return report

    @staticmethod
    def jeffreys_lowers(spec):
        """
        :returns: The Jeffreys lower bound for every z in 0..n.
        """
        return [Coverage.jeffreys_interval(z, spec).jeffreys_lower for z in range(spec.n + 1)]

    @staticmethod
    def exact_jeffreys_coverage(n, p, alpha=CoverageSpec.DEFAULT_ALPHA):
        """
        The exact probability, under Z ~ Binomial(n, p), that the Jeffreys
        lower bound for Z does not exceed *p*.
        """
        spec = CoverageSpec(n, alpha)
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise DomainError("Probability must lie in [0, 1], got "+repr(p))

        lowers = np.array(Harness.jeffreys_lowers(spec))
        pmf = stats.binom(spec.n, p).pmf(np.arange(spec.n + 1))
        return float(min(1.0, pmf[lowers <= p].sum()))

    @staticmethod
    def format_table(header, rows):
        widths = [max(len(h), *(len(r[j]) for r in rows)) for j, h in enumerate(header)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
        lines.append("  ".join("-" * w for w in widths))
        for row in rows:
            lines.append("  ".join(v.rjust(w) for v, w in zip(row, widths)))
        return "\n".join(lines)
