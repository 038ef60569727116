import os
import numpy as np
from configobj import ConfigObj, ConfigObjError
import BootAgg
from .Coverage import Coverage, CoverageSpec
from .Resampling import Resampling, SeededRng
from .Raster import Raster, PlotFrame, RenderSpec
from .Aggregation import Aggregation, ImageStack, TransformParams
from .Harness import Harness, ScalarDistribution
from .Renderers.Renderer import Renderer
from .Renderers.ExternalRenderer import ExternalRenderer, RendererCommand
from .Exceptions import ConfigError, DomainError

class RunConfig:
    """
    Everything one bootstrap visualization run needs. Exactly one of
    *renderer_command* and *render_spec* selects the renderer, and
    exactly one of *n* and *coverage* sets the number of images.

    :param dataset: Path of the comma-separated dataset.
    :param output: Path of the aggregated PNG.
    :param renderer_command: External renderer command template, see :ref:`BootAgg.RendererCommand<api-renderercommand>`.
    :param render_spec: A :ref:`BootAgg.RenderSpec<api-renderspec>` for a built-in renderer.
    :param n: Number of bootstrap images.
    :param coverage: Target coverage of the observed range. The smallest sufficient *n* is used.
    :param frame: Optional :ref:`BootAgg.PlotFrame<api-plotframe>`. Derived from the full dataset when omitted.
    :param keep_stack: Optional directory receiving every rendered image.
    """
    def __init__(self, dataset, output, renderer_command=None, render_spec=None, n=None, coverage=None,
                 seed=None, width=900, height=450, transform=None, parallelism=1, memory_cap=Aggregation.DEFAULT_MEMORY_CAP,
                 keep_stack=None, frame=None, timeout=RendererCommand.DEFAULT_TIMEOUT, working_directory=None):
        self.dataset           = dataset
        self.output            = output
        self.renderer_command  = renderer_command
        self.render_spec       = render_spec
        self.n                 = n
        self.coverage          = coverage
        self.seed              = seed
        self.width             = width
        self.height            = height
        self.transform         = transform if transform != None else TransformParams()
        self.parallelism       = parallelism
        self.memory_cap        = memory_cap
        self.keep_stack        = keep_stack
        self.frame             = frame
        self.timeout           = timeout
        self.working_directory = working_directory

    def validate(self):
        if (self.renderer_command == None) == (self.render_spec == None):
            raise ConfigError("Exactly one of a renderer command and a built-in renderer must be given")
        if (self.n == None) == (self.coverage == None):
            raise ConfigError("Exactly one of n and coverage must be given")
        if self.n != None and (isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1):
            raise ConfigError("n must be a positive integer, got "+repr(self.n))
        if self.parallelism < 1:
            raise ConfigError("Parallelism must be at least 1, got "+str(self.parallelism))
        if self.memory_cap < 0:
            raise ConfigError("Memory cap must not be negative, got "+str(self.memory_cap))
        if self.width < 1 or self.height < 1:
            raise ConfigError("Image size must be positive, got "+str(self.width)+"x"+str(self.height))
        if self.frame != None and self.frame.size != (self.width, self.height):
            raise ConfigError("Frame size "+str(self.frame.size)+" differs from image size "+str((self.width, self.height)))

    def resolved_n(self):
        if self.n != None:
            return self.n
        return Coverage.required_n(self.coverage)

    def echo(self):
        """
        :returns: A *list* of ``name=value`` lines with every effective parameter.
        """
        lines = [
            "dataset="+str(self.dataset),
            "output="+str(self.output),
            "seed="+str(self.seed),
            "coverage="+("none" if self.coverage == None else str(self.coverage)),
            "width="+str(self.width),
            "height="+str(self.height),
            "transform="+("on" if self.transform.enabled else "off"),
            "k="+repr(self.transform.k),
            "tau="+repr(self.transform.tau),
            "tie_break="+self.transform.tie_break,
            "parallelism="+str(self.parallelism),
            "memory_cap="+str(self.memory_cap),
            "keep_stack="+("none" if self.keep_stack == None else str(self.keep_stack)),
        ]
        if self.renderer_command != None:
            lines.append("renderer="+self.renderer_command)
            lines.append("timeout="+repr(float(self.timeout)))
        else:
            lines.append("renderer=builtin:"+self.render_spec.kind)
        if self.frame != None:
            lines.append("xlim="+repr(self.frame.x_min)+","+repr(self.frame.x_max))
            lines.append("ylim="+repr(self.frame.y_min)+","+repr(self.frame.y_max))
        return lines


class RunResult:
    """
    Outcome of a run: the number of images with the coverage it implies,
    and the aggregated image.
    """
    def __init__(self, n, image, aggregate, output=None, stack_paths=None):
        self.n                = n
        self.implied_coverage = Coverage.implied_coverage(n)
        self.jeffreys_mean    = Coverage.jeffreys_mean(n)
        self.image            = image
        self.aggregate        = aggregate
        self.output           = output
        self.stack_paths      = stack_paths

    def as_lines(self):
        return [
            "n="+str(self.n),
            "implied_coverage="+BootAgg.prettyfraction(self.implied_coverage, 3),
            "jeffreys_mean="+BootAgg.prettyfraction(self.jeffreys_mean),
        ]


class Bootplot:
    """
    Entry point of BootAgg programs. A Bootplot instance loads the
    configuration file, applies its logging settings and holds the
    defaults every run starts from.

    If no configuration file exists, a commented default one is written
    and the defaults are used.

    :param configdir: Full path to a configuration directory. Defaults to ``~/.bootagg``.
    """
    configdir  = os.path.expanduser("~")+"/.bootagg"
    configpath = ""

    DEFAULT_SIMULATION_SEED = 20240917
    FRAME_MARGIN = 0.05

    def __init__(self, configdir=None):
        if configdir != None:
            self.configdir = configdir
        self.configpath = os.path.join(self.configdir, "config")

        self.seed        = None
        self.parallelism = 1
        self.memory_cap  = Aggregation.DEFAULT_MEMORY_CAP
        self.width       = 900
        self.height      = 450
        self.enabled     = True
        self.k           = TransformParams.DEFAULT_K
        self.tau         = TransformParams.DEFAULT_TAU
        self.tie_break   = TransformParams.SMALLEST
        self.alpha       = CoverageSpec.DEFAULT_ALPHA
        self.timeout     = RendererCommand.DEFAULT_TIMEOUT

        if os.path.isfile(self.configpath):
            try:
                self.config = ConfigObj(self.configpath)
                BootAgg.log("Configuration loaded from "+self.configpath, BootAgg.LOG_VERBOSE)
            except ConfigObjError as e:
                BootAgg.log("Could not parse the configuration at "+self.configpath, BootAgg.LOG_ERROR)
                BootAgg.log("The contained exception was: "+str(e), BootAgg.LOG_ERROR)
                raise ConfigError("Could not parse the configuration at "+self.configpath+": "+str(e))
        else:
            BootAgg.log("Could not load config file, creating default configuration file...")
            self.__create_default_config()
            BootAgg.log("Default config file created. Make any necessary changes in "+self.configpath)

        self.__apply_config()

    def __create_default_config(self):
        self.config = ConfigObj(__default_bootagg_config__)
        self.config.filename = self.configpath
        try:
            if not os.path.isdir(self.configdir):
                os.makedirs(self.configdir)
            self.config.write()
        except OSError as e:
            BootAgg.log("Could not write default configuration to "+self.configpath+", continuing with defaults", BootAgg.LOG_WARNING)
            BootAgg.log("The contained exception was: "+str(e), BootAgg.LOG_WARNING)

    def __apply_config(self):
        try:
            if "logging" in self.config:
                for option in self.config["logging"]:
                    if option == "loglevel":
                        BootAgg.set_loglevel(self.config["logging"].as_int(option))

            if "bootagg" in self.config:
                section = self.config["bootagg"]
                for option in section:
                    if option == "seed" and str(section[option]).strip() != "":
                        self.seed = section.as_int(option)
                    if option == "parallelism":
                        self.parallelism = section.as_int(option)
                    if option == "memory_cap":
                        self.memory_cap = section.as_int(option)
                    if option == "width":
                        self.width = section.as_int(option)
                    if option == "height":
                        self.height = section.as_int(option)

            if "transform" in self.config:
                section = self.config["transform"]
                for option in section:
                    if option == "enabled":
                        self.enabled = section.as_bool(option)
                    if option == "k":
                        self.k = section.as_float(option)
                    if option == "tau":
                        self.tau = section.as_float(option)
                    if option == "tie_break":
                        self.tie_break = section[option]

            if "coverage" in self.config:
                if "alpha" in self.config["coverage"]:
                    self.alpha = self.config["coverage"].as_float("alpha")

            if "renderer" in self.config:
                if "timeout" in self.config["renderer"]:
                    self.timeout = self.config["renderer"].as_float("timeout")

        except (ValueError, TypeError) as e:
            raise ConfigError("Invalid value in configuration at "+self.configpath+": "+str(e))

        # Validates the transform options
        self.transform_params()

    def transform_params(self, seed=0, **overrides):
        """
        :returns: :ref:`BootAgg.TransformParams<api-transformparams>` from the configured defaults, with *overrides* applied.
        """
        values = {"k": self.k, "tau": self.tau, "enabled": self.enabled, "tie_break": self.tie_break}
        for key, value in overrides.items():
            if value != None:
                values[key] = value
        try:
            return TransformParams(seed=seed, **values)
        except DomainError as e:
            raise ConfigError(str(e))

    @staticmethod
    def default_seed():
        return int.from_bytes(os.urandom(8), "big")

    @staticmethod
    def default_frame(data, spec, width, height):
        """
        Derives frame bounds from the full dataset, never from a resample,
        so every image of a run shares them.
        """
        def padded(values):
            lo, hi = float(np.min(values)), float(np.max(values))
            margin = (hi - lo) * Bootplot.FRAME_MARGIN if hi > lo else max(1.0, abs(lo)) * Bootplot.FRAME_MARGIN
            return lo - margin, hi + margin

        spec.validate(data)
        if spec.kind == RenderSpec.POINT_ESTIMATE:
            x_min, x_max = padded(data.numeric_column(spec.column))
            y_min, y_max = -1.0, 1.0
        elif spec.kind in (RenderSpec.REGRESSION_LINE, RenderSpec.BIVARIATE_POINT):
            x_min, x_max = padded(data.numeric_column(spec.column))
            y_min, y_max = padded(data.numeric_column(spec.y_column))
        else:
            x_min, x_max = 0.0, 1.0
            y_min, y_max = 0.0, 1.0

        return PlotFrame(x_min, x_max, y_min, y_max, width, height)

    def run(self, config):
        """
        Resamples the dataset, renders one image per resample, aggregates
        the images and writes the result.

        :param config: A :ref:`BootAgg.RunConfig<api-runconfig>` instance.
        :returns: A :ref:`BootAgg.RunResult<api-runresult>` instance.
        """
        config.validate()
        n = config.resolved_n()
        if config.seed == None:
            config.seed = Bootplot.default_seed()
            BootAgg.log("No seed given, using "+str(config.seed), BootAgg.LOG_NOTICE)

        data = Resampling.load_dataset(config.dataset)
        rng = SeededRng(config.seed)
        resamples = Resampling.resample_stream(data, n, rng, workers=config.parallelism)

        if config.renderer_command != None:
            command = RendererCommand(config.renderer_command, config.working_directory, config.timeout)
            renderer = ExternalRenderer(command, (config.width, config.height))
        else:
            if config.frame == None:
                config.frame = Bootplot.default_frame(data, config.render_spec, config.width, config.height)
            renderer = Renderer.for_spec(config.frame, config.render_spec)

        BootAgg.log("Rendering "+str(n)+" images with "+str(renderer), BootAgg.LOG_VERBOSE)
        stack = renderer.render_stack(resamples, data, config.parallelism)

        stack_paths = None
        if config.keep_stack != None:
            stack_paths = Bootplot.write_stack(stack, config.keep_stack)

        aggregate = Aggregation.transform_aggregate(stack, config.transform, config.memory_cap, config.parallelism)
        image = Aggregation.quantize(aggregate)
        Bootplot.write_png(image, config.output)
        BootAgg.log("Aggregate of "+str(n)+" images written to "+str(config.output), BootAgg.LOG_VERBOSE)

        return RunResult(n, image, aggregate, config.output, stack_paths)

    @staticmethod
    def write_stack(stack, directory):
        if not os.path.isdir(directory):
            os.makedirs(directory)
        digits = max(4, len(str(stack.n - 1)))
        paths = []
        for index, image in enumerate(stack):
            path = os.path.join(directory, "stack_"+str(index).zfill(digits)+".png")
            Bootplot.write_png(image, path)
            paths.append(path)
        BootAgg.log("Wrote "+str(len(paths))+" stack images to "+str(directory), BootAgg.LOG_VERBOSE)
        return paths

    @staticmethod
    def write_png(image, path):
        with open(path, "wb") as file:
            file.write(Raster.encode_png(image))

    @staticmethod
    def stack_files(directory):
        """
        :returns: The PNG files of *directory* in lexicographic order of their names.
        """
        if not os.path.isdir(directory):
            raise FileNotFoundError("No such directory: "+str(directory))
        names = sorted(name for name in os.listdir(directory) if name.lower().endswith(".png"))
        if len(names) == 0:
            raise DomainError("No PNG images found in "+str(directory))
        return [os.path.join(directory, name) for name in names]

    def aggregate_directory(self, directory, output, transform=None, memory_cap=Aggregation.DEFAULT_MEMORY_CAP, parallelism=1):
        """
        Aggregates a directory of previously rendered PNGs, decoding
        their rows tile by tile.

        :returns: A :ref:`BootAgg.RunResult<api-runresult>` instance.
        """
        paths = Bootplot.stack_files(directory)
        stack = ImageStack.from_files(paths)
        if transform == None:
            transform = self.transform_params()

        aggregate = Aggregation.transform_aggregate(stack, transform, memory_cap, parallelism)
        image = Aggregation.quantize(aggregate)
        Bootplot.write_png(image, output)
        BootAgg.log("Aggregate of "+str(stack.n)+" images from "+str(directory)+" written to "+str(output), BootAgg.LOG_VERBOSE)
        return RunResult(stack.n, image, aggregate, output, paths)

    def coverage_rows(self, n=None, coverage=None, alpha=None):
        """
        :returns: A *list* of table rows as produced by :func:`BootAgg.Coverage.table_row`.
        """
        if (n == None) == (coverage == None):
            raise ConfigError("Exactly one of n and coverage must be given")
        alpha = self.alpha if alpha == None else alpha
        if n == None:
            n = Coverage.required_n(coverage)
        return [Coverage.table_row(n, alpha)]

    def simulate(self, scenario, n, trials, seed=None, distribution=None, frame=None, spec=None,
                 threshold=None, alpha=None, sample_size=Harness.DEFAULT_SAMPLE_SIZE, workers=1):
        """
        Runs one of the coverage simulations ``range``, ``pipeline`` or
        ``region`` with sensible defaults for anything not given.

        :returns: A :ref:`BootAgg.CoverageReport<api-coveragereport>` or :ref:`BootAgg.RegionInferenceReport<api-regioninferencereport>`.
        """
        if not scenario in Harness.SCENARIOS:
            raise ConfigError("Unknown scenario \""+str(scenario)+"\", valid scenarios are "+", ".join(Harness.SCENARIOS))
        rng = SeededRng(Bootplot.DEFAULT_SIMULATION_SEED if seed == None else seed)
        distribution = distribution if distribution != None else ScalarDistribution.normal()

        if scenario == Harness.RANGE:
            return Harness.simulate_range_coverage(distribution, n, trials, rng, workers)

        elif scenario == Harness.PIPELINE:
            if frame == None:
                frame = PlotFrame(-1.0, 1.0, -1.0, 1.0, self.width, self.height)
            if spec == None:
                spec = RenderSpec(RenderSpec.POINT_ESTIMATE, column="value")
            return Harness.simulate_pipeline_coverage(distribution, n, trials, frame, spec, rng, sample_size, workers)

        else:
            if threshold == None:
                threshold = distribution.ppf(0.98) if distribution.continuous else distribution.ppf(1.0)
            alpha = self.alpha if alpha == None else alpha
            return Harness.simulate_region_inference(distribution, n, threshold, trials, rng, alpha, workers)


# Default configuration file:
__default_bootagg_config__ = '''# This is the default BootAgg config file.
# Options given on the command line take
# precedence over the values set here.

[logging]
# Valid log levels are 0 through 7:
#   0: Log only critical information
#   1: Log errors and lower log levels
#   2: Log warnings and lower log levels
#   3: Log notices and lower (this is the default)
#   4: Log info and lower log levels
#   5: Verbose logging
#   6: Debug logging
#   7: Extreme logging

loglevel = 3


[bootagg]

# Seed of the bootstrap. When left empty, a
# random seed is drawn for each run and
# printed with the results.

seed =

# Number of threads and renderer processes
# working concurrently. The results never
# depend on this number.

parallelism = 1

# Upper bound in bytes for the working set
# of the aggregation. 0 means no bound.

memory_cap = 268435456

# Size of the rendered images in pixels.

width = 900
height = 450


[transform]

# The intensity transform makes rare pixel
# values visible in the aggregate. Disable
# it to get the plain pixel-wise average.

enabled = yes
k = 2.5
tau = 0.3

# When two values are equally frequent in a
# pixel, either pick the smallest one, or
# pick one at random using the seed.

tie_break = smallest


[coverage]

# Significance level of the one-sided
# lower bound for predetermined regions.

alpha = 0.05


[renderer]

# Seconds an external renderer may take for
# a single image before it is terminated.

timeout = 60
'''.splitlines()
