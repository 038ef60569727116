import os
import sys
import glob
import time
import threading

from .Exceptions import *
from .SpecialFunctions import SpecialFunctions, BetaParams
from .Coverage import Coverage, CoverageSpec, RegionInferenceResult
from .Resampling import Resampling, Dataset, SeededRng
from .Raster import Raster, RasterImage, PlotFrame, RenderSpec
from .Rasterizer import Canvas
from .Aggregation import Aggregation, ImageStack, TransformParams, ChannelFrequencyTable, RegionMask, AggregateImage
from .Renderers import Renderer, ExternalRenderer, RendererCommand
from .Harness import Harness, ScalarDistribution, CoverageReport, RegionInferenceReport
from .Bootplot import Bootplot, RunConfig, RunResult

__version__ = "0.1.0"

modules = glob.glob(os.path.dirname(__file__)+"/*.py")
__all__ = [ os.path.basename(f)[:-3] for f in modules if not f.endswith('__init__.py')]

LOG_CRITICAL = 0
LOG_ERROR    = 1
LOG_WARNING  = 2
LOG_NOTICE   = 3
LOG_INFO     = 4
LOG_VERBOSE  = 5
LOG_DEBUG    = 6
LOG_EXTREME  = 7

LOG_STDOUT   = 0x91
LOG_FILE     = 0x92
LOG_STDERR   = 0x93

# Standard output belongs to the key=value
# diagnostics of the command line program,
# so log lines go to standard error unless
# configured otherwise.
loglevel     = LOG_NOTICE
logfile      = None
logdest      = LOG_STDERR
logtimefmt   = "%Y-%m-%d %H:%M:%S"

_always_override_destination = False

logging_lock = threading.Lock()

def loglevelname(level):
    if (level == LOG_CRITICAL):
        return "Critical"
    if (level == LOG_ERROR):
        return "Error"
    if (level == LOG_WARNING):
        return "Warning"
    if (level == LOG_NOTICE):
        return "Notice"
    if (level == LOG_INFO):
        return "Info"
    if (level == LOG_VERBOSE):
        return "Verbose"
    if (level == LOG_DEBUG):
        return "Debug"
    if (level == LOG_EXTREME):
        return "Extra"

    return "Unknown"

def log(msg, level=3, _override_destination = False):
    global _always_override_destination

    if loglevel >= level:
        logstring = "["+time.strftime(logtimefmt)+"] ["+loglevelname(level)+"] "+msg

        with logging_lock:
            if logdest == LOG_FILE and logfile != None and not (_always_override_destination or _override_destination):
                try:
                    with open(logfile, "a") as file:
                        file.write(logstring+"\n")
                    return
                except Exception as e:
                    _always_override_destination = True
                    failure = e
            else:
                failure = None
                stream = sys.stdout if logdest == LOG_STDOUT else sys.stderr
                print(logstring, file=stream)
                return

        log("Exception occurred while writing log message to log file: "+str(failure), LOG_CRITICAL)
        log("Dumping future log events to console!", LOG_CRITICAL)
        log(msg, level)

def set_loglevel(level):
    global loglevel
    loglevel = max(LOG_CRITICAL, min(LOG_EXTREME, int(level)))

def prettyfraction(value, decimals=4):
    return ("{:."+str(decimals)+"f}").format(float(value))
