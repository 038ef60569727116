import os
import time
import shlex
import signal
import shutil
import tempfile
import threading
import subprocess
import BootAgg
from concurrent.futures import ThreadPoolExecutor, FIRST_EXCEPTION, wait
from .Renderer import Renderer
from ..Raster import Raster, RasterImage
from ..Exceptions import (DomainError, DecodeError, RendererFailed, RendererTimeout,
                          ProtocolError, RendererDimensionError, RendererError)

class RendererCommand:
    """
    A shell command line that turns one resample into one PNG. The
    following placeholders are substituted before each invocation, with
    paths shell-quoted:

    ``{resample}`` path of the resample as comma-separated text,
    ``{full}`` path of the full dataset,
    ``{out}`` path where the PNG must be written,
    ``{width}``, ``{height}`` requested image size in pixels,
    ``{index}`` replicate index.

    :param template: The command line. Must contain ``{resample}`` and ``{out}``.
    :param working_directory: Directory the command runs in. Defaults to the current directory.
    :param timeout: Seconds one invocation may take.
    """
    PLACEHOLDERS    = ["resample", "full", "out", "width", "height", "index"]
    REQUIRED        = ["resample", "out"]
    DEFAULT_TIMEOUT = 60.0

    def __init__(self, template, working_directory=None, timeout=DEFAULT_TIMEOUT):
        if not isinstance(template, str) or template.strip() == "":
            raise DomainError("Renderer command template must be a non-empty string")
        for name in RendererCommand.REQUIRED:
            if not "{"+name+"}" in template:
                raise DomainError("Renderer command template must contain {"+name+"}")
        timeout = float(timeout)
        if not timeout > 0:
            raise DomainError("Renderer timeout must be positive, got "+repr(timeout))

        self.template          = template
        self.working_directory = working_directory
        self.timeout           = timeout

    def substitute(self, resample_path, full_path, out_path, width, height, index):
        values = {
            "resample": shlex.quote(resample_path),
            "full":     shlex.quote(full_path),
            "out":      shlex.quote(out_path),
            "width":    str(width),
            "height":   str(height),
            "index":    str(index),
        }
        command = self.template
        for name in RendererCommand.PLACEHOLDERS:
            command = command.replace("{"+name+"}", values[name])
        return command

    def __repr__(self):
        return "<RendererCommand \""+self.template+"\">"


class ExternalRenderer(Renderer):
    """
    Uses any external program as the renderer. Each invocation gets the
    resample and the full dataset as files and must write a PNG of
    exactly the requested size. The image content is never inspected
    beyond its dimensions.

    Files are exchanged through a per-run temporary directory. It is
    removed when the run succeeds and kept for inspection when it fails.

    :param command: A :ref:`BootAgg.RendererCommand<api-renderercommand>` instance.
    :param size: Requested (width, height) in pixels.
    """
    INDEX_ENVIRONMENT = "BOOTAGG_REPLICATE_INDEX"
    DIAGNOSTICS_LIMIT = 4096

    def __init__(self, command, size):
        RasterImage.check_size(size[0], size[1])
        super().__init__(None, None)
        self.command = command
        self.width   = int(size[0])
        self.height  = int(size[1])

    @property
    def size(self):
        return (self.width, self.height)

    def render(self, resample, full):
        return self.invoke(resample, full, 0)

    def invoke(self, resample, full, index, run_directory=None):
        """
        Runs the command once.

        :param resample: The resampled :ref:`BootAgg.Dataset<api-dataset>`.
        :param full: The full :ref:`BootAgg.Dataset<api-dataset>`.
        :param index: Replicate index, passed as ``{index}`` and in ``BOOTAGG_REPLICATE_INDEX``.
        :param run_directory: Directory for the exchanged files. A fresh one is created, and removed on success, when omitted.
        :returns: The decoded :ref:`BootAgg.RasterImage<api-rasterimage>`.
        """
        owns_directory = run_directory == None
        if owns_directory:
            run_directory = tempfile.mkdtemp(prefix="bootagg-")
            full_path = self.__write_full(run_directory, full)
        else:
            full_path = os.path.join(run_directory, "full.csv")
            if not os.path.isfile(full_path):
                full_path = self.__write_full(run_directory, full)

        try:
            image = self.__invoke(resample, full_path, index, run_directory)
        except RendererError:
            BootAgg.log("Renderer files for replicate "+str(index)+" kept in "+run_directory, BootAgg.LOG_WARNING)
            raise

        if owns_directory:
            shutil.rmtree(run_directory, ignore_errors=True)
        return image

    def render_stack(self, resamples, full, parallelism=1):
        """
        Renders every resample with at most *parallelism* concurrent
        subprocesses. Images are returned in resample order no matter in
        which order the subprocesses finish. The first failure aborts the
        run.

        :returns: A :ref:`BootAgg.ImageStack<api-imagestack>`.
        """
        if parallelism < 1:
            raise DomainError("Parallelism must be at least 1, got "+str(parallelism))

        run_directory = tempfile.mkdtemp(prefix="bootagg-")
        self.__write_full(run_directory, full)
        BootAgg.log("Rendering "+str(len(resamples))+" replicates with "+str(self.command)+" in "+run_directory, BootAgg.LOG_VERBOSE)

        aborted = threading.Event()
        def job(index):
            if aborted.is_set():
                return None
            return self.invoke(resamples[index], full, index, run_directory)

        executor = ThreadPoolExecutor(max_workers=parallelism)
        try:
            futures = [executor.submit(job, index) for index in range(len(resamples))]
            done, pending = wait(futures, return_when=FIRST_EXCEPTION)
            failures = [f for f in futures if f.done() and f.exception() != None]
            if len(failures) > 0:
                aborted.set()
                for future in pending:
                    future.cancel()
                error = failures[0].exception()
                BootAgg.log("Renderer failed on replicate "+str(getattr(error, "index", "?"))+", aborting run", BootAgg.LOG_ERROR)
                BootAgg.log("The contained exception was: "+str(error), BootAgg.LOG_ERROR)
                raise error

            images = [future.result() for future in futures]
        finally:
            executor.shutdown(wait=True)

        shutil.rmtree(run_directory, ignore_errors=True)
        return BootAgg.ImageStack(images)

    def __write_full(self, run_directory, full):
        full_path = os.path.join(run_directory, "full.csv")
        with open(full_path, "wb") as file:
            file.write(full.to_csv())
        return full_path

    def __invoke(self, resample, full_path, index, run_directory):
        resample_path = os.path.join(run_directory, "resample_"+str(index).zfill(4)+".csv")
        out_path = os.path.join(run_directory, "out_"+str(index).zfill(4)+".png")
        with open(resample_path, "wb") as file:
            file.write(resample.to_csv())
        if os.path.exists(out_path):
            os.unlink(out_path)

        command = self.command.substitute(resample_path, full_path, out_path, self.width, self.height, index)
        environment = dict(os.environ)
        environment[ExternalRenderer.INDEX_ENVIRONMENT] = str(index)

        BootAgg.log("Invoking renderer for replicate "+str(index)+": "+command, BootAgg.LOG_EXTREME)
        started = time.time()
        process = subprocess.Popen(
            command,
            shell=True,
            cwd=self.command.working_directory,
            env=environment,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            start_new_session=(os.name == "posix"),
        )

        try:
            stdout, stderr = process.communicate(timeout=self.command.timeout)
        except subprocess.TimeoutExpired:
            self.__kill(process)
            stdout, stderr = process.communicate()
            raise RendererTimeout(
                "Renderer timed out after "+str(self.command.timeout)+" seconds on replicate "+str(index),
                index=index, diagnostics=self.__diagnostics(stdout, stderr)
            )

        if process.returncode != 0:
            diagnostics = self.__diagnostics(stdout, stderr)
            raise RendererFailed(
                "Renderer exited with status "+str(process.returncode)+" on replicate "+str(index)+": "+diagnostics,
                index=index, diagnostics=diagnostics
            )

        if not os.path.isfile(out_path):
            raise ProtocolError("Renderer wrote no output for replicate "+str(index)+" at "+out_path, index=index, diagnostics=self.__diagnostics(stdout, stderr))

        with open(out_path, "rb") as file:
            data = file.read()

        try:
            image = Raster.decode_png(data)
        except DecodeError as e:
            raise ProtocolError("Renderer output for replicate "+str(index)+" is not a valid PNG: "+str(e), index=index, diagnostics=self.__diagnostics(stdout, stderr))

        if image.size != self.size:
            raise RendererDimensionError(
                "Renderer output for replicate "+str(index)+" is "+str(image.width)+"x"+str(image.height)+
                ", expected "+str(self.width)+"x"+str(self.height),
                expected=self.size, actual=image.size, index=index
            )

        BootAgg.log("Replicate "+str(index)+" rendered in "+str(round(time.time()-started, 3))+" seconds", BootAgg.LOG_EXTREME)
        return image

    def __kill(self, process):
        try:
            if os.name == "posix":
                os.killpg(process.pid, signal.SIGKILL)
            else:
                process.kill()
        except (ProcessLookupError, PermissionError, OSError):
            pass

    def __diagnostics(self, stdout, stderr):
        text = (stderr or b"").decode("utf-8", errors="replace")
        if (stdout or b"").strip():
            text += (stdout or b"").decode("utf-8", errors="replace")
        text = text.strip()
        if len(text) > ExternalRenderer.DIAGNOSTICS_LIMIT:
            text = text[-ExternalRenderer.DIAGNOSTICS_LIMIT:]
        return text

    def __str__(self):
        return "ExternalRenderer["+str(self.width)+"x"+str(self.height)+"]"
