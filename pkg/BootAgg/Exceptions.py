class BootAggError(Exception):
    """
    Base class of all errors raised by BootAgg. Every concrete error
    also derives from the built-in exception it refines, so code that
    catches ``ValueError`` or ``IOError`` keeps working.
    """
    pass

class DomainError(BootAggError, ValueError):
    pass

class ConvergenceError(BootAggError, ArithmeticError):
    """
    An iterative numeric kernel exhausted its iteration budget. This
    indicates a bug in the numerics rather than invalid input.
    """
    pass

class ParseError(BootAggError, ValueError):
    """
    Malformed delimited text.

    :param row: Zero-based data row index (``None`` for the header).
    :param column: Zero-based column index, or ``None`` when the whole row is at fault.
    """
    def __init__(self, message, row=None, column=None):
        location = ""
        if row != None:
            location += " (row "+str(row)
            if column != None:
                location += ", column "+str(column)
            location += ")"
        super().__init__(message+location)
        self.row = row
        self.column = column

class DecodeError(BootAggError, ValueError):
    pass

class DimensionError(BootAggError, ValueError):
    def __init__(self, message, expected=None, actual=None, index=None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual
        self.index = index

class RenderError(BootAggError, ValueError):
    pass

class ConfigError(BootAggError, ValueError):
    pass

class RendererError(BootAggError):
    """
    Base class for failures of the external renderer protocol.

    :param index: Replicate index of the failing invocation.
    :param diagnostics: Captured diagnostic output of the renderer, if any.
    """
    def __init__(self, message, index=None, diagnostics=None):
        super().__init__(message)
        self.index = index
        self.diagnostics = diagnostics

class RendererFailed(RendererError):
    pass

class RendererTimeout(RendererError, TimeoutError):
    pass

class ProtocolError(RendererError):
    pass

class RendererDimensionError(RendererError, DimensionError):
    def __init__(self, message, expected=None, actual=None, index=None, diagnostics=None):
        RendererError.__init__(self, message, index=index, diagnostics=diagnostics)
        self.expected = expected
        self.actual = actual
