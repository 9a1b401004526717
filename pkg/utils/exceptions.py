"""
@file exceptions.py

Error types raised across the laws, quadrature, simulation and PDE code, along with
the process exit codes the command-line front end maps them to.
"""

# Exit codes for main.py
EXIT_PASS = 0
EXIT_VALIDATION_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class SojournError(Exception):
    """ Base class for every error raised by this project """
    exit_code = EXIT_NUMERIC


class DomainError(SojournError, ValueError):
    """ Parameters or evaluation points outside the support of a law """
    exit_code = EXIT_USAGE


class UsageError(SojournError):
    """ Invalid command-line input (unknown law, bad override combination) """
    exit_code = EXIT_USAGE


class NumericError(SojournError, ArithmeticError):
    def __init__(self, message, best_estimate=float("nan"), err_est=float("inf"), n_intervals=0):
        """
        Raised when a numerical routine fails to converge or produces non-finite values
        :param message: diagnostic message
        :param best_estimate: best value available when the routine gave up
        :param err_est: error estimate attached to best_estimate
        :param n_intervals: number of subintervals in use at failure
        """
        super().__init__(message)
        self.best_estimate = best_estimate
        self.err_est = err_est
        self.n_intervals = n_intervals

    def __str__(self):
        return f"{self.args[0]} (best estimate {self.best_estimate:.17g}, err_est {self.err_est:.3g}, " \
               f"{self.n_intervals} intervals)"


class BudgetError(SojournError, RuntimeError):
    def __init__(self, message, attempts=0, accepted=0):
        """
        Raised when a rejection sampler exhausts its attempt budget
        :param attempts: number of proposals drawn before giving up
        :param accepted: number of proposals accepted before giving up
        """
        super().__init__(message)
        self.attempts = attempts
        self.accepted = accepted


def require(condition, message):
    """ Raise a DomainError with the given message when the condition fails """
    if not condition:
        raise DomainError(message)
