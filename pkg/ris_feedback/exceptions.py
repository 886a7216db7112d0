"""
    Domain errors raised by the simulation.
    Configuration problems are reported with django's ImproperlyConfigured instead.
"""


class FeedbackError(Exception):
    """ Base class for all errors raised while simulating channel feedback """


class InvalidPhaseConfiguration(FeedbackError, ValueError):
    """ An RIS phase vector has an entry that is not unit-modulus """


class IllConditionedSupport(FeedbackError, ValueError):
    """ Selected dictionary columns are (nearly) linearly dependent - usually two AoDs on one grid point """


class DegenerateChannel(FeedbackError, ValueError):
    """ Stacked user channels are rank deficient, zero-forcing is undefined """


class UndefinedAngle(FeedbackError, ValueError):
    """ Angle between vectors is undefined because one of them is zero """


class ProtocolError(FeedbackError):
    """ The set of received payloads violates the feedback protocol """


class MalformedPayload(FeedbackError, ValueError):
    """ A payload carries out-of-range indexes or cannot be parsed """
