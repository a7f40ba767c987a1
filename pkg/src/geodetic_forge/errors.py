"""Exception hierarchy. Every error raised by the package derives from GeodeticForgeError."""

from __future__ import annotations


class GeodeticForgeError(Exception):
    pass


class ParseError(GeodeticForgeError, ValueError):
    pass


class CapExceeded(GeodeticForgeError):
    """A configured enumeration or step cap was hit."""


# group_core


class InvalidGroup(GeodeticForgeError, ValueError):
    pass


class NotAssociative(InvalidGroup):
    def __init__(self, triple):
        self.triple = triple
        g, h, k = triple
        super().__init__(f"table is not associative at ({g}*{h})*{k} != {g}*({h}*{k})")


class NoIdentity(InvalidGroup):
    def __init__(self):
        super().__init__("table has no two-sided identity element")


class NoInverse(InvalidGroup):
    def __init__(self, element):
        self.element = element
        super().__init__(f"element {element} has no two-sided inverse")


class InvalidGenerators(GeodeticForgeError, ValueError):
    pass


class ContainsIdentity(InvalidGenerators):
    def __init__(self):
        super().__init__("generating set contains the identity")


class NotInverseClosed(InvalidGenerators):
    def __init__(self, element):
        self.element = element
        super().__init__(f"generating set is not inverse-closed: missing inverse of {element}")


class DoesNotGenerate(InvalidGenerators):
    def __init__(self, element):
        self.element = element
        super().__init__(f"generating set does not reach element {element}")


class EnumerationCapExceeded(CapExceeded):
    pass


# labeled_graph


class Disconnected(GeodeticForgeError):
    pass


class Unreachable(GeodeticForgeError):
    pass


class CircuitCapExceeded(CapExceeded):
    pass


# rewriting


class StepCapExceeded(CapExceeded):
    pass


class CensusCapExceeded(CapExceeded):
    pass


class SystemNotInverseClosed(GeodeticForgeError):
    pass


class AlphabetCollision(GeodeticForgeError):
    pass
