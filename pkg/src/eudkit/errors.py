"""Error type shared by all eudkit modules."""

from __future__ import annotations


class EUDError(ValueError):
    """A validation or processing error carrying a machine-readable code.

    ``sentence`` is the 1-based sentence ordinal, ``line`` the 1-based line
    number in the input text, ``node`` the offending node id (as text).
    """

    def __init__(self, code, message="", *, sentence=None, line=None, node=None):
        self.code = code
        self.message = message
        self.sentence = sentence
        self.line = line
        self.node = None if node is None else str(node)
        super().__init__(self._render())

    def _render(self):
        where = []
        if self.sentence is not None:
            where.append(f"sentence {self.sentence}")
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.node is not None:
            where.append(f"node {self.node}")
        text = self.code
        if self.message:
            text += f": {self.message}"
        if where:
            text += f" ({', '.join(where)})"
        return text

    def located(self, *, sentence=None, line=None):
        """Return a copy with missing location fields filled in."""
        return EUDError(
            self.code,
            self.message,
            sentence=self.sentence if self.sentence is not None else sentence,
            line=self.line if self.line is not None else line,
            node=self.node,
        )
