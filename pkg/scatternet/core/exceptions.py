class ScatternetError(Exception):
    def __init__(self, *args):
        super().__init__(*args)

    def __str__(self):
        return f"Scatternet - {super().__str__()}"


class ScatternetDomainError(ScatternetError, ValueError):
    def __init__(self, message):
        super().__init__(message)

    def __str__(self):
        return f"Domain error: {super().__str__()}"


class ScatternetShapeError(ScatternetError, ValueError):
    def __init__(
        self,
        message: str,
        expected: tuple | None = None,
        actual: tuple | None = None,
    ):
        super().__init__(message)
        self.expected = expected
        self.actual = actual

    def __str__(self):
        if self.expected is None and self.actual is None:
            return f"Shape mismatch: {super().__str__()}"
        return (
            f"Shape mismatch: {super().__str__()} - "
            f"expected {self.expected} got {self.actual}"
        )


class ScatternetEnumerationError(ScatternetError):
    def __init__(self, message: str, size: int, limit: int):
        super().__init__(message)
        self.size = size
        self.limit = limit

    def __str__(self):
        return (
            f"Enumeration bound exceeded: {super().__str__()} - "
            f"{self.size} units over limit {self.limit}"
        )


class ScatternetNonFiniteError(ScatternetError, ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index

    def __str__(self):
        return f"Non-finite value at index {self.index}: {super().__str__()}"


class ScatternetConfigError(ScatternetError):
    def __init__(self, message):
        super().__init__(message)

    def __str__(self):
        return f"Scatternet configuration error: {super().__str__()}"


class ScatternetCheckError(ScatternetError):
    def __init__(self, message, check_id: str):
        super().__init__(message)
        self.check_id = check_id

    def __str__(self):
        return f"Check {self.check_id} failed: {super().__str__()}"
