import numpy as np


def complex_normal(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussians: E|g|^2 = 1, real and imaginary parts of variance 1/2."""
    g = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,))
    return (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)


def haar_unitary(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed unitary ``(d, d)`` matrix, or a stack ``(size, d, d)``.

    QR of a complex Ginibre matrix, with the columns of Q rephased so that R
    has a positive diagonal; without that correction Q is not Haar.
    """
    shape = (d, d) if size is None else (size, d, d)
    Z = complex_normal(shape, rng)
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R, axis1=-2, axis2=-1)
    phase = diag / np.abs(diag)
    return Q * phase[..., None, :]
