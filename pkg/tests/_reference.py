"""Reference values shared by the test modules."""

EPS_TABLE = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]

# first ten eigenvalues of the N = 7 co-periodic Galerkin matrix, per eps column
REF_EIGS = [
    [0.0000, 0.0000, 0.0000, 0.0000, 0.0001, 0.0001, 0.0002, 0.0007, 0.0041],
    [0.0001, 0.0001, 0.0001, 0.0001, 0.0001, 0.0002, 0.0006, 0.0024, 0.0118],
    [0.0001, 0.0001, 0.0001, 0.0001, 0.0001, 0.0003, 0.0008, 0.0032, 0.0169],
    [0.6667, 0.6682, 0.6728, 0.6807, 0.6926, 0.7094, 0.7329, 0.7662, 0.8163],
    [0.8336, 0.8334, 0.8329, 0.8324, 0.8322, 0.8331, 0.8361, 0.8432, 0.8588],
    [0.9016, 0.9018, 0.9023, 0.9034, 0.9051, 0.9078, 0.9122, 0.9192, 0.9314],
    [0.9367, 0.9369, 0.9375, 0.9386, 0.9404, 0.9430, 0.9468, 0.9525, 0.9612],
    [0.9601, 0.9603, 0.9609, 0.9620, 0.9636, 0.9659, 0.9691, 0.9733, 0.9792],
    [0.9738, 0.9740, 0.9745, 0.9753, 0.9766, 0.9783, 0.9806, 0.9836, 0.9875],
    [0.9850, 0.9851, 0.9854, 0.9860, 0.9868, 0.9879, 0.9894, 0.9912, 0.9934],
]


def ref_column(eps):
    j = EPS_TABLE.index(eps)
    return [row[j] for row in REF_EIGS]
