"""Relative monodromy filtrations on small examples, with the uniqueness check."""
from hodgefl.linalg import Filtration, Matrix
from hodgefl.rmf import check_rmf, rmf

N = Matrix.of([[0, 1, 0], [0, 0, 0], [0, 0, 0]])

# trivial L: the ordinary monodromy filtration of a Jordan block plus a fixed line
res = rmf(N, Filtration.single_jump(3, 0))
print("trivial L:", res.filtration.graded_dims())

# L splitting the block across two adjacent pieces has no relative filtration
res = rmf(N, Filtration.from_degrees([0, 1, 1]))
print("adjacent split exists:", res.exists, "|", res.certificate)

# the same split two steps apart does
L = Filtration.from_degrees([0, 2, 2])
res = rmf(N, L)
print("two-step split:", res.filtration.graded_dims(), "problems:", check_rmf(N, L, res.filtration))
