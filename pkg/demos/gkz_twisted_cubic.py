"""An A-hypergeometric system for the twisted cubic A = [[1,1,1],[0,1,2]]."""
from hodgefl.gkz import (
    construct, euler_box_commutators, fourier_transform_generators, report,
)
from hodgefl.weyl import to_text

sys_ = construct([[1, 1, 1], [0, 1, 2]], [0, "-1/2"])
print("kernel basis:", sys_.lattice_basis)
print("box:", [to_text(b, "l") for b in sys_.boxes])
print("euler:", [to_text(e, "l") for e in sys_.eulers])
print("flags:", sys_.flags)
for c in euler_box_commutators(sys_):
    print(f"[E_{c['k']}, box] = {c['commutator']}   (factor {c['factor']}, residual {c['residual']})")
for f in fourier_transform_generators(sys_):
    print(f"{f['generator']:>24}  ->  {f['inverse_image']}")
print("all checks:", report(sys_)["checks"])
