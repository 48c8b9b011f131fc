"""Fourier-Laplace transform of the polynomial ring in one variable.

Eigenspaces of z d_z on C[z] are the lines C z^k at eigenvalue k + 1.  The
transform sends them to the delta module at the origin, moving each Hodge jump by
the rounded-up eigenvalue, and applying it twice gives the antipode of a Tate twist.
"""
from hodgefl.monodromic import (
    antipode, check_fl_restriction, cz_model, delta_model, fl, fourier_inversion_check,
    restrict_shriek, restrict_star, tate_twist,
)


def show(title, M):
    print(title)
    for chi, s in sorted(M.spaces.items()):
        if s.dim:
            print(f"  chi={str(chi):>3}  dim={s.dim}  F jumps {s.F.indices}  W jumps {s.W.indices}")


M = cz_model()
show("C[z] on the window", M)
F = fl(M)
show("its transform", F)
print("transform equals the delta model:", F == delta_model())
print("FL FL M equals a(M)(1):", fl(F) == antipode(tate_twist(M, 1)))
print("inversion report:", fourier_inversion_check(M).to_json()["info"])

# restriction to the origin, before and after the transform
print("i^! of C[z], cohomology:", restrict_shriek(M).cohomology_dims())
print("i^* of its transform, cohomology:", restrict_star(F).cohomology_dims())
print("exchange holds with filtrations:", check_fl_restriction(M).ok)
