"""The comparison map from the microlocal module to the graph embedding.

Take f = (x1^2 - x2^3, x1 x2) on the plane.  An element of the microlocal module
is a sum of m y^alpha dxi^j delta_g; phi sends it to (-1)^(|alpha|+j) m dt^alpha delta_f.
"""
from hodgefl.microlocal import (
    default_context, eigen_decompose, f_level, graph_act, micro_act, micro_text, graph_text,
    parse_element, phi, s_graph, s_micro, verify_filtration_shift, verify_phi_identities,
)

ctx = default_context()
e = parse_element(ctx, "(x1 - 2)*y1*y2*dxi^-1*delta_g + x2*y1*delta_g")
print("e            =", micro_text(e))
print("phi(e)       =", graph_text(phi(ctx, e)))

# y_i on the left becomes -dt_i on the right
lhs = phi(ctx, micro_act(ctx, ("y", 1), e))
rhs = graph_act(ctx, ("dt", 1), phi(ctx, e)).scale(-1)
print("phi(y1 e) = -dt1 phi(e):", lhs == rhs)

# on each eigenspace of theta_y - s the two s operators differ by the eigenvalue
for ell, part in eigen_decompose(ctx, e).items():
    same = phi(ctx, s_micro(ctx, part)) == s_graph(ctx, phi(ctx, part)) - phi(ctx, part).scale(ell)
    shift = f_level(ctx, phi(ctx, part)) - f_level(ctx, part)
    print(f"ell={ell}: s intertwined: {same}, Hodge level moves by {shift}")

print("identity suite ok:", verify_phi_identities(ctx, 50, seed=7)["ok"])
print("shift suite ok:", verify_filtration_shift(ctx, 6)["ok"])
