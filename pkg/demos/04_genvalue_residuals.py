"""Star-genvalue residuals: where the eigenvalue equation holds, and how
far it drifts under deformation.

For the identity deformation the harmonic symbol (q^2+p^2)/2 satisfies
H * W_n = (n + 1/2) W_n exactly (Moyal product, analytic derivatives); the
residual is pure roundoff.  For deformed cases the first-order equation
leaves a real, radial residual that the report quantifies: the imaginary
part (the bracket term) still vanishes for radial pairs.
"""

from fstarq import (bracket_term, build_hamiltonian, default_grid, fock_wigner,
                    genvalue_residual, identity_spec, report_to_json,
                    sqrt_n_spec)

grid = default_grid()

print("identity deformation (exact anchor):")
for n in (0, 3, 10):
    rep = genvalue_residual(identity_spec(), n, grid)
    print(f"  n={n:2d}: max|R| = {rep.max_abs:.3e}, max|Im| = {rep.imag_max:.3e}, "
          f"E_n = {rep.params['energy']:.1f}")

print("\nsqrt_n deformation (residual reported, not asserted):")
for n in (0, 1, 2):
    rep = genvalue_residual(sqrt_n_spec(), n, grid)
    print(f"  n={n}: max|R| = {rep.max_abs:.6f} at "
          f"(q,p)=({rep.witness.q:+.4f},{rep.witness.p:+.4f}), "
          f"max|Im| = {rep.imag_max:.3e}")
    print(f"        E_n = {rep.params['energy']:.1f}, "
          f"phase-space average of H*W = {rep.params['phase_space_average_re']:.4f}")

# the imaginary part vanishes because H and W_n are both radial
ham = build_hamiltonian(sqrt_n_spec(), grid)
w = fock_wigner(2, grid)
br = bracket_term(ham.field, w, sqrt_n_spec())
print(f"\nbracket term max |.| for radial H, W_2: {abs(br.values).max():.3e}")

rep = genvalue_residual(sqrt_n_spec(), 1, grid)
print("\nfull JSON report for sqrt_n, n=1:")
print(report_to_json(rep))
