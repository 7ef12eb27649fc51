//! Evaluation-point moves: duality, the associated family and the blow-up
//! of CMC-1 surfaces to a minimal surface.

use lwr::gallery::{make_enneper, EnneperSpec};
use lwr::integrator::{integrate_frame, InitialData, PathSpec, SolverSettings};
use lwr::liealg::{c, re, Mat2C};
use lwr::surface::{hyperbolic_null_curve, immerse, Target};
use lwr::transform::{associated_move, dual_swap};

fn main() -> lwr::Result<()> {
    let con = make_enneper(&EnneperSpec { r: 1.0, n: 1 }, Target::H3, 8)?;
    let z = c(0.5, 0.4);
    let fb = integrate_frame(&con.xi, &PathSpec::line(re(0.0), z), &con.initial_data(), &SolverSettings::default())?;
    let old = hyperbolic_null_curve(&fb, &con.ev)?;
    let (dual, ev) = dual_swap(&fb, &con.ev)?;
    let new = hyperbolic_null_curve(&dual, &ev)?;
    println!("|Psi_dual Psi - I| = {:.2e}", (new * old - Mat2C::identity()).norm());

    let ev = associated_move(&con.ev.swapped(), c(0.0, 1.0))?;
    println!("associated pair: lambda0={} lambda1={}", ev.lambda0, ev.lambda1);

    // f^H_t = Ψ_t*Ψ_t with Ψ_t = Φ_{λ₀+t(λ₁−λ₀)}Φ_{λ₀}⁻¹ approaches f^E to first order
    let ev = con.ev.swapped();
    for t in [1e-1, 1e-2, 1e-3] {
        let lambdas = [ev.lambda0, ev.lambda1, ev.lambda0 + ev.difference() * t];
        let init = InitialData::constant(con.z0, &lambdas, con.initial, &[0]);
        let fb = integrate_frame(&con.xi, &PathSpec::line(re(0.0), z), &init, &SolverSettings::default())?;
        let fe = immerse(&fb, &ev, Target::E3)?.matrix();
        let psi = fb.phi_at(lambdas[2])? * fb.phi_at(ev.lambda0)?.inverse();
        let blow = (psi.adjoint() * psi - Mat2C::identity()).scale(re(1.0 / t));
        println!("t={t:.0e}: |(f_t - I)/t - f^E| / |f^E| = {:.3e}", (blow - fe).norm() / fe.norm());
    }
    Ok(())
}
