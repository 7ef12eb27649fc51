//! Catenoids: monodromy eigenvalues and the closing condition `2√p ∈ ℤ`.

use lwr::gallery::{make_catenoid, CatenoidSpec};
use lwr::integrator::SolverSettings;
use lwr::surface::Target;
use lwr::transform::check_closing;

fn main() -> lwr::Result<()> {
    for p in [0.25, 0.5, 1.0, 2.25] {
        let con = make_catenoid(&CatenoidSpec { p, q: 1.0 }, Target::E3, 8)?;
        let ms = con.monodromies(&SolverSettings::default())?;
        let (e1, e2) = ms[0].at(con.ev.lambda0)?.eigenvalues();
        let verdict = check_closing(&ms, &con.ev, Target::E3, 1e-6);
        println!(
            "p={p:<5} wrapping={:.1} eigenvalues at lambda0: {e1:.6}, {e2:.6} closed={}",
            2.0 * p.sqrt(),
            verdict.closed
        );
    }
    Ok(())
}
