//! Unitarize the monodromy of a three-ended potential and verify closing
//! around all three ends.

use lwr::gallery::{make_trinoid, trinoid_settings, TrinoidSpec};
use lwr::integrator::SolverSettings;
use lwr::liealg::re;
use lwr::surface::Target;
use lwr::transform::check_closing;

fn main() -> lwr::Result<()> {
    let spec = TrinoidSpec { q: [re(0.1), re(0.15), re(0.2)] };
    for target in [Target::E3, Target::H3] {
        let con = make_trinoid(&spec, target, 8, &SolverSettings::default())?;
        let ms = con.monodromies(&trinoid_settings(&SolverSettings::default()))?;
        let verdict = check_closing(&ms, &con.ev, target, 1e-6);
        println!("{}: closed={} max residual={:.2e}", target.name(), verdict.closed, verdict.max_residual());
        println!("  initial value {:?}", con.initial);
    }
    match make_trinoid(&TrinoidSpec { q: [re(4.0), re(1.0), re(1.0)] }, Target::E3, 8, &SolverSettings::default()) {
        Err(e) => println!("weights (4,1,1): {e}"),
        Ok(_) => println!("weights (4,1,1) unexpectedly accepted"),
    }
    Ok(())
}
