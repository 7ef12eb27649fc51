//! Simple factor dressing of a catenoid: locate the singular set, dress the
//! monodromy and compare Hopf differentials.

use lwr::gallery::{make_dressed_catenoid, CatenoidSpec, DressedCatenoidSpec};
use lwr::integrator::{integrate_frame, PathSpec, SolverSettings};
use lwr::liealg::{c, re};
use lwr::potential::spinor_field_and_hopf;
use lwr::surface::Target;
use lwr::transform::{check_closing, dressed_hopf, dressed_monodromy, locate_singular_point};

fn main() -> lwr::Result<()> {
    let settings = SolverSettings::default();
    let spec = DressedCatenoidSpec { base: CatenoidSpec { p: 0.25, q: 1.0 }, u: 2.0, ell: [1.0, 3.0], m: None };
    let con = make_dressed_catenoid(&spec, Target::E3, 8)?;
    let outer = con.dressing.expect("dressing");
    let init = con.initial_data();
    for z in spec.predicted_singular_points(Target::E3) {
        let near = integrate_frame(&con.xi, &PathSpec::line(re(1.0), z * c(1.05, 0.02)), &init, &settings)?;
        let found = locate_singular_point(&con.xi, &near, &outer.spec, &settings)?.z();
        println!("predicted singular point {z:.10}, located {found:.10}");
    }
    let dressed: Vec<_> =
        con.monodromies(&settings)?.iter().map(|m| dressed_monodromy(m, &outer)).collect::<lwr::Result<_>>()?;
    println!("dressed surface closed: {}", check_closing(&dressed, &con.ev, Target::E3, 1e-6).closed);
    let fb = integrate_frame(&con.xi, &PathSpec::line(re(1.0), c(0.4, 0.9)), &init, &settings)?;
    let before = spinor_field_and_hopf(&con.xi, &con.ev, &fb.at)?.2;
    let after = dressed_hopf(&con.xi, &fb, &outer, &con.ev)?;
    println!("Hopf before {before:.12}, after {after:.12}");
    Ok(())
}
