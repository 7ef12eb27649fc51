//! The invariants `q` and `s` of a potential: gauge invariance and the
//! affine law `S[u/v] = λq + s`.

use lwr::gallery::{make_catenoid, CatenoidSpec};
use lwr::integrator::{integrate_frame, InitialData, PathSpec, SolverSettings};
use lwr::liealg::{c, re};
use lwr::potential::{gauge_apply, gauss_schwarzian, q_jet, schwarz_data, Gauge, MatFn, Poly, ScalarFn};
use lwr::surface::Target;

fn main() -> lwr::Result<()> {
    let (p, q) = (1.0, 1.0);
    let con = make_catenoid(&CatenoidSpec { p, q }, Target::E3, 8)?;
    let z = c(0.6, 0.8);
    let path = PathSpec::line(re(1.0), z);
    let lambdas = [re(0.0), re(1.0), c(0.5, 0.5)];
    let init = InitialData::constant(con.z0, &lambdas, con.initial, &[]);
    let fb = integrate_frame(&con.xi, &path, &init, &SolverSettings::default())?;
    for l in lambdas {
        let s = gauss_schwarzian(&con.xi, l, &fb.at, &fb.phi_at(l)?)?;
        println!("S[G] at lambda={l}: {s:.12}");
    }
    println!("q z^2 = {:.12} (expected {q})", q_jet(&con.xi, &fb.at)?.value() * z * z);
    let data = schwarz_data(&con.xi, re(0.0), &[(fb.at, fb.phi_at(re(0.0))?)])?;
    println!("s z^2 = {:.12} (expected {})", data.samples[0].s * z * z, p - 0.25);
    // g = [[1 + ab, a], [b, 1]] has det 1 and leaves q unchanged
    let f = |v: Vec<f64>| ScalarFn::rational(Poly(v.into_iter().map(re).collect()), Poly::one());
    let g =
        Gauge::new(MatFn::new(f(vec![1.0, 0.25, 0.125]), f(vec![0.5, 0.25]), f(vec![0.0, 0.5]), f(vec![1.0])), vec![])?;
    let gauged = gauge_apply(&con.xi, &g);
    println!("q after gauge: {:.12}", q_jet(&gauged, &fb.at)?.value() * z * z);
    Ok(())
}
