//! Classify and unitarize triples in sl2C and SL2C.

use lwr::liealg::{c, re, Mat2C};
use lwr::transform::{unitarize_triple, TripleMode};

fn main() -> lwr::Result<()> {
    let s3 = Mat2C::diag(c(0.0, 1.0), c(0.0, -1.0));
    let s1 = Mat2C::new(re(0.0), c(0.0, 1.0), c(0.0, 1.0), re(0.0));
    let g = Mat2C::new(c(1.2, 0.3), c(0.5, -0.7), c(-0.1, 0.4), c(0.9, 0.2)).normalize_det();
    let conj = |x: Mat2C| g * x * g.inverse();
    let triangle = |theta: f64| {
        let (x1, x2) = (s3, s3.scale(re(theta.cos())) + s1.scale(re(theta.sin())));
        [conj(-(x1 + x2)), conj(x1), conj(x2)]
    };
    for (name, t) in
        [("equilateral (1,1,1)", triangle(2.0 * std::f64::consts::FRAC_PI_3)), ("collinear (2,1,1)", triangle(0.0))]
    {
        let u = unitarize_triple(&t, TripleMode::Algebra)?;
        println!("{name}: {:?}, phi={:.3e}, residual={:?}", u.class, u.phi.re, u.residual);
    }
    let j = Mat2C::real(0.0, 1.0, -1.0, 0.0);
    let s2 = (7.0 + 45f64.sqrt()) / 2.0;
    let p = Mat2C::real(s2.sqrt(), 0.0, 0.0, 1.0 / s2.sqrt());
    let a2 = p * j * p.inverse();
    let u = unitarize_triple(&[-(j + a2), j, a2], TripleMode::Algebra)?;
    println!("real (3,1,1): {:?}, phi={:.3e}", u.class, u.phi.re);
    let (m1, m2) = (s3.scale(re(0.7)).exp(), s1.scale(re(0.9)).exp());
    let u = unitarize_triple(&[conj(m1), conj(m2), conj((m1 * m2).inverse())], TripleMode::Group)?;
    println!("group triple: {:?}, residual={:?}", u.class, u.residual);
    Ok(())
}
