//! Integrate the Enneper potential, mesh it in E³ and H³ and print the
//! pointwise checks.

use lwr::gallery::{parse_job, run_job, Suite};

fn main() -> lwr::Result<()> {
    for target in ["E3", "H3"] {
        let text = format!(
            r#"{{"target": "{target}", "surface": {{"kind": "enneper", "r": 1, "n": 1}}, "grid": {{"resolution": 48}}}}"#
        );
        let report = run_job(&parse_job(&text)?, &[Suite::Conformality, Suite::Hopf])?;
        println!("{target}: {} vertices, passed={}", report.mesh.vertices.len(), report.passed());
        for line in report.summary().iter().filter(|l| l.contains("_max=")) {
            println!("  {line}");
        }
    }
    Ok(())
}
