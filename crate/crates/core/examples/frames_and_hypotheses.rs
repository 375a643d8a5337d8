//! Build a Liénard system from JSON, move a point between coordinate frames
//! and run the standing-hypothesis checks.
//!
//!     cargo run --example frames_and_hypotheses

use lienard::model::system::{Frame, PhasePoint};
use lienard::model::{hypothesis_check, SystemSpec};

fn main() -> lienard::Result<()> {
    let spec: SystemSpec = serde_json::from_str(
        r#"{"f": {"catalog": "vdp_damping", "params": [1.0]},
            "g": {"catalog": "cubic_stiffness", "params": [1.0, 0.2]}}"#,
    )
    .expect("valid system JSON");
    let sys = spec.build()?;

    let p = PhasePoint::uv(1.5, -0.4);
    for frame in [Frame::Uv, Frame::LienardPlane, Frame::Farkas] {
        let q = sys.to_frame(p, frame);
        let v = sys.vector_field(q, 0.0);
        println!("{frame:>13}: state = {:>9.5?}  field = {:>9.5?}", q.state, v);
    }

    let report = hypothesis_check(&sys, 3.0)?;
    println!("\nhypotheses on [-3, 3]:");
    for c in &report.checks {
        println!("  [{}] {:<28} {}", if c.passed { "ok" } else { "!!" }, c.name, c.detail);
    }
    Ok(())
}
