//! The genus-2 surface group at p = 2: the first stage has index 16 and
//! b1 = 34, the ratio 17/8 sits above the L2-betti number 2, and the
//! deficiency ledger gives vd_2 >= 2.

use l2approx::approx::approx_sequence;
use l2approx::bounds::{completion_certificates, def_certificate, supermult_certificate, vd_lower_bound};
use l2approx::{EnumerationLimits, Presentation};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let g = Presentation::surface(2);
    let vd = vd_lower_bound(&g, 2, 1, EnumerationLimits::default())?;
    let p1 = &vd.chain.stages[1];
    println!("{g}");
    println!("P_1: index {}, b1 {}, ratio {}", p1.index(), p1.b1, p1.ratio());
    println!("L2 certificate: {:?}", approx_sequence(&vd.chain).certificate);

    let def = def_certificate(&g);
    let sm = supermult_certificate(&g, p1.index());
    let (b1c, l2c) = completion_certificates(&def, &vd.certificate, 2);
    for c in [&def, &sm, &vd.certificate, &b1c, &l2c] {
        println!("{:<22} {}  [{:?}, replays: {}]", format!("{:?}", c.kind), c.statement, c.status, c.replay());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
