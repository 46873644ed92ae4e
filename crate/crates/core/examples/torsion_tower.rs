//! Three steps of the tower construction on two generators at p = 2 with
//! epsilon = 1/2. Each line of the ledger is one step.

use l2approx::rational::ratio;
use l2approx::tower::{run_tower, TowerConfig};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    let config = TowerConfig { gen_count: 2, p: 2, epsilon: ratio(1, 2), steps: 3, ..TowerConfig::default() };
    let tower = run_tower(config)?;
    for r in &tower.state.ledger {
        println!(
            "f_{} = {:<5} {:?}  relator {:<5} vd {} -> {}",
            r.k,
            r.f,
            r.case,
            r.relator.as_deref().unwrap_or("-"),
            r.vd_before,
            r.vd_after
        );
    }
    let s = tower.summary();
    println!("final {} with vd_2 >= {}, ledger replays: {}", s.presentation, s.vd_bound, s.ledger_replays);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
