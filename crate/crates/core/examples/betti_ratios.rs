//! Ratios b1(N)/[G:N] along a chain and the L2-betti statement they support.

use l2approx::approx::{approx_sequence, default_epsilon, torsion_observation};
use l2approx::chains::build_chain;
use l2approx::rational::{decimal_string, ratio};
use l2approx::{parse_presentation, EnumerationLimits};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for (text, p, depth) in [("<x,y|>", 2, 2), ("<x,y|[x,y]>", 3, 2), ("<a,b|a^2,b^2,(a b)^3>", 2, 2)] {
        let g = parse_presentation(text)?;
        let chain = build_chain(&g, p, depth, EnumerationLimits::default())?;
        let report = approx_sequence(&chain);
        let ratios: Vec<String> = report.stages.iter().map(|s| format!("{} ({})", s.ratio, decimal_string(&s.ratio))).collect();
        println!("{g}: {}", ratios.join(", "));
        let c = &report.certificate;
        println!("  b1^(2) >= {} [{:?}], tail minimum {}", c.value, c.status, c.tail_min);
        println!("  torsion flag at 1/100: {}", torsion_observation(&chain, &default_epsilon()).flag);
    }

    let z2 = parse_presentation("<x,y|[x,y]>")?;
    let chain = build_chain(&z2, 3, 2, EnumerationLimits::default())?;
    println!("Z^2 torsion flag at 3/10: {}", torsion_observation(&chain, &ratio(3, 10)).flag);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
