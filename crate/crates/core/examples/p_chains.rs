//! Derived p-series of a few groups: indices, first betti numbers and the
//! index law [G:P_{i+1}] = [G:P_i] p^{dim H1(P_i; F_p)}.

use l2approx::chains::build_chain;
use l2approx::{parse_presentation, EnumerationLimits};

pub fn run() -> Result<(), Box<dyn std::error::Error>> {
    for (text, p, depth) in [("<x,y|>", 2, 2), ("<x,y|[x,y]>", 3, 2), ("<x|x^2>", 2, 2), ("<x,y|x^4>", 2, 2)] {
        let g = parse_presentation(text)?;
        let chain = build_chain(&g, p, depth, EnumerationLimits::default())?;
        println!("{g} at p = {p}");
        for s in &chain.stages {
            println!("  P_{}: index {:>4}  b1 {:>4}  dim H1(F_p) {:>4}", s.depth, s.index(), s.b1, s.b1_mod_p);
        }
        println!("  checks: {:?}", chain.check());
    }

    let surface = parse_presentation("<a1,b1,a2,b2 | [a1,b1][a2,b2]>")?;
    let chain = build_chain(&surface, 2, 2, EnumerationLimits::default())?;
    println!("genus 2 indices {:?}, stopped: {:?}", chain.indices(), chain.truncated);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run()
}
